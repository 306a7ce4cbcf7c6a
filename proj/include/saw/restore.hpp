#pragma once

#include <string>

#include "json.hpp"
#include "saw/prompt.hpp"

namespace saw {

// "subject relation object", single-spaced. Injective for ';'-free fields in
// strict mode because fields never contain the delimiter.
std::string render_element(const InformationElement& element);

// Joins rendered elements in graph order. strict: "; " between elements
// (machine-splittable); compat: "." with no surrounding spaces, matching how
// compressed prompts are printed in downstream transcripts. Empty graph ->
// empty-output error.
std::string restore_text(const PromptGraph& graph,
                         DelimiterMode mode = DelimiterMode::strict);

// Joins the non-empty segments with '\n'.
std::string assemble_prompt(const std::string& instruction, const std::string& body,
                            const std::string& question);

// Stable JSON envelope for one compression run:
// {"compressed_prompt", "rate", "ratio", "mode", "delta"}; delta is null
// except in task-agnostic mode.
nlohmann::ordered_json result_envelope(const CompressionResult& result, Mode mode);

}  // namespace saw
