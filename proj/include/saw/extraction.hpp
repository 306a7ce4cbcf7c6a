#pragma once

#include <string>
#include <vector>

#include "saw/prompt.hpp"

namespace saw {

enum class ExtractorKind { rule_based, llm_template };

struct ExtractionBackend {
  ExtractorKind kind = ExtractorKind::rule_based;
  std::string endpoint_url;     // required for llm_template
  int max_tokens = 400;
  double temperature = 0.0;
  double timeout_seconds = 30.0;
  int retries = 2;
};

// Splits on '.', '!', '?' followed by whitespace or end of text; the
// terminator is stripped. No abbreviation handling by design.
std::vector<std::string> split_sentences(const std::string& text);

// Few-shot instruction wrapped around `information` for the LLM extractor.
// The returned text ends with "Input:" + information.
std::string build_extraction_prompt(const std::string& information);

struct ParsedTriplets {
  std::vector<InformationElement> elements;
  int skipped_lines = 0;  // lines that did not yield exactly 3 non-empty fields
};

// Parses "<s; r; o>" lines (angle brackets optional). source_index is the
// element's ordinal among parsed lines. Zero parseable lines ->
// extraction-empty error.
ParsedTriplets parse_llm_triplets(const std::string& response,
                                  const std::string& tokenizer_id = "whitespace");

// Merges elements whose (subject, relation) match after lowercasing; objects
// are joined with ", " in source order, the merged element keeps the earliest
// source_index, and first-occurrence order is preserved.
PromptGraph fuse_elements(const PromptGraph& graph,
                          const std::string& tokenizer_id = "whitespace");

// Builds the information graph for prompt.information(). Empty information
// segment -> input error; no extractable element -> extraction-empty error.
// The rule-based backend runs offline; the llm_template backend POSTs
// {"prompt", "max_tokens", "temperature"} and reads {"text"}.
PromptGraph extract_graph(const Prompt& prompt, const ExtractionBackend& backend);

}  // namespace saw
