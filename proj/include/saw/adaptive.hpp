#pragma once

#include <string>
#include <vector>

#include "saw/embedding.hpp"
#include "saw/extraction.hpp"
#include "saw/prompt.hpp"

namespace saw {

// Gap-halted selection around a question "super vertex". Candidates are
// consumed in descending similarity-to-question order (ties: ascending
// source_index). score_k is the mean of the first k similarities; from k = 2
// on, the relative gap beta = (score_k - score_{k-1}) / score_{k-1} must stay
// above `gap` or selection halts and the k-th element is deleted. A single
// candidate can never halt. The returned graph is in selection order.
//
// scores must have one entry per element. All scores <= 0 with gap >= 0 (for
// graphs of two or more elements), or a zero score_{k-1} denominator ->
// degenerate-input error.
PromptGraph adaptive_extract(const PromptGraph& graph,
                             const std::vector<double>& scores, double gap);

// Scores rendered elements against the question, then selects as above.
// Empty graph or question -> input error.
PromptGraph adaptive_extract(const PromptGraph& graph, const std::string& question,
                             double gap, const Encoder& encoder);

// Stable sort by source_index; restores reading order after selection.
PromptGraph recover_in_source_order(const PromptGraph& graph);

// Pipeline: extract -> fuse -> gap-halted selection -> source-order recovery
// -> restore. iterations = number of candidates scored before the halt (the
// kept count, plus one when a candidate was deleted at the halt).
CompressionResult compress_adaptive(const Prompt& prompt,
                                    const CompressionConfig& config,
                                    const Encoder& encoder,
                                    const ExtractionBackend& backend);

}  // namespace saw
