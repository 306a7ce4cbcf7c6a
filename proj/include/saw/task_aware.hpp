#pragma once

#include <string>
#include <vector>

#include "saw/embedding.hpp"
#include "saw/extraction.hpp"
#include "saw/prompt.hpp"

namespace saw {

// Element indices sorted by descending similarity score; ties keep ascending
// index order.
std::vector<int> rank_by_similarity(const std::vector<double>& scores);

// Scores every element's rendered text against the question and ranks.
// Empty graph or empty question -> input error.
std::vector<int> rank_by_question(const PromptGraph& graph, const std::string& question,
                                  const Encoder& encoder);

// Greedy budgeted selection: walk `ranked`, insert the element, then stop as
// soon as the running rate len(subset)/len(G) exceeds target_rate. The
// element that crosses the budget stays in, so the result overshoots by at
// most max_element_len/len(G). Output is re-sorted by source_index.
// `ranked` must be a permutation of [0, graph.size()).
PromptGraph extract_subgraph(const PromptGraph& graph, const std::vector<int>& ranked,
                             double target_rate);

// Pipeline: extract -> fuse -> rank against the question -> budgeted
// selection -> restore. iterations = number of elements inserted.
CompressionResult compress_task_aware(const Prompt& prompt,
                                      const CompressionConfig& config,
                                      const Encoder& encoder,
                                      const ExtractionBackend& backend);

}  // namespace saw
