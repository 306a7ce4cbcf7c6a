#pragma once

#include <functional>
#include <string>

#include "saw/embedding.hpp"
#include "saw/extraction.hpp"
#include "saw/prompt.hpp"

namespace saw {

// Pairwise element similarity by graph position; must be symmetric.
using PairSimilarity = std::function<double(int, int)>;

// Builds a memoizing PairSimilarity over rendered-element embeddings. The
// memo is local to the returned callable (one job), embeddings come from the
// encoder's shared cache.
PairSimilarity make_pair_similarity(const PromptGraph& graph, const Encoder& encoder);

// Redundancy filter at a fixed threshold: walk elements in graph order and
// keep an element iff its max similarity to the already-kept set is <= delta.
// The kept set starts empty (max over nothing is -inf), so the first element
// always survives and the result is never empty. delta outside [0, 1] ->
// input error; empty graph -> input error.
PromptGraph compress_at_threshold(const PromptGraph& graph, double delta,
                                  const PairSimilarity& sim);
PromptGraph compress_at_threshold(const PromptGraph& graph, double delta,
                                  const Encoder& encoder);

struct ThresholdSearch {
  double delta = 0.0;
  PromptGraph subgraph;
  int iterations = 0;
};

// Bisects delta on [0, 1] until the interval is narrower than gamma:
// rate > target_rate pulls the right edge in, otherwise the left. The final
// delta is the interval midpoint and the returned subgraph is the compression
// at that delta. Iteration count is exactly ceil(log2(1/gamma)).
ThresholdSearch binary_search_threshold(const PromptGraph& graph, double target_rate,
                                        double gamma, const PairSimilarity& sim);
ThresholdSearch binary_search_threshold(const PromptGraph& graph, double target_rate,
                                        double gamma, const Encoder& encoder);

// Pipeline: extract -> fuse -> threshold search -> restore. The question is
// not consulted; it passes through to the assembled prompt verbatim.
// iterations = binary search iterations.
CompressionResult compress_task_agnostic(const Prompt& prompt,
                                         const CompressionConfig& config,
                                         const Encoder& encoder,
                                         const ExtractionBackend& backend);

}  // namespace saw
