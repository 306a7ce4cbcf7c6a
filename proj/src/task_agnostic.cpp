#include "saw/task_agnostic.hpp"

#include <algorithm>
#include <memory>
#include <unordered_map>
#include <vector>

#include "saw/errors.hpp"
#include "saw/restore.hpp"
#include "saw/tokenizer.hpp"

namespace saw {

PairSimilarity make_pair_similarity(const PromptGraph& graph, const Encoder& encoder) {
  std::vector<std::string> texts;
  texts.reserve(graph.size());
  for (const auto& e : graph) texts.push_back(e.rendered());
  auto embeddings = std::make_shared<std::vector<Embedding>>(encoder.encode_batch(texts));
  auto memo = std::make_shared<std::unordered_map<uint64_t, double>>();
  const uint64_t n = graph.size();

  return [embeddings, memo, n](int a, int b) {
    const uint64_t key = std::min(a, b) * n + std::max(a, b);
    auto it = memo->find(key);
    if (it != memo->end()) return it->second;
    const double s = similarity((*embeddings)[a], (*embeddings)[b]);
    (*memo)[key] = s;
    return s;
  };
}

PromptGraph compress_at_threshold(const PromptGraph& graph, double delta,
                                  const PairSimilarity& sim) {
  if (graph.empty()) throw input_error("cannot compress an empty graph");
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw input_error("threshold delta must be in [0, 1]");
  }

  std::vector<int> kept;
  for (int i = 0; i < static_cast<int>(graph.size()); ++i) {
    bool redundant = false;
    // max over the kept set; empty set means no similarity can exceed delta.
    for (int k : kept) {
      if (sim(k, i) > delta) {
        redundant = true;
        break;
      }
    }
    if (!redundant) kept.push_back(i);
  }

  std::vector<InformationElement> elements;
  elements.reserve(kept.size());
  for (int i : kept) elements.push_back(graph[static_cast<size_t>(i)]);
  return PromptGraph(std::move(elements));
}

PromptGraph compress_at_threshold(const PromptGraph& graph, double delta,
                                  const Encoder& encoder) {
  return compress_at_threshold(graph, delta, make_pair_similarity(graph, encoder));
}

ThresholdSearch binary_search_threshold(const PromptGraph& graph, double target_rate,
                                        double gamma, const PairSimilarity& sim) {
  if (graph.empty()) throw input_error("cannot compress an empty graph");
  if (!(gamma > 0.0 && gamma < 1.0)) throw input_error("gamma must be in (0, 1)");
  if (!(target_rate > 0.0 && target_rate <= 1.0)) {
    throw input_error("target_rate must be in (0, 1]");
  }

  const double total = graph.total_token_length();
  double l = 0.0;
  double r = 1.0;
  int iterations = 0;
  while (r - l > gamma) {
    const double mid = (l + r) / 2.0;
    const PromptGraph subset = compress_at_threshold(graph, mid, sim);
    const double rate = subset.total_token_length() / total;
    if (rate > target_rate) {
      r = mid;  // too permissive: lowering delta prunes more
    } else {
      l = mid;
    }
    ++iterations;
  }

  ThresholdSearch out;
  out.delta = (l + r) / 2.0;
  out.subgraph = compress_at_threshold(graph, out.delta, sim);
  out.iterations = iterations;
  return out;
}

ThresholdSearch binary_search_threshold(const PromptGraph& graph, double target_rate,
                                        double gamma, const Encoder& encoder) {
  return binary_search_threshold(graph, target_rate, gamma,
                                 make_pair_similarity(graph, encoder));
}

CompressionResult compress_task_agnostic(const Prompt& prompt,
                                         const CompressionConfig& config,
                                         const Encoder& encoder,
                                         const ExtractionBackend& backend) {
  config.validate(prompt);

  const PromptGraph raw =
      with_stage("extract", [&] { return extract_graph(prompt, backend); });
  const PromptGraph graph =
      with_stage("fuse", [&] { return fuse_elements(raw, prompt.tokenizer_id()); });
  const ThresholdSearch search = with_stage("search", [&] {
    return binary_search_threshold(graph, config.target_rate,
                                   config.interval_threshold, encoder);
  });

  CompressionResult result;
  result.subgraph = search.subgraph;
  result.compressed_body = with_stage(
      "restore", [&] { return restore_text(search.subgraph, config.delimiter); });
  result.compressed_text =
      assemble_prompt(prompt.instruction(), result.compressed_body, prompt.question());
  result.achieved_rate = compression_rate(search.subgraph.total_token_length(),
                                          graph.total_token_length());
  result.compressed_tokens = count_tokens(result.compressed_body, prompt.tokenizer_id());
  result.threshold_used = search.delta;
  result.iterations = search.iterations;
  return result;
}

}  // namespace saw
