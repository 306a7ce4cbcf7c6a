#include "saw/task_aware.hpp"

#include <algorithm>
#include <numeric>

#include "saw/errors.hpp"
#include "saw/restore.hpp"
#include "saw/text.hpp"
#include "saw/tokenizer.hpp"

namespace saw {

std::vector<int> rank_by_similarity(const std::vector<double>& scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  return order;
}

std::vector<int> rank_by_question(const PromptGraph& graph, const std::string& question,
                                  const Encoder& encoder) {
  if (graph.empty()) throw input_error("cannot rank an empty graph");
  if (trim(question).empty()) throw input_error("cannot rank against an empty question");

  const Embedding q = encoder.encode(question);
  std::vector<std::string> texts;
  texts.reserve(graph.size());
  for (const auto& e : graph) texts.push_back(e.rendered());
  const auto embeddings = encoder.encode_batch(texts);

  std::vector<double> scores(graph.size());
  for (size_t i = 0; i < graph.size(); ++i) scores[i] = similarity(embeddings[i], q);
  return rank_by_similarity(scores);
}

PromptGraph extract_subgraph(const PromptGraph& graph, const std::vector<int>& ranked,
                             double target_rate) {
  if (graph.empty()) throw input_error("cannot extract a subgraph from an empty graph");
  if (ranked.size() != graph.size()) {
    throw input_error("ranking must be a permutation of the graph indices");
  }
  std::vector<bool> seen(graph.size(), false);
  for (int idx : ranked) {
    if (idx < 0 || static_cast<size_t>(idx) >= graph.size() || seen[idx]) {
      throw input_error("ranking must be a permutation of the graph indices");
    }
    seen[idx] = true;
  }

  const double total = graph.total_token_length();
  std::vector<InformationElement> picked;
  int picked_len = 0;
  for (int idx : ranked) {
    picked.push_back(graph[static_cast<size_t>(idx)]);
    picked_len += graph[static_cast<size_t>(idx)].token_length();
    // Budget check runs after the insertion: the crossing element is kept.
    if (static_cast<double>(picked_len) / total > target_rate) break;
  }

  std::stable_sort(picked.begin(), picked.end(),
                   [](const InformationElement& a, const InformationElement& b) {
                     return a.source_index() < b.source_index();
                   });
  return PromptGraph(std::move(picked));
}

CompressionResult compress_task_aware(const Prompt& prompt,
                                      const CompressionConfig& config,
                                      const Encoder& encoder,
                                      const ExtractionBackend& backend) {
  config.validate(prompt);

  const PromptGraph raw =
      with_stage("extract", [&] { return extract_graph(prompt, backend); });
  const PromptGraph graph =
      with_stage("fuse", [&] { return fuse_elements(raw, prompt.tokenizer_id()); });
  const auto ranked = with_stage(
      "rank", [&] { return rank_by_question(graph, prompt.question(), encoder); });
  const PromptGraph subgraph = with_stage(
      "select", [&] { return extract_subgraph(graph, ranked, config.target_rate); });

  CompressionResult result;
  result.subgraph = subgraph;
  result.compressed_body =
      with_stage("restore", [&] { return restore_text(subgraph, config.delimiter); });
  result.compressed_text =
      assemble_prompt(prompt.instruction(), result.compressed_body, prompt.question());
  result.achieved_rate =
      compression_rate(subgraph.total_token_length(), graph.total_token_length());
  result.compressed_tokens = count_tokens(result.compressed_body, prompt.tokenizer_id());
  result.iterations = static_cast<int>(subgraph.size());
  return result;
}

}  // namespace saw
