#include "saw/adaptive.hpp"

#include <algorithm>

#include "saw/errors.hpp"
#include "saw/restore.hpp"
#include "saw/task_aware.hpp"
#include "saw/text.hpp"
#include "saw/tokenizer.hpp"

namespace saw {

namespace {

struct Selection {
  std::vector<int> picked;  // graph indices in selection order
  int evaluations = 0;      // candidates whose score entered a running mean
};

std::vector<double> question_scores(const PromptGraph& graph,
                                    const std::string& question,
                                    const Encoder& encoder) {
  if (graph.empty()) throw input_error("cannot select from an empty graph");
  if (trim(question).empty()) {
    throw input_error("adaptive selection needs a non-empty question");
  }
  const Embedding super = encoder.encode(question);
  std::vector<std::string> texts;
  texts.reserve(graph.size());
  for (const auto& e : graph) texts.push_back(e.rendered());
  const auto embeddings = encoder.encode_batch(texts);
  std::vector<double> scores(graph.size());
  for (size_t i = 0; i < graph.size(); ++i) scores[i] = similarity(embeddings[i], super);
  return scores;
}

Selection select_by_gap(const PromptGraph& graph, const std::vector<double>& scores,
                        double gap) {
  if (graph.empty()) throw input_error("cannot select from an empty graph");
  if (scores.size() != graph.size()) {
    throw input_error("need one score per graph element");
  }

  const std::vector<int> order = rank_by_similarity(scores);

  if (graph.size() >= 2 && gap >= 0.0 && scores[order[0]] <= 0.0) {
    // Every candidate scores <= 0: the running mean starts non-positive and a
    // non-negative gap can never be exceeded meaningfully.
    throw degenerate_input_error(
        "all candidate similarities are <= 0 with a non-negative gap");
  }

  Selection sel;
  double running_sum = 0.0;
  double prev_score = 0.0;  // score_{k-1}
  for (size_t k = 1; k <= order.size(); ++k) {
    const int idx = order[k - 1];
    running_sum += scores[idx];
    const double score_k = running_sum / static_cast<double>(k);
    sel.picked.push_back(idx);
    sel.evaluations = static_cast<int>(k);
    if (k >= 2) {
      if (prev_score == 0.0) {
        throw degenerate_input_error("running score is zero; relative gap undefined");
      }
      const double beta = (score_k - prev_score) / prev_score;
      if (!(beta > gap)) {
        sel.picked.pop_back();  // the halting candidate is deleted
        break;
      }
    }
    prev_score = score_k;
  }
  return sel;
}

}  // namespace

PromptGraph adaptive_extract(const PromptGraph& graph,
                             const std::vector<double>& scores, double gap) {
  const Selection sel = select_by_gap(graph, scores, gap);
  std::vector<InformationElement> elements;
  elements.reserve(sel.picked.size());
  for (int i : sel.picked) elements.push_back(graph[static_cast<size_t>(i)]);
  return PromptGraph(std::move(elements));
}

PromptGraph adaptive_extract(const PromptGraph& graph, const std::string& question,
                             double gap, const Encoder& encoder) {
  return adaptive_extract(graph, question_scores(graph, question, encoder), gap);
}

PromptGraph recover_in_source_order(const PromptGraph& graph) {
  std::vector<InformationElement> elements(graph.elements());
  std::stable_sort(elements.begin(), elements.end(),
                   [](const InformationElement& a, const InformationElement& b) {
                     return a.source_index() < b.source_index();
                   });
  return PromptGraph(std::move(elements));
}

CompressionResult compress_adaptive(const Prompt& prompt,
                                    const CompressionConfig& config,
                                    const Encoder& encoder,
                                    const ExtractionBackend& backend) {
  config.validate(prompt);

  const PromptGraph raw =
      with_stage("extract", [&] { return extract_graph(prompt, backend); });
  const PromptGraph graph =
      with_stage("fuse", [&] { return fuse_elements(raw, prompt.tokenizer_id()); });

  PromptGraph selected;
  int evaluations = 0;
  with_stage("select", [&] {
    const auto scores = question_scores(graph, prompt.question(), encoder);
    const Selection sel = select_by_gap(graph, scores, config.adaptive_gap);
    evaluations = sel.evaluations;
    std::vector<InformationElement> elements;
    elements.reserve(sel.picked.size());
    for (int i : sel.picked) elements.push_back(graph[static_cast<size_t>(i)]);
    selected = PromptGraph(std::move(elements));
  });
  const PromptGraph subgraph = recover_in_source_order(selected);

  CompressionResult result;
  result.subgraph = subgraph;
  result.compressed_body =
      with_stage("restore", [&] { return restore_text(subgraph, config.delimiter); });
  result.compressed_text =
      assemble_prompt(prompt.instruction(), result.compressed_body, prompt.question());
  result.achieved_rate =
      compression_rate(subgraph.total_token_length(), graph.total_token_length());
  result.compressed_tokens = count_tokens(result.compressed_body, prompt.tokenizer_id());
  result.iterations = evaluations;
  return result;
}

}  // namespace saw
