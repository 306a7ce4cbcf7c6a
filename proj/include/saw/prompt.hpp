#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace saw {

// A prompt is three segments: instruction, information, question. Compression
// touches only the information segment; the other two pass through verbatim,
// so rates are computed over information content alone.
class Prompt {
 public:
  Prompt() = default;

  static Prompt make(std::string instruction, std::string information,
                     std::string question,
                     const std::string& tokenizer_id = "whitespace");

  const std::string& instruction() const { return instruction_; }
  const std::string& information() const { return information_; }
  const std::string& question() const { return question_; }
  const std::string& tokenizer_id() const { return tokenizer_id_; }

  int instruction_tokens() const { return instruction_tokens_; }
  int information_tokens() const { return information_tokens_; }
  int question_tokens() const { return question_tokens_; }
  int total_tokens() const {
    return instruction_tokens_ + information_tokens_ + question_tokens_;
  }

  static Prompt from_json(const nlohmann::json& j,
                          const std::string& tokenizer_id = "whitespace");
  nlohmann::ordered_json to_json() const;

 private:
  std::string instruction_;
  std::string information_;
  std::string question_;
  std::string tokenizer_id_ = "whitespace";
  int instruction_tokens_ = 0;
  int information_tokens_ = 0;
  int question_tokens_ = 0;
};

// One <subject, relation, object> unit. Fields are normalized at construction:
// trimmed, inner whitespace collapsed, and the reserved ';' stripped so that
// strict-mode restoration stays parseable. token_length is the tokenizer's
// count of the rendered "subject relation object" form.
class InformationElement {
 public:
  InformationElement() = default;

  // Throws input error if any field is empty after normalization or if
  // source_index is negative.
  static InformationElement make(std::string subject, std::string relation,
                                 std::string object, int source_index,
                                 const std::string& tokenizer_id = "whitespace");

  const std::string& subject() const { return subject_; }
  const std::string& relation() const { return relation_; }
  const std::string& object() const { return object_; }
  int source_index() const { return source_index_; }
  int token_length() const { return token_length_; }

  std::string rendered() const;

  bool operator==(const InformationElement& other) const {
    return subject_ == other.subject_ && relation_ == other.relation_ &&
           object_ == other.object_ && source_index_ == other.source_index_;
  }

 private:
  std::string subject_;
  std::string relation_;
  std::string object_;
  int source_index_ = 0;
  int token_length_ = 0;
};

// Ordered list of elements plus its total token length. Graphs produced by
// extraction and fusion are in strictly increasing source_index order;
// intermediate selections (ranking, adaptive picks) may reorder, which
// is_source_ordered() reports.
class PromptGraph {
 public:
  PromptGraph() = default;
  explicit PromptGraph(std::vector<InformationElement> elements);

  size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  const InformationElement& operator[](size_t i) const { return elements_[i]; }
  const std::vector<InformationElement>& elements() const { return elements_; }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  // Sum of element token lengths: len(G).
  int total_token_length() const { return total_token_length_; }

  bool is_source_ordered() const;

  static PromptGraph from_json(const nlohmann::json& j,
                               const std::string& tokenizer_id = "whitespace");
  nlohmann::ordered_json to_json() const;

 private:
  std::vector<InformationElement> elements_;
  int total_token_length_ = 0;
};

enum class Mode { task_aware, task_agnostic, adaptive };

std::string mode_to_string(Mode mode);
// Accepts the CLI spellings "task-aware" / "task-agnostic" / "adaptive";
// anything else -> config error.
Mode mode_from_string(const std::string& s);

enum class DelimiterMode { strict, compat };

struct CompressionConfig {
  Mode mode = Mode::task_agnostic;
  double target_rate = 0.7;          // eta*: desired compressed/original rate
  double interval_threshold = 0.001; // gamma: binary search stop width
  double adaptive_gap = -0.05;       // eta: relative score-gap floor
  std::string tokenizer_id = "whitespace";
  DelimiterMode delimiter = DelimiterMode::strict;

  // Structural checks: target_rate in (0,1], interval_threshold in (0,1).
  // Throws config error.
  void validate() const;
  // Adds prompt-dependent checks: task_aware requires a non-empty question.
  void validate(const Prompt& prompt) const;
};

struct CompressionResult {
  PromptGraph subgraph;
  std::string compressed_text;        // full prompt: instruction \n body \n question
  std::string compressed_body;        // restored information segment only
  double achieved_rate = 0.0;         // len(subgraph) / len(G)
  int compressed_tokens = 0;          // tokenizer count of compressed_body
  std::optional<double> threshold_used;  // delta, task-agnostic only
  int iterations = 0;                 // mode-specific loop count, see pipelines
};

// eta = compressed_len / original_len. original_len == 0 or compressed_len
// outside [0, original_len] -> domain error.
double compression_rate(int compressed_len, int original_len);

}  // namespace saw
