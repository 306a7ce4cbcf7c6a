#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace saw {

// Answer normalization shared by exact_match: ASCII casefold, whitespace
// collapse, trim, then one trailing period dropped.
std::string normalize_answer(const std::string& text);

// 1 iff the normalized forms are identical.
int exact_match(const std::string& predicted, const std::string& gold);

// 1 iff the casefolded gold occurs as a substring of the casefolded
// prediction. Empty gold -> input error.
int span_accuracy(const std::string& predicted, const std::string& gold);

enum class RougeVariant { rouge1, rouge2, rougeL };

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// rouge1/rouge2: clipped n-gram overlap; rougeL: longest common subsequence.
// precision normalizes by the candidate, recall by the reference, and
// f1 = 2pr/(p+r) with 0 when p+r == 0. Either text empty -> input error.
RougeScore rouge(const std::string& candidate, const std::string& reference,
                 RougeVariant variant, const std::string& tokenizer_id = "whitespace");

// Weighted mean of bigram and trigram Shannon entropies (log base 2) over the
// text's n-gram relative frequencies. Texts with fewer than 3 tokens have no
// trigram distribution -> input error.
double fluency(const std::string& text, const std::string& tokenizer_id = "whitespace",
               double bigram_weight = 0.5, double trigram_weight = 0.5);

// Relative cost of compress-then-query versus querying with the full prompt:
// graph_cost_ratio + target_rate, both expressed as fractions of the full
// prompt's cost. Affine in both arguments; the prompt length L cancels.
double cost_model(long prompt_tokens, double target_rate, double graph_cost_ratio);

// Aggregated metric with optional per-item values; value must equal the
// per-item mean when items are present.
struct MetricReport {
  std::string name;
  double value = 0.0;
  std::vector<double> per_item;  // empty when only the aggregate is known

  static MetricReport from_items(std::string name, std::vector<double> items);

  nlohmann::ordered_json to_json() const;  // {"metric", "value", "n"}
  std::string tsv_row() const;             // name, value, n
};

}  // namespace saw
