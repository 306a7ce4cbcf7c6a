#include "saw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "saw/errors.hpp"
#include "saw/text.hpp"
#include "saw/tokenizer.hpp"

namespace saw {

std::string normalize_answer(const std::string& text) {
  std::string s = trim(collapse_whitespace(to_lower_ascii(text)));
  if (!s.empty() && s.back() == '.') {
    s.pop_back();
    s = trim(s);
  }
  return s;
}

int exact_match(const std::string& predicted, const std::string& gold) {
  return normalize_answer(predicted) == normalize_answer(gold) ? 1 : 0;
}

int span_accuracy(const std::string& predicted, const std::string& gold) {
  const std::string g = to_lower_ascii(gold);
  if (trim(g).empty()) throw input_error("span_accuracy: gold answer is empty");
  return to_lower_ascii(predicted).find(g) != std::string::npos ? 1 : 0;
}

namespace {

// n-gram -> count, keys joined with an unlikely separator byte.
std::unordered_map<std::string, int> ngram_counts(const TokenList& tokens, size_t n) {
  std::unordered_map<std::string, int> counts;
  if (tokens.size() < n) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (size_t k = 0; k < n; ++k) {
      if (k) key.push_back('\x1f');
      key.append(tokens[i + k]);
    }
    ++counts[key];
  }
  return counts;
}

double f1_of(double p, double r) {
  return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

RougeScore rouge_n(const TokenList& cand, const TokenList& ref, size_t n) {
  const auto c_counts = ngram_counts(cand, n);
  const auto r_counts = ngram_counts(ref, n);
  long c_total = 0;
  long r_total = 0;
  for (const auto& [k, v] : c_counts) c_total += v;
  for (const auto& [k, v] : r_counts) r_total += v;

  long overlap = 0;  // clipped: each n-gram counts at most its reference count
  for (const auto& [k, v] : c_counts) {
    auto it = r_counts.find(k);
    if (it != r_counts.end()) overlap += std::min(v, it->second);
  }

  RougeScore s;
  s.precision = c_total > 0 ? static_cast<double>(overlap) / c_total : 0.0;
  s.recall = r_total > 0 ? static_cast<double>(overlap) / r_total : 0.0;
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

size_t lcs_length(const TokenList& a, const TokenList& b) {
  std::vector<size_t> prev(b.size() + 1, 0);
  std::vector<size_t> cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(const TokenList& cand, const TokenList& ref) {
  const double lcs = static_cast<double>(lcs_length(cand, ref));
  RougeScore s;
  s.precision = cand.empty() ? 0.0 : lcs / static_cast<double>(cand.size());
  s.recall = ref.empty() ? 0.0 : lcs / static_cast<double>(ref.size());
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

double ngram_entropy(const TokenList& tokens, size_t n) {
  const auto counts = ngram_counts(tokens, n);
  double total = 0.0;
  for (const auto& [k, v] : counts) total += v;
  double h = 0.0;
  for (const auto& [k, v] : counts) {
    const double p = v / total;
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

RougeScore rouge(const std::string& candidate, const std::string& reference,
                 RougeVariant variant, const std::string& tokenizer_id) {
  const TokenList cand = tokenize(candidate, tokenizer_id);
  const TokenList ref = tokenize(reference, tokenizer_id);
  if (cand.empty() || ref.empty()) {
    throw input_error("rouge: candidate and reference must be non-empty");
  }
  switch (variant) {
    case RougeVariant::rouge1:
      return rouge_n(cand, ref, 1);
    case RougeVariant::rouge2:
      return rouge_n(cand, ref, 2);
    case RougeVariant::rougeL:
      return rouge_l(cand, ref);
  }
  return {};
}

double fluency(const std::string& text, const std::string& tokenizer_id,
               double bigram_weight, double trigram_weight) {
  const TokenList tokens = tokenize(text, tokenizer_id);
  if (tokens.size() < 3) {
    throw input_error("fluency needs at least 3 tokens");
  }
  return bigram_weight * ngram_entropy(tokens, 2) +
         trigram_weight * ngram_entropy(tokens, 3);
}

double cost_model(long prompt_tokens, double target_rate, double graph_cost_ratio) {
  (void)prompt_tokens;  // both terms are fractions of the full-prompt cost
  return graph_cost_ratio + target_rate;
}

MetricReport MetricReport::from_items(std::string name, std::vector<double> items) {
  MetricReport r;
  r.name = std::move(name);
  r.per_item = std::move(items);
  if (!r.per_item.empty()) {
    double sum = 0.0;
    for (double v : r.per_item) sum += v;
    r.value = sum / static_cast<double>(r.per_item.size());
  }
  return r;
}

nlohmann::ordered_json MetricReport::to_json() const {
  return nlohmann::ordered_json{
      {"metric", name},
      {"value", value},
      {"n", per_item.size()},
  };
}

std::string MetricReport::tsv_row() const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return name + "\t" + buf + "\t" + std::to_string(per_item.size());
}

}  // namespace saw
