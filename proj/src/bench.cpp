#include "saw/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <set>
#include <thread>

#include "saw/compress.hpp"
#include "saw/errors.hpp"
#include "saw/http_client.hpp"
#include "saw/metrics.hpp"
#include "saw/text.hpp"

namespace saw {

DatasetRecord DatasetRecord::from_json(const nlohmann::json& j,
                                       const std::string& tokenizer_id) {
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
      !j.contains("prompt")) {
    throw input_error("record needs string \"id\" and object \"prompt\"");
  }
  DatasetRecord r;
  r.id = j["id"].get<std::string>();
  r.prompt = Prompt::from_json(j["prompt"], tokenizer_id);
  if (j.contains("gold_answer")) r.gold_answer = j["gold_answer"].get<std::string>();
  if (j.contains("metadata") && j["metadata"].is_object()) {
    for (const auto& [k, v] : j["metadata"].items()) {
      r.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  return r;
}

nlohmann::ordered_json DatasetRecord::to_json() const {
  nlohmann::ordered_json j{
      {"id", id},
      {"prompt", prompt.to_json()},
      {"gold_answer", gold_answer},
  };
  if (!metadata.empty()) {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : metadata) m[k] = v;
    j["metadata"] = std::move(m);
  }
  return j;
}

std::vector<DatasetRecord> load_records_jsonl(const std::string& path,
                                              const std::string& tokenizer_id) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open dataset file: " + path);

  std::vector<DatasetRecord> records;
  std::set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw input_error(path + ":" + std::to_string(line_no) + ": invalid JSON");
    }
    DatasetRecord rec;
    try {
      rec = DatasetRecord::from_json(j, tokenizer_id);
    } catch (const Error& e) {
      throw Error(e.kind(),
                  path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(rec.id).second) {
      throw input_error(path + ":" + std::to_string(line_no) +
                        ": duplicate record id: " + rec.id);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_records_jsonl(const std::string& path,
                         const std::vector<DatasetRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot open output file: " + path);
  for (const auto& r : records) out << r.to_json().dump() << "\n";
}

Prompt build_gsm8k_aug(const std::vector<std::string>& demos, int shots,
                       const std::string& instruction, const std::string& question,
                       const std::string& tokenizer_id) {
  if (shots != 1 && shots != 2 && shots != 4 && shots != 8) {
    throw config_error("shots must be one of 1, 2, 4, 8");
  }
  if (demos.size() < static_cast<size_t>(shots)) {
    throw input_error("need at least " + std::to_string(shots) + " demos, have " +
                      std::to_string(demos.size()));
  }
  std::vector<std::string> used(demos.begin(), demos.begin() + shots);
  return Prompt::make(instruction, join(used, "\n\n"), question, tokenizer_id);
}

std::vector<DatasetRecord> filter_questions(const std::vector<DatasetRecord>& questions,
                                            SetLabel label, size_t prompt_count,
                                            const std::vector<std::vector<int>>& answers) {
  if (answers.size() != questions.size()) {
    throw input_error("answer matrix must have one row per question");
  }
  std::vector<DatasetRecord> kept;
  for (size_t i = 0; i < questions.size(); ++i) {
    const auto& row = answers[i];
    if (row.size() != prompt_count) {
      throw input_error("answer row " + std::to_string(i) + " has " +
                        std::to_string(row.size()) + " entries, expected " +
                        std::to_string(prompt_count));
    }
    int ones = 0;
    for (int v : row) {
      if (v != 0 && v != 1) throw input_error("answer entries must be 0 or 1");
      ones += v;
    }
    // hard: drop questions every prompt solved; easy: drop questions every
    // prompt missed.
    const bool drop = label == SetLabel::hard ? ones == static_cast<int>(row.size())
                                              : ones == 0;
    if (!drop) kept.push_back(questions[i]);
  }
  return kept;
}

std::vector<DatasetRecord> filter_questions(const std::vector<DatasetRecord>& questions,
                                            const PromptSet& prompt_set,
                                            const std::vector<std::vector<int>>& answers) {
  return filter_questions(questions, prompt_set.label, 1 + prompt_set.variants.size(),
                          answers);
}

namespace {

std::string query_model(const std::string& url, const std::string& prompt,
                        const BenchmarkOptions& options) {
  HttpJsonClient client{url, options.model_timeout_seconds, 0};
  const nlohmann::json res =
      client.post_json({{"prompt", prompt},
                        {"max_tokens", options.model_max_tokens},
                        {"temperature", options.model_temperature}});
  if (!res.is_object() || !res.contains("text") || !res["text"].is_string()) {
    throw transport_error("model endpoint response lacks a \"text\" string");
  }
  return res["text"].get<std::string>();
}

RecordRow evaluate_record(const DatasetRecord& record, const BenchmarkOptions& options,
                          const Encoder& encoder) {
  const CompressionResult result =
      compress(record.prompt, options.config, encoder, options.extractor);

  RecordRow row;
  row.id = record.id;
  row.mode = mode_to_string(options.config.mode);
  row.orig_tokens = record.prompt.information_tokens();
  row.comp_tokens = result.compressed_tokens;
  // Token-count based, unlike the envelope's subgraph-length rate; an LLM
  // extractor can in principle emit more tokens than the source, so this is
  // a plain quotient rather than compression_rate() with its domain guard.
  row.rate = static_cast<double>(row.comp_tokens) / row.orig_tokens;
  row.ratio = row.comp_tokens > 0
                  ? static_cast<double>(row.orig_tokens) / row.comp_tokens
                  : 0.0;

  try {
    row.fl = fluency(result.compressed_body, options.config.tokenizer_id);
  } catch (const Error&) {
    // bodies under 3 tokens have no trigram distribution; leave the cell empty
  }

  if (!options.model_url.empty()) {
    double em_sum = 0.0, sacc_sum = 0.0, r1_sum = 0.0, r2_sum = 0.0, rl_sum = 0.0;
    for (int rep = 0; rep < options.repeats; ++rep) {
      const std::string predicted =
          query_model(options.model_url, result.compressed_text, options);
      em_sum += exact_match(predicted, record.gold_answer);
      sacc_sum += span_accuracy(predicted, record.gold_answer);
      r1_sum += rouge(predicted, record.gold_answer, RougeVariant::rouge1,
                      options.config.tokenizer_id)
                    .f1;
      r2_sum += rouge(predicted, record.gold_answer, RougeVariant::rouge2,
                      options.config.tokenizer_id)
                    .f1;
      rl_sum += rouge(predicted, record.gold_answer, RougeVariant::rougeL,
                      options.config.tokenizer_id)
                    .f1;
    }
    const double n = options.repeats;
    row.em = em_sum / n;
    row.sacc = sacc_sum / n;
    row.rouge1 = r1_sum / n;
    row.rouge2 = r2_sum / n;
    row.rougeL = rl_sum / n;
  }
  return row;
}

std::string format_cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

std::string format_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string RunResult::tsv() const {
  std::string out =
      "id\tmode\torig_tokens\tcomp_tokens\trate\tratio\tem\tsacc\trouge1\trouge2\t"
      "rougeL\tfl\n";
  for (const auto& r : rows) {
    out += r.id + "\t" + r.mode + "\t" + std::to_string(r.orig_tokens) + "\t" +
           std::to_string(r.comp_tokens) + "\t" + format_num(r.rate) + "\t" +
           format_num(r.ratio) + "\t" + format_cell(r.em) + "\t" + format_cell(r.sacc) +
           "\t" + format_cell(r.rouge1) + "\t" + format_cell(r.rouge2) + "\t" +
           format_cell(r.rougeL) + "\t" + format_cell(r.fl) + "\n";
  }
  return out;
}

nlohmann::ordered_json RunResult::summary() const {
  auto aggregate = [&](auto getter) -> nlohmann::ordered_json {
    double sum = 0.0;
    size_t n = 0;
    for (const auto& r : rows) {
      const auto v = getter(r);
      if (v) {
        sum += *v;
        ++n;
      }
    }
    if (n == 0) return nullptr;
    return sum / static_cast<double>(n);
  };

  double rate_sum = 0.0, ratio_sum = 0.0;
  for (const auto& r : rows) {
    rate_sum += r.rate;
    ratio_sum += r.ratio;
  }

  nlohmann::ordered_json j;
  j["records"] = total_records;
  j["evaluated"] = rows.size();
  j["failed"] = failures.size();
  j["mean_rate"] = rows.empty() ? nlohmann::ordered_json(nullptr)
                                : nlohmann::ordered_json(rate_sum / rows.size());
  j["mean_ratio"] = rows.empty() ? nlohmann::ordered_json(nullptr)
                                 : nlohmann::ordered_json(ratio_sum / rows.size());
  j["mean_em"] = aggregate([](const RecordRow& r) { return r.em; });
  j["mean_sacc"] = aggregate([](const RecordRow& r) { return r.sacc; });
  j["mean_rouge1"] = aggregate([](const RecordRow& r) { return r.rouge1; });
  j["mean_rouge2"] = aggregate([](const RecordRow& r) { return r.rouge2; });
  j["mean_rougeL"] = aggregate([](const RecordRow& r) { return r.rougeL; });
  j["mean_fl"] = aggregate([](const RecordRow& r) { return r.fl; });
  nlohmann::ordered_json fails = nlohmann::ordered_json::array();
  for (const auto& [id, msg] : failures) {
    fails.push_back(nlohmann::ordered_json{{"id", id}, {"error", msg}});
  }
  j["failures"] = std::move(fails);
  return j;
}

RunResult run_benchmark(const std::string& dataset_path, const BenchmarkOptions& options,
                        const Encoder& encoder) {
  options.config.validate();
  if (options.workers < 1) throw config_error("workers must be >= 1");
  if (options.repeats < 1) throw config_error("repeats must be >= 1");

  const auto records = load_records_jsonl(dataset_path, options.config.tokenizer_id);

  std::vector<std::optional<RecordRow>> slots(records.size());
  std::vector<std::optional<std::string>> errors(records.size());

  const int workers = static_cast<int>(std::min<size_t>(
      static_cast<size_t>(options.workers), std::max<size_t>(records.size(), 1)));
  std::atomic<size_t> next{0};
  auto work = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= records.size()) break;
      try {
        slots[i] = evaluate_record(records[i], options, encoder);
      } catch (const Error& e) {
        errors[i] = e.what();
      } catch (const std::exception& e) {
        errors[i] = std::string("unexpected: ") + e.what();
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  RunResult result;
  result.total_records = records.size();
  for (size_t i = 0; i < records.size(); ++i) {
    if (slots[i]) {
      result.rows.push_back(std::move(*slots[i]));
    } else {
      result.failures.emplace_back(records[i].id,
                                   errors[i] ? *errors[i] : "unknown failure");
    }
  }
  return result;
}

}  // namespace saw
