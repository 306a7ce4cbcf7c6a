#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "saw/embedding.hpp"
#include "saw/extraction.hpp"
#include "saw/prompt.hpp"

namespace saw {

struct DatasetRecord {
  std::string id;
  Prompt prompt;
  std::string gold_answer;
  std::map<std::string, std::string> metadata;

  // Line schema: {"id", "prompt": {"instruction","information","question"},
  // "gold_answer", "metadata"?}.
  static DatasetRecord from_json(const nlohmann::json& j,
                                 const std::string& tokenizer_id = "whitespace");
  nlohmann::ordered_json to_json() const;
};

// One JSON object per line. Parse failures carry the 1-based line number;
// duplicate ids -> input error.
std::vector<DatasetRecord> load_records_jsonl(const std::string& path,
                                              const std::string& tokenizer_id = "whitespace");
void write_records_jsonl(const std::string& path,
                         const std::vector<DatasetRecord>& records);

enum class SetLabel { hard, easy };

// A question set evaluated against the original prompt plus N variants.
struct PromptSet {
  Prompt original;
  std::vector<Prompt> variants;
  SetLabel label = SetLabel::hard;
};

// i-shot arithmetic-reasoning prompt: the information segment is the first
// `shots` demonstrations joined by blank lines. shots must be one of
// {1, 2, 4, 8} -> config error otherwise; fewer demos than shots -> input
// error.
Prompt build_gsm8k_aug(const std::vector<std::string>& demos, int shots,
                       const std::string& instruction = "",
                       const std::string& question = "",
                       const std::string& tokenizer_id = "whitespace");

// Row i of `answers` holds 0/1 correctness of question i against the
// original prompt and each variant (width = 1 + variants). hard keeps
// questions missed at least once; easy keeps questions solved at least once:
// all-1 rows leave hard sets, all-0 rows leave easy sets. Dimension
// mismatches -> input error.
std::vector<DatasetRecord> filter_questions(const std::vector<DatasetRecord>& questions,
                                            const PromptSet& prompt_set,
                                            const std::vector<std::vector<int>>& answers);
std::vector<DatasetRecord> filter_questions(const std::vector<DatasetRecord>& questions,
                                            SetLabel label, size_t prompt_count,
                                            const std::vector<std::vector<int>>& answers);

struct BenchmarkOptions {
  CompressionConfig config;
  ExtractionBackend extractor;
  std::string model_url;  // empty: offline, no EM/SAcc/ROUGE columns
  int model_max_tokens = 400;
  double model_temperature = 0.0;
  double model_timeout_seconds = 60.0;
  int workers = 1;
  int repeats = 1;  // model calls per record; metrics are averaged
};

struct RecordRow {
  std::string id;
  std::string mode;
  int orig_tokens = 0;  // information-segment tokens
  int comp_tokens = 0;  // compressed-body tokens
  double rate = 0.0;    // comp_tokens / orig_tokens
  double ratio = 0.0;   // orig_tokens / comp_tokens
  std::optional<double> em, sacc, rouge1, rouge2, rougeL, fl;
};

struct RunResult {
  std::vector<RecordRow> rows;                            // input order
  std::vector<std::pair<std::string, std::string>> failures;  // id, stage: message
  size_t total_records = 0;

  // Header: id mode orig_tokens comp_tokens rate ratio em sacc rouge1 rouge2
  // rougeL fl. Unavailable metrics are empty cells.
  std::string tsv() const;
  nlohmann::ordered_json summary() const;

  bool failure_rate_exceeded() const {
    return total_records > 0 && failures.size() * 10 > total_records;
  }
};

// Compresses (and optionally queries a temperature-0 model endpoint for)
// every record. Deterministic for a fixed encoder backend and model. Records
// that fail are reported in `failures` and the run continues.
RunResult run_benchmark(const std::string& dataset_path, const BenchmarkOptions& options,
                        const Encoder& encoder);

}  // namespace saw
