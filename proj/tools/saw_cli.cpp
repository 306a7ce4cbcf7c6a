// Command-line front end: compress, evaluate, augment, filter, cost.
// Exit codes: 0 ok, 2 configuration error, 3 input/data error, 4 transport
// error, 1 anything else (including benchmark runs with >10% failures).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "saw/bench.hpp"
#include "saw/compress.hpp"
#include "saw/errors.hpp"
#include "saw/metrics.hpp"
#include "saw/restore.hpp"
#include "saw/text.hpp"

namespace {

int exit_code_for(saw::ErrorKind kind) {
  switch (kind) {
    case saw::ErrorKind::config:
      return 2;
    case saw::ErrorKind::transport:
      return 4;
    default:
      return 3;
  }
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw saw::input_error("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw saw::input_error("cannot open output file: " + path);
  out << content;
}

nlohmann::json parse_json(const std::string& text, const std::string& what) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw saw::input_error("invalid JSON in " + what);
  return j;
}

struct CompressionFlags {
  std::string mode = "task-agnostic";
  double target_rate = 0.7;
  double gamma = 0.001;
  double adaptive_gap = -0.05;
  std::string encoder = "hash";
  std::string encoder_url;
  int encoder_dim = saw::kDefaultHashedDim;
  std::string extractor = "rules";
  std::string extractor_url;
  std::string delimiter = "strict";
  std::string tokenizer = "whitespace";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "Compression mode: task-aware, task-agnostic, adaptive")
        ->capture_default_str()
        ->check(CLI::IsMember({"task-aware", "task-agnostic", "adaptive"}));
    cmd->add_option("--target-rate", target_rate,
                    "Target compression rate over information tokens, in (0, 1]")
        ->capture_default_str();
    cmd->add_option("--gamma", gamma, "Threshold search interval width, in (0, 1)")
        ->capture_default_str();
    cmd->add_option("--adaptive-gap", adaptive_gap,
                    "Relative score-gap floor for adaptive mode")
        ->capture_default_str();
    cmd->add_option("--encoder", encoder, "Embedding backend: hash or http")
        ->capture_default_str()
        ->check(CLI::IsMember({"hash", "http"}));
    cmd->add_option("--encoder-url", encoder_url, "Embedding endpoint for --encoder http")
        ->envname("SAW_ENCODER_URL");
    cmd->add_option("--encoder-dim", encoder_dim, "Embedding dimension")
        ->capture_default_str();
    cmd->add_option("--extractor", extractor, "Graph extractor: rules or llm")
        ->capture_default_str()
        ->check(CLI::IsMember({"rules", "llm"}));
    cmd->add_option("--extractor-url", extractor_url,
                    "Completion endpoint for --extractor llm")
        ->envname("SAW_EXTRACTOR_URL");
    cmd->add_option("--delimiter", delimiter,
                    "Restored-text delimiter style: strict or compat")
        ->capture_default_str()
        ->check(CLI::IsMember({"strict", "compat"}));
    cmd->add_option("--tokenizer", tokenizer, "Registered tokenizer for token counts")
        ->capture_default_str();
  }

  saw::CompressionConfig config() const {
    saw::CompressionConfig c;
    c.mode = saw::mode_from_string(mode);
    c.target_rate = target_rate;
    c.interval_threshold = gamma;
    c.adaptive_gap = adaptive_gap;
    c.tokenizer_id = tokenizer;
    c.delimiter = delimiter == "compat" ? saw::DelimiterMode::compat
                                        : saw::DelimiterMode::strict;
    c.validate();
    return c;
  }

  saw::Encoder make_encoder() const {
    if (encoder == "hash") return saw::Encoder::hashed_offline(encoder_dim);
    if (saw::trim(encoder_url).empty()) {
      throw saw::config_error(
          "--encoder http needs --encoder-url or SAW_ENCODER_URL");
    }
    return saw::Encoder::http_remote(encoder_url, encoder_dim);
  }

  saw::ExtractionBackend make_extractor() const {
    saw::ExtractionBackend b;
    if (extractor == "llm") {
      if (saw::trim(extractor_url).empty()) {
        throw saw::config_error(
            "--extractor llm needs --extractor-url or SAW_EXTRACTOR_URL");
      }
      b.kind = saw::ExtractorKind::llm_template;
      b.endpoint_url = extractor_url;
    }
    return b;
  }
};

int cmd_compress(const CompressionFlags& flags, const std::string& in_path,
                 const std::string& out_path, const std::string& question_override,
                 const std::string& dump_graph_path) {
  const saw::CompressionConfig config = flags.config();
  const nlohmann::json pj = parse_json(read_input(in_path), "prompt");
  saw::Prompt prompt = saw::Prompt::from_json(pj, config.tokenizer_id);
  if (!question_override.empty()) {
    prompt = saw::Prompt::make(prompt.instruction(), prompt.information(),
                               question_override, config.tokenizer_id);
  }

  const saw::Encoder enc = flags.make_encoder();
  const saw::ExtractionBackend backend = flags.make_extractor();
  const saw::CompressionResult result = saw::compress(prompt, config, enc, backend);

  if (!dump_graph_path.empty()) {
    write_output(dump_graph_path, result.subgraph.to_json().dump(2) + "\n");
  }
  write_output(out_path, saw::result_envelope(result, config.mode).dump(2) + "\n");
  return 0;
}

int cmd_evaluate(const CompressionFlags& flags, const std::string& in_path,
                 const std::string& out_path, const std::string& summary_path,
                 const std::string& model_url, int workers, int repeats) {
  saw::BenchmarkOptions options;
  options.config = flags.config();
  options.extractor = flags.make_extractor();
  options.model_url = model_url;
  options.workers = workers;
  options.repeats = repeats;

  const saw::Encoder enc = flags.make_encoder();
  const saw::RunResult result = saw::run_benchmark(in_path, options, enc);

  write_output(out_path, result.tsv());
  if (!summary_path.empty()) {
    write_output(summary_path, result.summary().dump(2) + "\n");
  }
  if (result.failure_rate_exceeded()) {
    std::cerr << "error: " << result.failures.size() << " of " << result.total_records
              << " records failed\n";
    return 1;
  }
  return 0;
}

int cmd_augment(const std::string& in_path, int shots, const std::string& out_path,
                const std::string& tokenizer) {
  const std::string text = read_input(in_path);
  std::vector<saw::DatasetRecord> out;
  int line_no = 0;
  for (const auto& line : saw::split_lines(text)) {
    ++line_no;
    if (saw::trim(line).empty()) continue;
    const nlohmann::json j =
        parse_json(line, "demos line " + std::to_string(line_no));
    if (!j.contains("id") || !j["id"].is_string() || !j.contains("demos") ||
        !j["demos"].is_array()) {
      throw saw::input_error("demos line " + std::to_string(line_no) +
                             " needs string \"id\" and array \"demos\"");
    }
    std::vector<std::string> demos;
    for (const auto& d : j["demos"]) demos.push_back(d.get<std::string>());

    saw::DatasetRecord rec;
    rec.id = j["id"].get<std::string>();
    rec.prompt = saw::build_gsm8k_aug(
        demos, shots, j.value("instruction", ""), j.value("question", ""), tokenizer);
    rec.gold_answer = j.value("gold_answer", "");
    rec.metadata["shots"] = std::to_string(shots);
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw saw::input_error("no demo records in " + in_path);

  std::string payload;
  for (const auto& r : out) payload += r.to_json().dump() + "\n";
  write_output(out_path, payload);
  return 0;
}

int cmd_filter(const std::string& questions_path, const std::string& answers_path,
               const std::string& label_str, const std::string& out_path,
               const std::string& tokenizer) {
  const auto records = saw::load_records_jsonl(questions_path, tokenizer);
  const nlohmann::json aj = parse_json(read_input(answers_path), "answer matrix");
  if (!aj.is_array()) {
    throw saw::input_error("answer matrix must be a JSON array of arrays");
  }
  std::vector<std::vector<int>> matrix;
  size_t width = 0;
  for (const auto& row : aj) {
    if (!row.is_array()) {
      throw saw::input_error("answer matrix must be a JSON array of arrays");
    }
    std::vector<int> r;
    for (const auto& v : row) r.push_back(v.get<int>());
    if (width == 0) width = r.size();
    matrix.push_back(std::move(r));
  }
  if (width == 0) throw saw::input_error("answer matrix is empty");

  const saw::SetLabel label =
      label_str == "hard" ? saw::SetLabel::hard : saw::SetLabel::easy;
  const auto kept = saw::filter_questions(records, label, width, matrix);

  std::string payload;
  for (const auto& r : kept) payload += r.to_json().dump() + "\n";
  write_output(out_path, payload);
  return 0;
}

int cmd_cost(long length, double rate, double graph_cost) {
  if (length <= 0) throw saw::config_error("--length must be positive");
  if (!(rate > 0.0 && rate <= 1.0)) throw saw::config_error("--rate must be in (0, 1]");
  if (graph_cost < 0.0) throw saw::config_error("--graph-cost must be >= 0");

  const double cost = saw::cost_model(length, rate, graph_cost);
  char cost_str[64];
  std::snprintf(cost_str, sizeof(cost_str), "%.4g", cost);
  char savings_str[64];
  std::snprintf(savings_str, sizeof(savings_str), "%.2f", 1.0 / cost);
  std::printf("%s \xC3\x97 L\xC2\xB7""c_LLM (\xE2\x89\x88%s\xC3\x97 savings)\n",
              cost_str, savings_str);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based prompt compression toolkit"};
  app.require_subcommand(1);

  // compress
  auto* compress = app.add_subcommand("compress", "Compress one prompt JSON file");
  CompressionFlags compress_flags;
  compress_flags.add_to(compress);
  std::string compress_in = "-";
  std::string compress_out = "-";
  std::string compress_question;
  std::string compress_dump_graph;
  compress->add_option("--in", compress_in, "Prompt JSON path, - for stdin")
      ->capture_default_str();
  compress->add_option("--out", compress_out, "Envelope JSON path, - for stdout")
      ->capture_default_str();
  compress->add_option("--question", compress_question,
                       "Question text, overriding the prompt file");
  compress->add_option("--dump-graph", compress_dump_graph,
                       "Also write the selected subgraph as graph JSON");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Run the benchmark over a JSONL dataset");
  CompressionFlags evaluate_flags;
  evaluate_flags.add_to(evaluate);
  std::string evaluate_in;
  std::string evaluate_out = "-";
  std::string evaluate_summary;
  std::string evaluate_model_url;
  int evaluate_workers = 1;
  int evaluate_repeats = 1;
  evaluate->add_option("--in", evaluate_in, "Dataset JSONL path")->required();
  evaluate->add_option("--out", evaluate_out, "Results TSV path, - for stdout")
      ->capture_default_str();
  evaluate->add_option("--summary", evaluate_summary, "JSON summary path");
  evaluate->add_option("--model-url", evaluate_model_url,
                       "Completion endpoint; absent means offline metrics only")
      ->envname("SAW_MODEL_URL");
  evaluate->add_option("--workers", evaluate_workers, "Parallel record workers")
      ->capture_default_str();
  evaluate->add_option("--repeats", evaluate_repeats, "Model calls per record, averaged")
      ->capture_default_str();

  // augment
  auto* augment = app.add_subcommand("augment", "Build i-shot prompts from demo lines");
  std::string augment_in;
  std::string augment_out = "-";
  std::string augment_tokenizer = "whitespace";
  int augment_shots = 0;
  augment->add_option("--in", augment_in, "Demos JSONL path")->required();
  augment->add_option("--shots", augment_shots, "Demonstrations per prompt: 1, 2, 4, or 8")
      ->required();
  augment->add_option("--out", augment_out, "Dataset JSONL path, - for stdout")
      ->capture_default_str();
  augment->add_option("--tokenizer", augment_tokenizer, "Registered tokenizer")
      ->capture_default_str();

  // filter
  auto* filter = app.add_subcommand("filter", "Keep hard or easy benchmark questions");
  std::string filter_questions_path;
  std::string filter_answers_path;
  std::string filter_label;
  std::string filter_out = "-";
  std::string filter_tokenizer = "whitespace";
  filter->add_option("--questions", filter_questions_path, "Questions JSONL path")
      ->required();
  filter->add_option("--answers", filter_answers_path,
                     "JSON 0/1 matrix: rows per question, columns per prompt")
      ->required();
  filter->add_option("--label", filter_label, "hard or easy")
      ->required()
      ->check(CLI::IsMember({"hard", "easy"}));
  filter->add_option("--out", filter_out, "Filtered JSONL path, - for stdout")
      ->capture_default_str();
  filter->add_option("--tokenizer", filter_tokenizer, "Registered tokenizer")
      ->capture_default_str();

  // cost
  auto* cost = app.add_subcommand("cost", "Relative cost of compress-then-query");
  long cost_length = 0;
  double cost_rate = 0.7;
  double cost_graph = 0.0017;
  cost->add_option("--length", cost_length, "Original prompt length in tokens")
      ->required();
  cost->add_option("--rate", cost_rate, "Target compression rate, in (0, 1]")
      ->capture_default_str();
  cost->add_option("--graph-cost", cost_graph,
                   "Graph construction cost as a fraction of a full query")
      ->capture_default_str();

  try {
    app.parse(argc, argv);

    if (app.got_subcommand(compress)) {
      return cmd_compress(compress_flags, compress_in, compress_out, compress_question,
                          compress_dump_graph);
    }
    if (app.got_subcommand(evaluate)) {
      return cmd_evaluate(evaluate_flags, evaluate_in, evaluate_out, evaluate_summary,
                          evaluate_model_url, evaluate_workers, evaluate_repeats);
    }
    if (app.got_subcommand(augment)) {
      return cmd_augment(augment_in, augment_shots, augment_out, augment_tokenizer);
    }
    if (app.got_subcommand(filter)) {
      return cmd_filter(filter_questions_path, filter_answers_path, filter_label,
                        filter_out, filter_tokenizer);
    }
    if (app.got_subcommand(cost)) {
      return cmd_cost(cost_length, cost_rate, cost_graph);
    }
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help exits clean; flag misuse is a config error
  } catch (const saw::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
