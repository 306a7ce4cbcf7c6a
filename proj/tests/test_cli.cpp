#include "doctest.h"

#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "test_support.hpp"

using nlohmann::json;
using testsupport::CliResult;
using testsupport::data_dir;
using testsupport::read_file;
using testsupport::run_cli;
using testsupport::temp_path;
using testsupport::write_file;

namespace {

int line_count(const std::string& text) {
  int n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("cli: --help exits cleanly and lists every subcommand") {
  const CliResult res = run_cli("--help");
  CHECK(res.exit_code == 0);
  for (const char* name : {"compress", "evaluate", "augment", "filter", "cost"}) {
    CHECK(res.out.find(name) != std::string::npos);
  }

  const CliResult sub = run_cli("compress --help");
  CHECK(sub.exit_code == 0);
  CHECK(sub.out.find("--target-rate") != std::string::npos);
  CHECK(sub.out.find("0.7") != std::string::npos);  // defaults are shown
}

TEST_CASE("cli: no or unknown subcommand is a usage error") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
}

TEST_CASE("cli: compress matches the committed golden envelope byte for byte") {
  const std::string golden_path = data_dir() + "/golden/sample_envelope.json";
  const std::string prompt_path = data_dir() + "/sample_prompt.json";

  const CliResult once = run_cli("compress --in '" + prompt_path + "'");
  REQUIRE(once.exit_code == 0);
  CHECK(once.out == read_file(golden_path));

  const CliResult twice = run_cli("compress --in '" + prompt_path + "'");
  CHECK(twice.out == once.out);
}

TEST_CASE("cli: compress reads stdin and honors --out") {
  const std::string prompt = read_file(data_dir() + "/sample_prompt.json");
  const std::string out_path = temp_path("envelope.json");
  const CliResult res = run_cli("compress --out '" + out_path + "'", prompt);
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.empty());

  const json envelope = json::parse(read_file(out_path));
  CHECK(envelope["mode"] == "task-agnostic");
  CHECK(envelope["rate"].get<double>() > 0.0);
  std::remove(out_path.c_str());
}

TEST_CASE("cli: compress --target-rate 1.0 keeps the whole graph") {
  const std::string prompt_path = data_dir() + "/sample_prompt.json";
  const CliResult res = run_cli("compress --target-rate 1.0 --in '" + prompt_path + "'");
  REQUIRE(res.exit_code == 0);
  const json envelope = json::parse(res.out);
  CHECK(envelope["rate"].get<double>() == doctest::Approx(1.0));
  CHECK(envelope["ratio"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("cli: compress --dump-graph writes the selected subgraph") {
  const std::string prompt_path = data_dir() + "/sample_prompt.json";
  const std::string graph_path = temp_path("subgraph.json");
  const CliResult res = run_cli("compress --in '" + prompt_path + "' --dump-graph '" +
                                graph_path + "' --out /dev/null");
  REQUIRE(res.exit_code == 0);

  const json graph = json::parse(read_file(graph_path));
  REQUIRE(graph.contains("elements"));
  CHECK(graph["elements"].size() >= 1);
  for (const auto& e : graph["elements"]) {
    CHECK(e.contains("s"));
    CHECK(e.contains("r"));
    CHECK(e.contains("o"));
    CHECK(e.contains("source_index"));
  }
  std::remove(graph_path.c_str());
}

TEST_CASE("cli: task-aware and adaptive modes populate the envelope accordingly") {
  const std::string prompt_path = data_dir() + "/sample_prompt.json";

  const CliResult aware =
      run_cli("compress --mode task-aware --in '" + prompt_path + "'");
  REQUIRE(aware.exit_code == 0);
  const json aj = json::parse(aware.out);
  CHECK(aj["mode"] == "task-aware");
  CHECK(aj["delta"].is_null());

  const CliResult adaptive =
      run_cli("compress --mode adaptive --in '" + prompt_path + "'");
  REQUIRE(adaptive.exit_code == 0);
  const json dj = json::parse(adaptive.out);
  CHECK(dj["mode"] == "adaptive");
  CHECK(dj["delta"].is_null());
}

TEST_CASE("cli: --question overrides the prompt file's question") {
  // the file has no question; task-aware mode only works via the override
  const std::string prompt_path = temp_path("noq.json");
  write_file(prompt_path,
             R"({"instruction":"Answer.","information":"Phobos orbits Mars. Venus has no natural moons."})");

  const CliResult bare = run_cli("compress --mode task-aware --in '" + prompt_path + "'");
  CHECK(bare.exit_code == 2);  // missing question is a configuration error

  const CliResult overridden = run_cli("compress --mode task-aware --question " +
                                       std::string("'What orbits Mars?' --in '") +
                                       prompt_path + "'");
  REQUIRE(overridden.exit_code == 0);
  const json envelope = json::parse(overridden.out);
  const std::string text = envelope["compressed_prompt"].get<std::string>();
  CHECK(text.find("What orbits Mars?") != std::string::npos);
  std::remove(prompt_path.c_str());
}

TEST_CASE("cli: adaptive mode without any question is an input error") {
  const std::string prompt_path = temp_path("noq2.json");
  write_file(prompt_path,
             R"({"instruction":"Answer.","information":"Phobos orbits Mars."})");
  const CliResult res = run_cli("compress --mode adaptive --in '" + prompt_path + "'");
  CHECK(res.exit_code == 3);
  CHECK(res.err.find("select:") != std::string::npos);
  std::remove(prompt_path.c_str());
}

TEST_CASE("cli: bad flag values and missing files map to documented exit codes") {
  const std::string prompt_path = data_dir() + "/sample_prompt.json";

  // flag constraint violations are configuration errors
  CHECK(run_cli("compress --target-rate 1.5 --in '" + prompt_path + "'").exit_code == 2);
  CHECK(run_cli("compress --target-rate 0 --in '" + prompt_path + "'").exit_code == 2);
  CHECK(run_cli("compress --gamma 1 --in '" + prompt_path + "'").exit_code == 2);
  CHECK(run_cli("compress --mode sideways --in '" + prompt_path + "'").exit_code == 2);
  CHECK(run_cli("compress --encoder http --in '" + prompt_path + "'").exit_code == 2);
  CHECK(run_cli("compress --extractor llm --in '" + prompt_path + "'").exit_code == 2);

  // missing or malformed data is an input error
  CHECK(run_cli("compress --in /nonexistent/path.json").exit_code == 3);
  CHECK(run_cli("compress", "this is not json").exit_code == 3);

  // unreachable endpoints are transport errors
  const CliResult transport = run_cli(
      "compress --encoder http --encoder-url http://127.0.0.1:1/none --in '" +
      prompt_path + "'");
  CHECK(transport.exit_code == 4);
}

TEST_CASE("cli: cost prints the worked savings lines byte for byte") {
  const CliResult paper = run_cli("cost --length 1000 --rate 0.2 --graph-cost 0.0017");
  REQUIRE(paper.exit_code == 0);
  CHECK(paper.out ==
        "0.2017 \xC3\x97 L\xC2\xB7""c_LLM (\xE2\x89\x88""4.96\xC3\x97 savings)\n");

  const CliResult small = run_cli("cost --length 50 --rate 0.2 --graph-cost 0.02");
  REQUIRE(small.exit_code == 0);
  CHECK(small.out ==
        "0.22 \xC3\x97 L\xC2\xB7""c_LLM (\xE2\x89\x88""4.55\xC3\x97 savings)\n");

  CHECK(run_cli("cost --rate 0.2").exit_code == 2);           // --length required
  CHECK(run_cli("cost --length 0").exit_code == 2);           // must be positive
  CHECK(run_cli("cost --length 10 --rate 2").exit_code == 2); // rate out of range
}

TEST_CASE("cli: augment builds i-shot records from the bundled demos") {
  const std::string demos_path = data_dir() + "/sample_demos.jsonl";
  const CliResult res = run_cli("augment --in '" + demos_path + "' --shots 2");
  REQUIRE(res.exit_code == 0);
  REQUIRE(line_count(res.out) == 2);

  std::istringstream lines(res.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  const json rec = json::parse(line);
  CHECK(rec["id"] == "sum-1");
  CHECK(rec["metadata"]["shots"] == "2");
  const std::string info = rec["prompt"]["information"].get<std::string>();
  CHECK(info.find("\n\n") != std::string::npos);     // demos joined by blank lines
  CHECK(info.find("12 + 15 = 27") != std::string::npos);
  CHECK(info.find("8 * 3 = 24") != std::string::npos);
  CHECK(info.find("40 - 16") == std::string::npos);  // third demo not in 2-shot
  CHECK(rec["prompt"]["question"] ==
        "Q: Lena planted 14 seeds in each of 3 rows. How many seeds did she plant?");
  CHECK(rec["gold_answer"] == "42");

  // the shot menu is closed and the demos must suffice
  CHECK(run_cli("augment --in '" + demos_path + "' --shots 3").exit_code == 2);
  CHECK(run_cli("augment --in '" + demos_path + "' --shots 8").exit_code == 0);

  const std::string short_path = temp_path("short_demos.jsonl");
  write_file(short_path, R"({"id":"x","demos":["only one"]})" "\n");
  CHECK(run_cli("augment --in '" + short_path + "' --shots 2").exit_code == 3);
  std::remove(short_path.c_str());

  CHECK(run_cli("augment --in '" + demos_path + "'").exit_code == 2);  // --shots required
}

TEST_CASE("cli: augmented records feed straight back into evaluate") {
  const std::string demos_path = data_dir() + "/sample_demos.jsonl";
  const std::string dataset = temp_path("aug_dataset.jsonl");
  REQUIRE(run_cli("augment --in '" + demos_path + "' --shots 2 --out '" + dataset +
                  "'").exit_code == 0);

  const CliResult res = run_cli("evaluate --in '" + dataset + "'");
  CHECK(res.exit_code == 0);
  CHECK(line_count(res.out) == 3);  // header + one row per record
  std::remove(dataset.c_str());
}

TEST_CASE("cli: filter keeps hard and easy question sets") {
  const std::string corpus = data_dir() + "/sample_corpus.jsonl";
  const std::string answers = temp_path("answers.json");
  // five questions, three prompts each; rows 0 and 3 are unanimous
  write_file(answers, "[[1,1,1],[1,0,1],[0,0,1],[0,0,0],[1,1,0]]");

  const CliResult hard = run_cli("filter --questions '" + corpus + "' --answers '" +
                                 answers + "' --label hard");
  REQUIRE(hard.exit_code == 0);
  CHECK(line_count(hard.out) == 4);  // the all-correct first row leaves
  CHECK(hard.out.find("moons-of-mars") == std::string::npos);
  CHECK(hard.out.find("largest-moon") != std::string::npos);

  const CliResult easy = run_cli("filter --questions '" + corpus + "' --answers '" +
                                 answers + "' --label easy");
  REQUIRE(easy.exit_code == 0);
  CHECK(line_count(easy.out) == 4);  // the all-wrong fourth row leaves
  CHECK(easy.out.find("largest-moon") == std::string::npos);
  CHECK(easy.out.find("moons-of-mars") != std::string::npos);

  // label is mandatory and closed; malformed matrices are input errors
  CHECK(run_cli("filter --questions '" + corpus + "' --answers '" + answers +
                "'").exit_code == 2);
  CHECK(run_cli("filter --questions '" + corpus + "' --answers '" + answers +
                "' --label tepid").exit_code == 2);

  const std::string bad = temp_path("bad_answers.json");
  write_file(bad, "{\"rows\":[]}");
  CHECK(run_cli("filter --questions '" + corpus + "' --answers '" + bad +
                "' --label hard").exit_code == 3);

  const std::string ragged = temp_path("ragged_answers.json");
  write_file(ragged, "[[1,1,1],[1],[0,0,1],[0,0,0],[1,1,0]]");
  CHECK(run_cli("filter --questions '" + corpus + "' --answers '" + ragged +
                "' --label hard").exit_code == 3);

  std::remove(answers.c_str());
  std::remove(bad.c_str());
  std::remove(ragged.c_str());
}

TEST_CASE("cli: evaluate writes a stable offline table and summary") {
  const std::string corpus = data_dir() + "/sample_corpus.jsonl";
  const std::string summary_path = temp_path("summary.json");

  const CliResult once =
      run_cli("evaluate --in '" + corpus + "' --summary '" + summary_path + "'");
  REQUIRE(once.exit_code == 0);
  REQUIRE(line_count(once.out) == 6);  // header + five records
  CHECK(once.out.rfind("id\tmode\torig_tokens\tcomp_tokens\trate\tratio\tem\tsacc\t"
                       "rouge1\trouge2\trougeL\tfl\n",
                       0) == 0);

  const json summary = json::parse(read_file(summary_path));
  CHECK(summary["records"] == 5);
  CHECK(summary["evaluated"] == 5);
  CHECK(summary["failed"] == 0);
  CHECK(summary["mean_em"].is_null());  // offline run
  CHECK(summary["mean_rate"].get<double>() > 0.0);
  CHECK(summary["failures"].empty());

  const CliResult again = run_cli("evaluate --in '" + corpus + "'");
  CHECK(again.out == once.out);

  const CliResult threaded = run_cli("evaluate --workers 4 --in '" + corpus + "'");
  CHECK(threaded.out == once.out);

  std::remove(summary_path.c_str());
}

TEST_CASE("cli: evaluate fails loudly when too many records fail") {
  const std::string dataset = temp_path("mostly_bad.jsonl");
  write_file(dataset,
             R"({"id":"ok","prompt":{"information":"Phobos orbits Mars. Venus has no moons."}})"
             "\n"
             R"({"id":"bad1","prompt":{"information":""}})"
             "\n"
             R"({"id":"bad2","prompt":{"information":"Nouns only here."}})"
             "\n");

  const CliResult res = run_cli("evaluate --in '" + dataset + "'");
  CHECK(res.exit_code == 1);
  CHECK(res.err.find("2 of 3") != std::string::npos);
  // the table still carries the record that worked
  CHECK(res.out.find("ok\t") != std::string::npos);
  std::remove(dataset.c_str());
}
