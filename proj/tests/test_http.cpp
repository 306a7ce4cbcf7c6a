#include "doctest.h"

#include <atomic>
#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "saw/bench.hpp"
#include "saw/embedding.hpp"
#include "saw/errors.hpp"
#include "saw/extraction.hpp"
#include "saw/http_client.hpp"
#include "test_support.hpp"

using namespace saw;
using nlohmann::json;

namespace {

// One localhost server per test, torn down on scope exit.
struct LocalServer {
  httplib::Server server;
  std::thread runner;
  int port = 0;

  explicit LocalServer(std::function<void(httplib::Server&)> setup) {
    setup(server);
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    runner = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port) + path;
  }

  ~LocalServer() {
    server.stop();
    if (runner.joinable()) runner.join();
  }
};

// Unit vector along one axis, as a JSON array.
json axis_vector(int dimension, int axis, double scale = 1.0) {
  json v = json::array();
  for (int i = 0; i < dimension; ++i) v.push_back(i == axis ? scale : 0.0);
  return v;
}

}  // namespace

TEST_CASE("remote encoder batches requests and keeps input order") {
  std::vector<size_t> batch_sizes;
  std::vector<std::string> seen_inputs;

  LocalServer srv([&](httplib::Server& s) {
    s.Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
      const json body = json::parse(req.body);
      REQUIRE(body.contains("input"));
      batch_sizes.push_back(body["input"].size());
      json embeddings = json::array();
      for (const auto& text : body["input"]) {
        seen_inputs.push_back(text.get<std::string>());
        // axis = index of the text's trailing digit; scale 2 checks
        // re-normalization on the client side
        const int axis = text.get<std::string>().back() - '0';
        embeddings.push_back(axis_vector(4, axis, 2.0));
      }
      res.set_content(json{{"embeddings", embeddings}}.dump(), "application/json");
    });
  });

  const Encoder enc = Encoder::http_remote(srv.url("/embed"), 4, 2);
  const auto got = enc.encode_batch({"text 0", "text 1", "text 2", "text 3", "text 1"});

  REQUIRE(got.size() == 5);
  // batch size 2 over 4 cache misses: 2 + 2 ("text 1" repeats, cached either
  // within the call or served from the shared cache)
  for (size_t b : batch_sizes) CHECK(b <= 2);
  CHECK(seen_inputs.size() <= 5);

  // order and values: each embedding is the renormalized unit axis
  for (size_t i = 0; i < got.size(); ++i) {
    const int axis = i == 4 ? 1 : static_cast<int>(i);
    for (int d = 0; d < 4; ++d) {
      CHECK(got[i].values()[d] == doctest::Approx(d == axis ? 1.0 : 0.0));
    }
  }
  CHECK(similarity(got[1], got[4]) == doctest::Approx(1.0));
}

TEST_CASE("remote encoder turns malformed responses into transport errors") {
  LocalServer srv([&](httplib::Server& s) {
    s.Post("/short", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(json{{"embeddings", json::array()}}.dump(), "application/json");
    });
    s.Post("/narrow", [](const httplib::Request& req, httplib::Response& res) {
      const json body = json::parse(req.body);
      json embeddings = json::array();
      for (size_t i = 0; i < body["input"].size(); ++i) {
        embeddings.push_back(json::array({1.0, 0.0}));  // dimension 2, not 4
      }
      res.set_content(json{{"embeddings", embeddings}}.dump(), "application/json");
    });
    s.Post("/zero", [](const httplib::Request& req, httplib::Response& res) {
      const json body = json::parse(req.body);
      json embeddings = json::array();
      for (size_t i = 0; i < body["input"].size(); ++i) {
        embeddings.push_back(axis_vector(4, 0, 0.0));
      }
      res.set_content(json{{"embeddings", embeddings}}.dump(), "application/json");
    });
  });

  auto kind_of = [](const Encoder& enc, const std::string& text) {
    try {
      enc.encode(text);
      return ErrorKind::config;  // anything but transport; encode must throw
    } catch (const Error& e) {
      return e.kind();
    }
  };

  CHECK(kind_of(Encoder::http_remote(srv.url("/short"), 4), "a") ==
        ErrorKind::transport);
  CHECK(kind_of(Encoder::http_remote(srv.url("/narrow"), 4), "b") ==
        ErrorKind::transport);
  CHECK(kind_of(Encoder::http_remote(srv.url("/zero"), 4), "c") ==
        ErrorKind::transport);
}

TEST_CASE("http client retries failing endpoints and reports the attempt count") {
  std::atomic<int> hits{0};
  LocalServer srv([&](httplib::Server& s) {
    s.Post("/flaky", [&](const httplib::Request&, httplib::Response& res) {
      ++hits;
      res.status = 500;
    });
  });

  HttpJsonClient client{srv.url("/flaky"), 5.0, 2};
  try {
    client.post_json({{"input", json::array({"x"})}});
    FAIL("expected a transport error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::transport);
    CHECK(std::string(e.what()).find("3 attempt(s)") != std::string::npos);
    CHECK(std::string(e.what()).find("500") != std::string::npos);
  }
  CHECK(hits.load() == 3);

  // a 200 with a garbage body is not retried
  std::atomic<int> garbage_hits{0};
  LocalServer srv2([&](httplib::Server& s) {
    s.Post("/garbage", [&](const httplib::Request&, httplib::Response& res) {
      ++garbage_hits;
      res.set_content("not json {", "text/plain");
    });
  });
  HttpJsonClient client2{srv2.url("/garbage"), 5.0, 2};
  CHECK_THROWS_AS(client2.post_json(json::object()), Error);
  CHECK(garbage_hits.load() == 1);
}

TEST_CASE("http client recovers when a retry succeeds") {
  std::atomic<int> hits{0};
  LocalServer srv([&](httplib::Server& s) {
    s.Post("/eventually", [&](const httplib::Request&, httplib::Response& res) {
      if (++hits < 3) {
        res.status = 503;
      } else {
        res.set_content(json{{"ok", true}}.dump(), "application/json");
      }
    });
  });

  HttpJsonClient client{srv.url("/eventually"), 5.0, 2};
  const json res = client.post_json(json::object());
  CHECK(res["ok"] == true);
  CHECK(hits.load() == 3);
}

TEST_CASE("template extractor sends the filled template and parses triplet lines") {
  std::string seen_prompt;
  int seen_max_tokens = 0;
  double seen_temperature = -1.0;

  LocalServer srv([&](httplib::Server& s) {
    s.Post("/extract", [&](const httplib::Request& req, httplib::Response& res) {
      const json body = json::parse(req.body);
      seen_prompt = body["prompt"].get<std::string>();
      seen_max_tokens = body["max_tokens"].get<int>();
      seen_temperature = body["temperature"].get<double>();
      res.set_content(json{{"text",
                            "<Mars; has; two moons>\n"
                            "<Phobos; orbits; Mars>\n"
                            "noise line without separators\n"}}
                          .dump(),
                      "application/json");
    });
  });

  const Prompt prompt =
      Prompt::make("", "Mars has two moons. Phobos orbits Mars.", "How many moons?");
  ExtractionBackend backend;
  backend.kind = ExtractorKind::llm_template;
  backend.endpoint_url = srv.url("/extract");

  const PromptGraph graph = extract_graph(prompt, backend);
  REQUIRE(graph.size() == 2);
  CHECK(graph[0].subject() == "Mars");
  CHECK(graph[0].relation() == "has");
  CHECK(graph[0].object() == "two moons");
  CHECK(graph[1].source_index() == 1);

  // wire contract: fixed decoding parameters and the framed template
  CHECK(seen_max_tokens == 400);
  CHECK(seen_temperature == 0.0);
  CHECK(seen_prompt.rfind("Example:\nInput:\n", 0) == 0);
  CHECK(seen_prompt.find("Mars has two moons. Phobos orbits Mars.") !=
        std::string::npos);
  CHECK(seen_prompt == build_extraction_prompt(prompt.information()));
}

TEST_CASE("template extractor failure modes map to the right error kinds") {
  LocalServer srv([&](httplib::Server& s) {
    s.Post("/no-text", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(json{{"output", "wrong key"}}.dump(), "application/json");
    });
    s.Post("/no-triplets", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(json{{"text", "nothing useful\nat all"}}.dump(),
                      "application/json");
    });
  });

  const Prompt prompt = Prompt::make("", "Mars has two moons.", "");
  ExtractionBackend backend;
  backend.kind = ExtractorKind::llm_template;

  backend.endpoint_url = srv.url("/no-text");
  try {
    extract_graph(prompt, backend);
    FAIL("expected a transport error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::transport);
  }

  backend.endpoint_url = srv.url("/no-triplets");
  try {
    extract_graph(prompt, backend);
    FAIL("expected an extraction-empty error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::extraction_empty);
  }
}

TEST_CASE("benchmark fills the answer metrics from a model endpoint") {
  std::atomic<int> model_hits{0};
  std::atomic<bool> saw_nonzero_temperature{false};
  LocalServer srv([&](httplib::Server& s) {
    s.Post("/model", [&](const httplib::Request& req, httplib::Response& res) {
      ++model_hits;
      const json body = json::parse(req.body);
      if (body["temperature"].get<double>() != 0.0) saw_nonzero_temperature = true;
      // answer depends on the compressed prompt so EM differs per record
      const std::string prompt = body["prompt"].get<std::string>();
      const std::string answer =
          prompt.find("Phobos") != std::string::npos ? "two moons" : "rings";
      res.set_content(json{{"text", answer}}.dump(), "application/json");
    });
  });

  std::vector<DatasetRecord> records(2);
  records[0].id = "moons";
  records[0].prompt = Prompt::make("Answer briefly.", "Phobos orbits Mars. Mars has two moons.",
                                   "How many moons does Mars have?");
  records[0].gold_answer = "two moons";
  records[1].id = "rings";
  records[1].prompt = Prompt::make("Answer briefly.", "Saturn has rings. The probe sent data.",
                                   "What does Saturn have?");
  records[1].gold_answer = "icy rings";

  const std::string path = testsupport::temp_path("model_bench.jsonl");
  write_records_jsonl(path, records);

  BenchmarkOptions options;
  options.model_url = srv.url("/model");
  options.repeats = 2;
  const RunResult run = run_benchmark(path, options, Encoder::hashed_offline());

  REQUIRE(run.failures.empty());
  REQUIRE(run.rows.size() == 2);
  CHECK(model_hits.load() == 4);  // 2 records x 2 repeats
  CHECK_FALSE(saw_nonzero_temperature.load());

  // record 0: prediction matches gold exactly
  REQUIRE(run.rows[0].em.has_value());
  CHECK(*run.rows[0].em == doctest::Approx(1.0));
  CHECK(*run.rows[0].sacc == doctest::Approx(1.0));
  CHECK(*run.rows[0].rouge1 == doctest::Approx(1.0));

  // record 1: "rings" is inside "icy rings" for rouge recall but not EM/SAcc
  CHECK(*run.rows[1].em == doctest::Approx(0.0));
  CHECK(*run.rows[1].sacc == doctest::Approx(0.0));  // gold is not inside prediction
  CHECK(*run.rows[1].rouge1 == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

  const auto j = run.summary();
  CHECK(j["mean_em"].get<double>() == doctest::Approx(0.5));

  // the TSV now has populated answer-metric cells
  const std::string tsv = run.tsv();
  CHECK(tsv.find("\t1.0000\t1.0000\t1.0000") != std::string::npos);
}

TEST_CASE("concurrent encodes through the shared cache stay consistent") {
  std::atomic<int> requests{0};
  LocalServer srv([&](httplib::Server& s) {
    s.Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      const json body = json::parse(req.body);
      json embeddings = json::array();
      for (const auto& text : body["input"]) {
        const int axis =
            static_cast<int>(text.get<std::string>().size()) % 8;
        embeddings.push_back(axis_vector(8, axis));
      }
      res.set_content(json{{"embeddings", embeddings}}.dump(), "application/json");
    });
  });

  const Encoder enc = Encoder::http_remote(srv.url("/embed"), 8);
  std::vector<std::thread> threads;
  std::vector<std::vector<Embedding>> results(4);
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      results[t] = enc.encode_batch({"alpha", "beta", "gamma ray", "alpha"});
    });
  }
  for (auto& t : threads) t.join();

  for (int t = 1; t < 4; ++t) {
    REQUIRE(results[t].size() == results[0].size());
    for (size_t i = 0; i < results[0].size(); ++i) {
      CHECK(similarity(results[t][i], results[0][i]) == doctest::Approx(1.0));
    }
  }
}
