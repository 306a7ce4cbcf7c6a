#include "saw/http_client.hpp"

#include <chrono>
#include <cmath>

#include "httplib.h"
#include "saw/errors.hpp"

namespace saw {

namespace {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // leading '/', "/" if absent
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw config_error("endpoint URL needs a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

nlohmann::json HttpJsonClient::post_json(const nlohmann::json& body) const {
  const SplitUrl split = split_url(url);
  const std::string payload = body.dump();
  const int attempts = retries + 1;
  std::string last_failure = "no attempt made";

  for (int attempt = 1; attempt <= attempts; ++attempt) {
    httplib::Client client(split.base);
    const auto timeout = std::chrono::microseconds(
        static_cast<long long>(std::llround(timeout_seconds * 1e6)));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    auto res = client.Post(split.path, payload, "application/json");
    if (!res) {
      last_failure = "connection error (" + httplib::to_string(res.error()) + ")";
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_failure = "HTTP status " + std::to_string(res->status);
      continue;
    }
    nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
      // A 200 with a garbage body is a protocol violation; retrying won't fix it.
      throw transport_error("POST " + url + ": unparseable JSON response after " +
                            std::to_string(attempt) + " attempt(s)");
    }
    return parsed;
  }

  throw transport_error("POST " + url + " failed after " + std::to_string(attempts) +
                        " attempt(s): " + last_failure);
}

}  // namespace saw
