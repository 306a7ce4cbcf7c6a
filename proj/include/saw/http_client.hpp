#pragma once

#include <string>

#include "json.hpp"

namespace saw {

// Minimal JSON-over-HTTP POST client. `url` is a full endpoint,
// e.g. "http://127.0.0.1:8080/embed". Non-2xx status, connection failures,
// and unparseable response bodies raise transport errors; connection and
// status failures are retried up to `retries` extra attempts and the error
// message carries the attempt count.
struct HttpJsonClient {
  std::string url;
  double timeout_seconds = 30.0;
  int retries = 0;

  nlohmann::json post_json(const nlohmann::json& body) const;
};

}  // namespace saw
