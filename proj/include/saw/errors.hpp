#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace saw {

// Error taxonomy used across the library. The CLI maps kinds to exit codes:
// config -> 2, transport -> 4, everything else that is a saw::Error -> 3.
enum class ErrorKind {
  config,            // bad flag/option values, unusable configuration
  input,             // malformed or insufficient caller data
  domain,            // argument outside the mathematical domain of an operation
  transport,         // HTTP failures: connect, status, malformed wire payload
  extraction_empty,  // no information element could be extracted
  empty_output,      // an operation that must produce text got an empty graph
  degenerate_input,  // adaptive scoring cannot proceed (gap undefined)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& m) { return Error(ErrorKind::config, m); }
inline Error input_error(const std::string& m) { return Error(ErrorKind::input, m); }
inline Error domain_error(const std::string& m) { return Error(ErrorKind::domain, m); }
inline Error transport_error(const std::string& m) { return Error(ErrorKind::transport, m); }
inline Error extraction_empty_error(const std::string& m) {
  return Error(ErrorKind::extraction_empty, m);
}
inline Error empty_output_error(const std::string& m) {
  return Error(ErrorKind::empty_output, m);
}
inline Error degenerate_input_error(const std::string& m) {
  return Error(ErrorKind::degenerate_input, m);
}

// Rethrows saw::Error with a stage prefix so pipeline failures name the stage
// that produced them ("rank: ...", "extract: ...").
template <typename F>
auto with_stage(const char* stage, F&& f) -> decltype(std::forward<F>(f)()) {
  try {
    return std::forward<F>(f)();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + ": " + e.what());
  }
}

}  // namespace saw
