#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace saw {

using TokenList = std::vector<std::string>;
using TokenizerFn = std::function<TokenList(std::string_view)>;

inline constexpr const char* kDefaultTokenizer = "whitespace";

// Process-wide tokenizer registry. "whitespace" is pre-registered and is the
// default everywhere a tokenizer id is accepted. Registration is expected at
// startup; lookups are safe from multiple threads.
class TokenizerRegistry {
 public:
  static TokenizerRegistry& instance();

  // Throws config error if the name is already taken.
  void register_tokenizer(const std::string& name, TokenizerFn fn);

  bool has(const std::string& name) const;

  // Throws config error for an unknown name.
  const TokenizerFn& get(const std::string& name) const;

 private:
  TokenizerRegistry();

  struct Impl;
  Impl* impl_;
};

// Tokenizes with a registered tokenizer. Empty text yields an empty list.
// Unknown tokenizer id -> config error.
TokenList tokenize(std::string_view text, const std::string& tokenizer_id = kDefaultTokenizer);

int count_tokens(std::string_view text, const std::string& tokenizer_id = kDefaultTokenizer);

}  // namespace saw
