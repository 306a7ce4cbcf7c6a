#include "saw/tokenizer.hpp"

#include <map>
#include <mutex>
#include <shared_mutex>

#include "saw/errors.hpp"
#include "saw/text.hpp"

namespace saw {

struct TokenizerRegistry::Impl {
  mutable std::shared_mutex mu;
  std::map<std::string, TokenizerFn> fns;
};

TokenizerRegistry::TokenizerRegistry() : impl_(new Impl) {
  impl_->fns[kDefaultTokenizer] = [](std::string_view text) {
    return split_whitespace(text);
  };
}

TokenizerRegistry& TokenizerRegistry::instance() {
  static TokenizerRegistry reg;
  return reg;
}

void TokenizerRegistry::register_tokenizer(const std::string& name, TokenizerFn fn) {
  std::unique_lock lock(impl_->mu);
  if (impl_->fns.count(name)) {
    throw config_error("tokenizer already registered: " + name);
  }
  impl_->fns[name] = std::move(fn);
}

bool TokenizerRegistry::has(const std::string& name) const {
  std::shared_lock lock(impl_->mu);
  return impl_->fns.count(name) > 0;
}

const TokenizerFn& TokenizerRegistry::get(const std::string& name) const {
  std::shared_lock lock(impl_->mu);
  auto it = impl_->fns.find(name);
  if (it == impl_->fns.end()) {
    throw config_error("unknown tokenizer: " + name);
  }
  return it->second;
}

TokenList tokenize(std::string_view text, const std::string& tokenizer_id) {
  return TokenizerRegistry::instance().get(tokenizer_id)(text);
}

int count_tokens(std::string_view text, const std::string& tokenizer_id) {
  return static_cast<int>(tokenize(text, tokenizer_id).size());
}

}  // namespace saw
