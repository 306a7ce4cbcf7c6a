#include "saw/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "saw/errors.hpp"
#include "saw/http_client.hpp"
#include "saw/text.hpp"

namespace saw {

Embedding Embedding::normalized(std::vector<double> values) {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  if (sq <= 0.0) throw domain_error("cannot normalize a zero-norm embedding");
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : values) v *= inv;
  Embedding e;
  e.values_ = std::move(values);
  return e;
}

double similarity(const Embedding& a, const Embedding& b) {
  if (a.dimension() != b.dimension()) {
    throw domain_error("similarity: embedding dimensions differ (" +
                       std::to_string(a.dimension()) + " vs " +
                       std::to_string(b.dimension()) + ")");
  }
  double dot = 0.0;
  for (int i = 0; i < a.dimension(); ++i) dot += a.values()[i] * b.values()[i];
  return dot;
}

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Encoder::Impl {
  EncoderKind kind = EncoderKind::hashed_offline;
  int dimension = kDefaultHashedDim;
  std::string endpoint;
  int batch_size = 16;
  double timeout_seconds = 30.0;
  int retries = 0;
  bool cache_enabled = true;

  std::mutex cache_mu;
  std::unordered_map<std::string, Embedding> cache;

  Embedding hashed_encode(const std::string& text) const {
    const auto tokens = split_whitespace(text);
    if (tokens.empty()) throw input_error("cannot encode empty text");
    std::vector<double> counts(static_cast<size_t>(dimension), 0.0);
    for (const auto& tok : tokens) {
      const uint64_t h = fnv1a64(to_lower_ascii(tok));
      counts[h % static_cast<uint64_t>(dimension)] += 1.0;
    }
    return Embedding::normalized(std::move(counts));
  }

  std::vector<Embedding> remote_encode(const std::vector<std::string>& texts) const {
    HttpJsonClient client{endpoint, timeout_seconds, retries};
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (size_t start = 0; start < texts.size(); start += batch_size) {
      const size_t end = std::min(texts.size(), start + batch_size);
      nlohmann::json input = nlohmann::json::array();
      for (size_t i = start; i < end; ++i) input.push_back(texts[i]);
      const nlohmann::json res = client.post_json({{"input", input}});
      if (!res.is_object() || !res.contains("embeddings") ||
          !res["embeddings"].is_array() || res["embeddings"].size() != end - start) {
        throw transport_error("encoder endpoint returned a malformed embeddings batch");
      }
      for (const auto& vec : res["embeddings"]) {
        if (!vec.is_array() || static_cast<int>(vec.size()) != dimension) {
          throw transport_error("encoder endpoint embedding dimension mismatch");
        }
        std::vector<double> values;
        values.reserve(vec.size());
        for (const auto& x : vec) values.push_back(x.get<double>());
        try {
          out.push_back(Embedding::normalized(std::move(values)));
        } catch (const Error&) {
          throw transport_error("encoder endpoint returned a zero-norm embedding");
        }
      }
    }
    return out;
  }
};

Encoder Encoder::hashed_offline(int dimension) {
  if (dimension <= 0) throw config_error("encoder dimension must be positive");
  Encoder e;
  e.impl_ = std::make_shared<Impl>();
  e.impl_->kind = EncoderKind::hashed_offline;
  e.impl_->dimension = dimension;
  return e;
}

Encoder Encoder::http_remote(std::string endpoint_url, int dimension, int batch_size,
                             double timeout_seconds, int retries) {
  if (dimension <= 0) throw config_error("encoder dimension must be positive");
  if (batch_size <= 0) throw config_error("encoder batch size must be positive");
  if (trim(endpoint_url).empty()) throw config_error("encoder endpoint URL is empty");
  Encoder e;
  e.impl_ = std::make_shared<Impl>();
  e.impl_->kind = EncoderKind::http_remote;
  e.impl_->dimension = dimension;
  e.impl_->endpoint = std::move(endpoint_url);
  e.impl_->batch_size = batch_size;
  e.impl_->timeout_seconds = timeout_seconds;
  e.impl_->retries = retries;
  return e;
}

Embedding Encoder::encode(const std::string& text) const {
  return encode_batch({text}).front();
}

std::vector<Embedding> Encoder::encode_batch(const std::vector<std::string>& texts) const {
  for (const auto& t : texts) {
    if (trim(t).empty()) throw input_error("cannot encode empty text");
  }

  std::vector<Embedding> out(texts.size());
  std::vector<size_t> miss_positions;
  std::vector<std::string> miss_texts;

  if (impl_->cache_enabled) {
    std::lock_guard lock(impl_->cache_mu);
    for (size_t i = 0; i < texts.size(); ++i) {
      auto it = impl_->cache.find(texts[i]);
      if (it != impl_->cache.end()) {
        out[i] = it->second;
      } else {
        miss_positions.push_back(i);
        miss_texts.push_back(texts[i]);
      }
    }
  } else {
    for (size_t i = 0; i < texts.size(); ++i) {
      miss_positions.push_back(i);
      miss_texts.push_back(texts[i]);
    }
  }

  if (miss_texts.empty()) return out;

  std::vector<Embedding> fresh;
  if (impl_->kind == EncoderKind::hashed_offline) {
    fresh.reserve(miss_texts.size());
    for (const auto& t : miss_texts) fresh.push_back(impl_->hashed_encode(t));
  } else {
    fresh = impl_->remote_encode(miss_texts);
  }

  if (impl_->cache_enabled) {
    // Last writer wins; both backends are deterministic per text, so
    // concurrent fills insert identical vectors.
    std::lock_guard lock(impl_->cache_mu);
    for (size_t k = 0; k < miss_texts.size(); ++k) {
      impl_->cache[miss_texts[k]] = fresh[k];
    }
  }
  for (size_t k = 0; k < miss_positions.size(); ++k) {
    out[miss_positions[k]] = std::move(fresh[k]);
  }
  return out;
}

EncoderKind Encoder::kind() const { return impl_->kind; }

int Encoder::dimension() const { return impl_->dimension; }

void Encoder::set_cache_enabled(bool enabled) { impl_->cache_enabled = enabled; }

}  // namespace saw
