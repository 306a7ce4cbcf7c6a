#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace saw {

inline constexpr int kDefaultHashedDim = 256;

// Unit-norm dense vector (L2 norm 1 within 1e-9, enforced at construction).
class Embedding {
 public:
  Embedding() = default;

  // Normalizes `values` to unit norm. Zero-norm input -> domain error.
  static Embedding normalized(std::vector<double> values);

  int dimension() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

// Cosine similarity; embeddings are unit norm so this is the dot product.
// Dimension mismatch -> domain error.
double similarity(const Embedding& a, const Embedding& b);

// FNV-1a 64-bit over the bytes of `s`.
uint64_t fnv1a64(std::string_view s);

enum class EncoderKind { hashed_offline, http_remote };

// Text encoder with a process-wide-shareable, thread-safe memo cache keyed by
// exact input text. Copies share the cache. Two backends:
//
//  hashed_offline: deterministic bag-of-words. The text is whitespace-split,
//  each token is ASCII-lowercased and FNV-1a-hashed into one of `dimension`
//  buckets, and the bucket counts are L2-normalized. No I/O, stable across
//  platforms.
//
//  http_remote: POST {"input": [str, ...]} to the endpoint, expecting
//  {"embeddings": [[float, ...], ...]} in request order. Vectors are
//  re-normalized locally. Batches of at most `batch_size` per request.
class Encoder {
 public:
  static Encoder hashed_offline(int dimension = kDefaultHashedDim);
  static Encoder http_remote(std::string endpoint_url, int dimension,
                             int batch_size = 16, double timeout_seconds = 30.0,
                             int retries = 0);

  // Empty (after trimming) text -> input error.
  Embedding encode(const std::string& text) const;
  std::vector<Embedding> encode_batch(const std::vector<std::string>& texts) const;

  EncoderKind kind() const;
  int dimension() const;

  // Cache toggle for checking transparency; results never depend on it.
  void set_cache_enabled(bool enabled);

 private:
  Encoder() = default;
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace saw
