#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace anycap {

using Embedding = std::vector<double>;

enum class EmbedKind { kToken, kText, kImage };
std::string_view embed_kind_name(EmbedKind kind);

/// Source of unit-norm embeddings. Implementations must be deterministic for
/// the lifetime of a session and safe to call from several threads.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  /// Short description recorded in reports, e.g. "mock(d=16,seed=7)".
  virtual std::string describe() const = 0;

  /// One vector per token of `text`.
  virtual std::vector<Embedding> embed_tokens(std::string_view text) = 0;
  virtual Embedding embed_text(std::string_view text) = 0;
  virtual Embedding embed_image(std::string_view image_ref) = 0;
};

double dot(const Embedding& a, const Embedding& b);
double l2_norm(const Embedding& v);
/// Scales to unit length. Throws InvalidArgument for zero or non-finite input.
Embedding normalized(Embedding v);
double cosine(const Embedding& a, const Embedding& b);

/// Offline provider: every (kind, key) pair hashes to a seeded pseudo-random
/// unit vector. Tokens come from tokenize(), so equal tokens share a vector.
/// With `nonnegative`, coordinates are folded to absolute values, making
/// every cosine non-negative.
class MockProvider final : public EmbeddingProvider {
 public:
  MockProvider(std::size_t dimension, std::uint64_t seed, bool nonnegative = false);

  std::string describe() const override;
  std::vector<Embedding> embed_tokens(std::string_view text) override;
  Embedding embed_text(std::string_view text) override;
  Embedding embed_image(std::string_view image_ref) override;

  Embedding vector_for(EmbedKind kind, std::string_view key) const;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
  bool nonnegative_;
};

struct RemoteProviderConfig {
  std::string endpoint;  ///< scheme://host[:port]
  std::string path = "/v1/embed";
  std::string bearer_token;  ///< empty: no Authorization header
  int timeout_seconds = 30;
};

/// HTTP provider. Request body {"kind": "token|text|image", "payload": "..."};
/// response body {"vectors": [[...], ...]}. Returned vectors are renormalized.
class RemoteProvider final : public EmbeddingProvider {
 public:
  explicit RemoteProvider(RemoteProviderConfig config);

  std::string describe() const override;
  std::vector<Embedding> embed_tokens(std::string_view text) override;
  Embedding embed_text(std::string_view text) override;
  Embedding embed_image(std::string_view image_ref) override;

  std::vector<Embedding> request(EmbedKind kind, std::string_view payload) const;

 private:
  RemoteProviderConfig config_;
};

/// Memoizing wrapper. Results are keyed by SHA-256 of (kind, payload); with
/// a cache file they persist across runs as line-delimited JSON. At most
/// `max_in_flight` calls reach the inner provider at once.
class CachingProvider final : public EmbeddingProvider {
 public:
  CachingProvider(std::shared_ptr<EmbeddingProvider> inner, std::filesystem::path cache_file = {},
                  std::ptrdiff_t max_in_flight = 8);

  std::string describe() const override;
  std::vector<Embedding> embed_tokens(std::string_view text) override;
  Embedding embed_text(std::string_view text) override;
  Embedding embed_image(std::string_view image_ref) override;

  std::size_t inner_calls() const;
  std::size_t cached_entries() const;

  static std::string cache_key(EmbedKind kind, std::string_view payload);

 private:
  std::vector<Embedding> fetch(EmbedKind kind, std::string_view payload);
  void load();

  std::shared_ptr<EmbeddingProvider> inner_;
  std::filesystem::path cache_file_;
  std::counting_semaphore<> in_flight_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::vector<Embedding>> memo_;
  std::size_t inner_calls_ = 0;
};

}  // namespace anycap
