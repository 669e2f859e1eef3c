#include "anycap/embedding.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>

#include "anycap/error.hpp"
#include "anycap/hash.hpp"
#include "anycap/http.hpp"
#include "anycap/rng.hpp"
#include "anycap/text_metrics.hpp"

namespace anycap {

std::string_view embed_kind_name(EmbedKind kind) {
  switch (kind) {
    case EmbedKind::kToken: return "token";
    case EmbedKind::kText: return "text";
    case EmbedKind::kImage: return "image";
  }
  return "?";
}

double dot(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size())
    throw ShapeError("embedding dimension mismatch: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(const Embedding& v) { return std::sqrt(dot(v, v)); }

Embedding normalized(Embedding v) {
  double n = l2_norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("cannot normalize a zero or non-finite vector");
  for (double& x : v) x /= n;
  return v;
}

double cosine(const Embedding& a, const Embedding& b) { return dot(a, b) / (l2_norm(a) * l2_norm(b)); }

// --- MockProvider -----------------------------------------------------------

MockProvider::MockProvider(std::size_t dimension, std::uint64_t seed, bool nonnegative)
    : dimension_(dimension), seed_(seed), nonnegative_(nonnegative) {
  if (dimension == 0) throw InvalidArgument("mock provider dimension must be positive");
}

std::string MockProvider::describe() const {
  return "mock(d=" + std::to_string(dimension_) + ",seed=" + std::to_string(seed_) +
         (nonnegative_ ? ",nonnegative" : "") + ")";
}

Embedding MockProvider::vector_for(EmbedKind kind, std::string_view key) const {
  std::string material(embed_kind_name(kind));
  material.push_back('\0');
  material.append(key);
  DeterministicRng rng(hash64(material, seed_));
  Embedding v(dimension_);
  // Box-Muller on the platform-independent uniform stream.
  for (std::size_t i = 0; i < dimension_; i += 2) {
    double u1 = 1.0 - rng.uniform();
    double u2 = rng.uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    v[i] = radius * std::cos(2.0 * std::numbers::pi * u2);
    if (i + 1 < dimension_) v[i + 1] = radius * std::sin(2.0 * std::numbers::pi * u2);
  }
  if (nonnegative_)
    for (double& x : v) x = std::abs(x);
  return normalized(std::move(v));
}

std::vector<Embedding> MockProvider::embed_tokens(std::string_view text) {
  std::vector<Embedding> out;
  for (const auto& tok : tokenize(text)) out.push_back(vector_for(EmbedKind::kToken, tok));
  return out;
}

Embedding MockProvider::embed_text(std::string_view text) { return vector_for(EmbedKind::kText, text); }

Embedding MockProvider::embed_image(std::string_view image_ref) {
  return vector_for(EmbedKind::kImage, image_ref);
}

// --- RemoteProvider ---------------------------------------------------------

RemoteProvider::RemoteProvider(RemoteProviderConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw InvalidArgument("remote embedding provider needs an endpoint");
}

std::string RemoteProvider::describe() const { return "remote(" + config_.endpoint + config_.path + ")"; }

std::vector<Embedding> RemoteProvider::request(EmbedKind kind, std::string_view payload) const {
  nlohmann::json body{{"kind", embed_kind_name(kind)}, {"payload", payload}};
  auto reply = http_post_json({config_.endpoint, config_.path, config_.bearer_token, config_.timeout_seconds}, body);
  auto it = reply.find("vectors");
  if (it == reply.end() || !it->is_array()) throw Error("embedding response lacks a 'vectors' array");
  std::vector<Embedding> out;
  for (const auto& v : *it) {
    if (!v.is_array() || v.empty()) throw Error("embedding response holds a malformed vector");
    Embedding e;
    for (const auto& x : v) {
      if (!x.is_number()) throw Error("embedding response holds a non-numeric entry");
      e.push_back(x.get<double>());
    }
    out.push_back(normalized(std::move(e)));
  }
  return out;
}

std::vector<Embedding> RemoteProvider::embed_tokens(std::string_view text) {
  return request(EmbedKind::kToken, text);
}

namespace {
Embedding single(std::vector<Embedding> vs, std::string_view what) {
  if (vs.size() != 1)
    throw Error(std::string(what) + " embedding: expected 1 vector, got " + std::to_string(vs.size()));
  return std::move(vs.front());
}
}  // namespace

Embedding RemoteProvider::embed_text(std::string_view text) {
  return single(request(EmbedKind::kText, text), "text");
}

Embedding RemoteProvider::embed_image(std::string_view image_ref) {
  return single(request(EmbedKind::kImage, image_ref), "image");
}

// --- CachingProvider --------------------------------------------------------

CachingProvider::CachingProvider(std::shared_ptr<EmbeddingProvider> inner, std::filesystem::path cache_file,
                                 std::ptrdiff_t max_in_flight)
    : inner_(std::move(inner)), cache_file_(std::move(cache_file)), in_flight_(max_in_flight) {
  if (!inner_) throw InvalidArgument("caching provider needs an inner provider");
  if (max_in_flight < 1) throw InvalidArgument("max_in_flight must be >= 1");
  if (!cache_file_.empty()) load();
}

std::string CachingProvider::describe() const { return inner_->describe(); }

std::string CachingProvider::cache_key(EmbedKind kind, std::string_view payload) {
  std::string material(embed_kind_name(kind));
  material.push_back('\0');
  material.append(payload);
  return sha256_hex(material);
}

void CachingProvider::load() {
  std::ifstream in(cache_file_);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("key") || !j.contains("vectors"))
      throw ParseError("embedding cache " + cache_file_.string() + " is corrupt", lineno);
    memo_[j["key"].get<std::string>()] = j["vectors"].get<std::vector<Embedding>>();
  }
}

std::vector<Embedding> CachingProvider::fetch(EmbedKind kind, std::string_view payload) {
  const std::string key = cache_key(kind, payload);
  {
    std::lock_guard lock(mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  std::vector<Embedding> result;
  {
    in_flight_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{in_flight_};
    switch (kind) {
      case EmbedKind::kToken: result = inner_->embed_tokens(payload); break;
      case EmbedKind::kText: result = {inner_->embed_text(payload)}; break;
      case EmbedKind::kImage: result = {inner_->embed_image(payload)}; break;
    }
  }
  std::lock_guard lock(mutex_);
  ++inner_calls_;
  auto [it, inserted] = memo_.emplace(key, result);
  if (inserted && !cache_file_.empty()) {
    std::ofstream out(cache_file_, std::ios::app);
    if (!out) throw IoError("cannot append to embedding cache " + cache_file_.string());
    out << nlohmann::json{{"key", key}, {"kind", embed_kind_name(kind)}, {"vectors", result}}.dump() << '\n';
  }
  return it->second;
}

std::vector<Embedding> CachingProvider::embed_tokens(std::string_view text) {
  return fetch(EmbedKind::kToken, text);
}

Embedding CachingProvider::embed_text(std::string_view text) { return fetch(EmbedKind::kText, text).front(); }

Embedding CachingProvider::embed_image(std::string_view image_ref) {
  return fetch(EmbedKind::kImage, image_ref).front();
}

std::size_t CachingProvider::inner_calls() const {
  std::lock_guard lock(mutex_);
  return inner_calls_;
}

std::size_t CachingProvider::cached_entries() const {
  std::lock_guard lock(mutex_);
  return memo_.size();
}

}  // namespace anycap
