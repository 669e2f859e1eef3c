#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "anycap/error.hpp"

namespace anycap {

struct JudgeRequest {
  std::string template_id;
  int template_version = 0;
  std::string prompt_text;
  std::string schema_id;
};

/// Cache key: SHA-256 over (template id, template version, prompt text).
std::string judge_cache_key(const JudgeRequest& request);

/// A replay-mode call whose key is absent from the cache.
class CacheMissError : public Error {
 public:
  CacheMissError(std::string key, std::string template_id, const std::string& context = {});
  const std::string& key() const { return key_; }
  const std::string& template_id() const { return template_id_; }

 private:
  std::string key_;
  std::string template_id_;
};

/// The judge kept answering outside the response schema.
class JudgeSchemaError : public Error {
 public:
  JudgeSchemaError(std::string schema_id, nlohmann::json raw_response, const std::string& what);
  const std::string& schema_id() const { return schema_id_; }
  const nlohmann::json& raw_response() const { return raw_; }

 private:
  std::string schema_id_;
  nlohmann::json raw_;
};

/// Returns an empty string when `payload` conforms to `schema_id`, otherwise
/// a description of the first problem. Known schemas: ir.intent.v1,
/// ir.qa.v1, ir.answer.v1, ir.grade.v1.
std::string validate_judge_payload(const std::string& schema_id, const nlohmann::json& payload);

/// Raw transport to a judge model. Implementations return the response
/// payload unvalidated and must be callable from several threads.
class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  virtual nlohmann::json complete(const JudgeRequest& request) = 0;
};

struct HttpJudgeConfig {
  std::string endpoint;  ///< scheme://host[:port]
  std::string path = "/v1/judge";
  std::string model;
  double temperature = 0.0;
  /// Environment variable holding the bearer token; unset means no header.
  std::string token_env = "ANYCAP_JUDGE_TOKEN";
  int timeout_seconds = 120;
};

/// Request body: {template_id, template_version, prompt_text, schema_id,
/// model, temperature}. Response body: {"payload": ...}. A string payload is
/// parsed as JSON when possible, since chat models often return JSON text.
class HttpJudgeBackend final : public JudgeBackend {
 public:
  explicit HttpJudgeBackend(HttpJudgeConfig config);
  nlohmann::json complete(const JudgeRequest& request) override;

 private:
  HttpJudgeConfig config_;
};

struct CacheEntry {
  std::string key;
  JudgeRequest request;
  nlohmann::json payload;
  std::string timestamp;
};

/// Append-only line-delimited store of judge calls. The first entry for a
/// key wins; later duplicates in the file are ignored.
class ReplayCache {
 public:
  ReplayCache() = default;  ///< in-memory only
  explicit ReplayCache(std::filesystem::path file);

  std::optional<nlohmann::json> find(const std::string& key) const;
  /// No-op when `key` is already present.
  void append(const JudgeRequest& request, const nlohmann::json& payload);
  std::size_t size() const;
  std::vector<CacheEntry> entries() const;

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<CacheEntry> entries_;
};

enum class JudgeMode {
  kReplay,  ///< cache only; a miss is an error
  kRecord,  ///< cache first, then the backend; new responses are appended
};

struct JudgeOptions {
  JudgeMode mode = JudgeMode::kReplay;
  int max_retries = 3;
  std::ptrdiff_t max_in_flight = 4;
};

/// Schema-validating, caching front end used by the IRScore pipeline.
/// Thread-safe.
class JudgeClient {
 public:
  JudgeClient(std::shared_ptr<ReplayCache> cache, std::shared_ptr<JudgeBackend> backend, JudgeOptions options);

  /// Returns a payload conforming to request.schema_id. On a schema
  /// violation the prompt is re-sent with a correction note appended, up to
  /// max_retries times; each attempt is a separate cached call.
  nlohmann::json complete(const JudgeRequest& request);

  std::size_t backend_calls() const { return backend_calls_.load(); }
  std::size_t total_calls() const { return total_calls_.load(); }
  const ReplayCache& cache() const { return *cache_; }

 private:
  nlohmann::json fetch(const JudgeRequest& request);

  std::shared_ptr<ReplayCache> cache_;
  std::shared_ptr<JudgeBackend> backend_;
  JudgeOptions options_;
  std::counting_semaphore<> in_flight_;
  std::atomic<std::size_t> backend_calls_{0};
  std::atomic<std::size_t> total_calls_{0};
};

/// Suffix appended to a prompt after the judge's reply failed validation.
std::string correction_suffix(const std::string& schema_id, const std::string& problem);

}  // namespace anycap
