#include "anycap/judge.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>

#include "anycap/hash.hpp"
#include "anycap/http.hpp"
#include "anycap/ir_score.hpp"

namespace anycap {

std::string judge_cache_key(const JudgeRequest& request) {
  std::string material = request.template_id;
  material.push_back('\0');
  material += std::to_string(request.template_version);
  material.push_back('\0');
  material += request.prompt_text;
  return sha256_hex(material);
}

CacheMissError::CacheMissError(std::string key, std::string template_id, const std::string& context)
    : Error((context.empty() ? "" : context + ": ") + "judge cache miss for " + template_id + " call " + key),
      key_(std::move(key)),
      template_id_(std::move(template_id)) {}

JudgeSchemaError::JudgeSchemaError(std::string schema_id, nlohmann::json raw_response, const std::string& what)
    : Error(what), schema_id_(std::move(schema_id)), raw_(std::move(raw_response)) {}

namespace {

bool nonblank_string(const nlohmann::json& j) {
  if (!j.is_string()) return false;
  for (char c : j.get_ref<const std::string&>())
    if (!std::isspace(static_cast<unsigned char>(c))) return true;
  return false;
}

std::string validate_intent(const nlohmann::json& p) {
  if (!p.is_object() || !p.contains("aspects") || !p["aspects"].is_array()) return "expected {\"aspects\": [...]}";
  if (p["aspects"].empty()) return "aspects is empty";
  std::set<std::string> seen;
  for (const auto& a : p["aspects"]) {
    if (!a.is_object() || !a.contains("aspect") || !a["aspect"].is_string()) return "aspect entry lacks a name";
    const auto& name = a["aspect"].get_ref<const std::string&>();
    if (!intent_aspect_from_name(name)) return "unknown aspect '" + name + "'";
    if (!seen.insert(name).second) return "aspect '" + name + "' listed twice";
    if (!a.contains("note") || !nonblank_string(a["note"])) return "aspect '" + name + "' lacks a note";
  }
  return {};
}

std::string validate_qa(const nlohmann::json& p) {
  if (!p.is_object() || !p.contains("pairs") || !p["pairs"].is_array()) return "expected {\"pairs\": [...]}";
  if (p["pairs"].empty()) return "pairs is empty";
  for (const auto& q : p["pairs"]) {
    if (!q.is_object()) return "pair is not an object";
    if (!q.contains("question") || !nonblank_string(q["question"])) return "pair lacks a question";
    const auto& text = q["question"].get_ref<const std::string&>();
    if (text.find_last_not_of(" \t") == std::string::npos || text[text.find_last_not_of(" \t")] != '?')
      return "question does not end with '?'";
    if (!q.contains("answer") || !nonblank_string(q["answer"])) return "pair lacks an answer";
  }
  return {};
}

std::string validate_answer(const nlohmann::json& p) {
  if (!p.is_object() || !p.contains("answer") || !nonblank_string(p["answer"])) return "expected {\"answer\": text}";
  return {};
}

std::string validate_grade(const nlohmann::json& p) {
  if (!p.is_object()) return "expected an object";
  if (!p.contains("correct") || !p["correct"].is_boolean()) return "correct must be a boolean";
  if (!p.contains("quality") || !p["quality"].is_number_integer()) return "quality must be an integer";
  auto q = p["quality"].get<long long>();
  if (q < 0 || q > 5) return "quality " + std::to_string(q) + " outside 0-5";
  if (p.contains("rationale") && !p["rationale"].is_string()) return "rationale must be text";
  return {};
}

std::string now_iso8601() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json request_to_json(const JudgeRequest& r) {
  return {{"template_id", r.template_id},
          {"template_version", r.template_version},
          {"prompt_text", r.prompt_text},
          {"schema_id", r.schema_id}};
}

}  // namespace

std::string validate_judge_payload(const std::string& schema_id, const nlohmann::json& payload) {
  if (schema_id == "ir.intent.v1") return validate_intent(payload);
  if (schema_id == "ir.qa.v1") return validate_qa(payload);
  if (schema_id == "ir.answer.v1") return validate_answer(payload);
  if (schema_id == "ir.grade.v1") return validate_grade(payload);
  throw InvalidArgument("unknown judge schema '" + schema_id + "'");
}

std::string correction_suffix(const std::string& schema_id, const std::string& problem) {
  return "\n\nYour previous reply did not match the required format (" + schema_id + "): " + problem +
         ". Reply again with JSON only, following the format above exactly.";
}

HttpJudgeBackend::HttpJudgeBackend(HttpJudgeConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw InvalidArgument("judge endpoint is empty");
}

nlohmann::json HttpJudgeBackend::complete(const JudgeRequest& request) {
  HttpTarget target{config_.endpoint, config_.path, {}, config_.timeout_seconds};
  if (!config_.token_env.empty())
    if (const char* token = std::getenv(config_.token_env.c_str())) target.bearer_token = token;
  nlohmann::json body = request_to_json(request);
  body["model"] = config_.model;
  body["temperature"] = config_.temperature;
  nlohmann::json response = http_post_json(target, body);
  if (!response.is_object() || !response.contains("payload"))
    throw HttpError("judge response lacks a payload field");
  nlohmann::json payload = response["payload"];
  if (payload.is_string()) {
    auto parsed = nlohmann::json::parse(payload.get<std::string>(), nullptr, false);
    if (!parsed.is_discarded()) return parsed;
  }
  return payload;
}

ReplayCache::ReplayCache(std::filesystem::path file) : file_(std::move(file)) {
  std::ifstream in(file_);
  if (!in) return;  // created on first append
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      CacheEntry e;
      e.key = j.at("key").get<std::string>();
      const auto& r = j.at("request");
      e.request.template_id = r.at("template_id").get<std::string>();
      e.request.template_version = r.at("template_version").get<int>();
      e.request.prompt_text = r.at("prompt_text").get<std::string>();
      e.request.schema_id = r.at("schema_id").get<std::string>();
      e.payload = j.at("response").at("payload");
      e.timestamp = j.value("timestamp", "");
      if (judge_cache_key(e.request) != e.key) throw ParseError("cache key does not match its request", lineno);
      if (index_.emplace(e.key, entries_.size()).second) entries_.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(file_.string() + ": " + ex.what(), lineno);
    }
  }
}

std::optional<nlohmann::json> ReplayCache::find(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return std::optional<nlohmann::json>(std::in_place, entries_[it->second].payload);
}

void ReplayCache::append(const JudgeRequest& request, const nlohmann::json& payload) {
  CacheEntry e{judge_cache_key(request), request, payload, now_iso8601()};
  std::lock_guard lock(mutex_);
  if (index_.count(e.key)) return;
  if (!file_.empty()) {
    std::ofstream out(file_, std::ios::app);
    if (!out) throw IoError("cannot append to judge cache " + file_.string());
    nlohmann::json line = {{"key", e.key},
                           {"request", request_to_json(request)},
                           {"response", {{"payload", payload}}},
                           {"timestamp", e.timestamp}};
    out << line.dump() << '\n';
    if (!out) throw IoError("write failed on judge cache " + file_.string());
  }
  index_.emplace(e.key, entries_.size());
  entries_.push_back(std::move(e));
}

std::size_t ReplayCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::vector<CacheEntry> ReplayCache::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

JudgeClient::JudgeClient(std::shared_ptr<ReplayCache> cache, std::shared_ptr<JudgeBackend> backend,
                         JudgeOptions options)
    : cache_(cache ? std::move(cache) : std::make_shared<ReplayCache>()),
      backend_(std::move(backend)),
      options_(options),
      in_flight_(std::max<std::ptrdiff_t>(1, options.max_in_flight)) {
  if (options_.mode == JudgeMode::kRecord && !backend_) throw InvalidArgument("record mode needs a judge backend");
  if (options_.max_retries < 0) throw InvalidArgument("max_retries must be non-negative");
}

nlohmann::json JudgeClient::fetch(const JudgeRequest& request) {
  ++total_calls_;
  const std::string key = judge_cache_key(request);
  if (auto hit = cache_->find(key)) return *hit;
  if (options_.mode == JudgeMode::kReplay) throw CacheMissError(key, request.template_id);
  in_flight_.acquire();
  nlohmann::json payload;
  try {
    payload = backend_->complete(request);
  } catch (...) {
    in_flight_.release();
    throw;
  }
  in_flight_.release();
  ++backend_calls_;
  cache_->append(request, payload);
  return payload;
}

nlohmann::json JudgeClient::complete(const JudgeRequest& request) {
  JudgeRequest attempt = request;
  nlohmann::json payload;
  std::string problem;
  for (int i = 0; i <= options_.max_retries; ++i) {
    payload = fetch(attempt);
    problem = validate_judge_payload(request.schema_id, payload);
    if (problem.empty()) return payload;
    attempt.prompt_text = request.prompt_text + correction_suffix(request.schema_id, problem);
    // Each retry carries the latest complaint; the retry index keeps keys distinct
    // when the judge repeats the same mistake.
    attempt.prompt_text += " (attempt " + std::to_string(i + 2) + ")";
  }
  throw JudgeSchemaError(request.schema_id, payload,
                         request.template_id + ": reply violates " + request.schema_id + " after " +
                             std::to_string(options_.max_retries) + " retries: " + problem);
}

}  // namespace anycap
