#include "anycap/http.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <nlohmann/json.hpp>

namespace anycap {

nlohmann::json http_post_json(const HttpTarget& target, const nlohmann::json& body) {
  httplib::Client client(target.endpoint);
  if (!client.is_valid()) throw HttpError("invalid endpoint '" + target.endpoint + "'");
  client.set_connection_timeout(target.timeout_seconds, 0);
  client.set_read_timeout(target.timeout_seconds, 0);
  client.set_write_timeout(target.timeout_seconds, 0);
  httplib::Headers headers;
  if (!target.bearer_token.empty()) headers.emplace("Authorization", "Bearer " + target.bearer_token);

  auto res = client.Post(target.path, headers, body.dump(), "application/json");
  if (!res) {
    throw HttpError("POST " + target.endpoint + target.path + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw HttpError("POST " + target.endpoint + target.path + " returned HTTP " + std::to_string(res->status),
                    res->status);
  }
  auto parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) throw HttpError("response from " + target.endpoint + " is not JSON", res->status);
  return parsed;
}

}  // namespace anycap
