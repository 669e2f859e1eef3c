#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

namespace anycap {

class HttpError : public std::runtime_error {
 public:
  HttpError(const std::string& what, int status = 0) : std::runtime_error(what), status_(status) {}
  /// HTTP status, 0 for transport failures.
  int status() const { return status_; }

 private:
  int status_;
};

struct HttpTarget {
  std::string endpoint;  ///< scheme://host[:port]
  std::string path;
  std::string bearer_token;
  int timeout_seconds = 30;
};

/// POSTs `body` as JSON and parses the JSON response. Throws HttpError on
/// transport failure, a non-2xx status or an unparseable body.
nlohmann::json http_post_json(const HttpTarget& target, const nlohmann::json& body);

}  // namespace anycap
