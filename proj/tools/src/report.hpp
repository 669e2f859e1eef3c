#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace anycap::cli {

inline constexpr std::string_view kReportSchema = "anycap.report.v1";

enum class OutputFormat { kJson, kCsv, kMarkdown };

std::optional<OutputFormat> output_format_from_name(std::string_view name);

struct MetricValue {
  std::string group;  ///< e.g. "entire", "camera", "irscore"
  std::string name;
  double value = 0;
  bool operator==(const MetricValue&) const = default;
};

struct InputFile {
  std::string path;
  std::string sha256;
  bool operator==(const InputFile&) const = default;
};

/// Machine-readable result of one command.
struct EvalReport {
  std::string tool_version;
  std::string command;
  std::map<std::string, InputFile> inputs;
  nlohmann::json conventions = nlohmann::json::object();
  std::vector<MetricValue> metrics;
  nlohmann::json records = nlohmann::json::array();
  std::optional<double> elapsed_s;  ///< only with --timing; breaks byte stability

  void add(std::string group, std::string name, double value);
  /// Looks up a metric; throws std::out_of_range when absent.
  double metric(std::string_view group, std::string_view name) const;
  bool operator==(const EvalReport&) const = default;
};

/// The path plus the SHA-256 of the file contents.
InputFile describe_input(const std::string& path);

nlohmann::json report_to_json(const EvalReport& report);
/// Throws std::runtime_error on a wrong schema tag or missing fields.
EvalReport report_from_json(const nlohmann::json& j);

void write_report(const EvalReport& report, OutputFormat format, std::ostream& out);

}  // namespace anycap::cli
