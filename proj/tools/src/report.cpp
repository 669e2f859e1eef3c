#include "report.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "anycap/error.hpp"
#include "anycap/hash.hpp"

namespace anycap::cli {

std::optional<OutputFormat> output_format_from_name(std::string_view name) {
  if (name == "json") return OutputFormat::kJson;
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "markdown" || name == "md") return OutputFormat::kMarkdown;
  return std::nullopt;
}

void EvalReport::add(std::string group, std::string name, double value) {
  metrics.push_back({std::move(group), std::move(name), value});
}

double EvalReport::metric(std::string_view group, std::string_view name) const {
  for (const auto& m : metrics)
    if (m.group == group && m.name == name) return m.value;
  throw std::out_of_range("no metric " + std::string(group) + "/" + std::string(name));
}

InputFile describe_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return {path, sha256_hex(ss.str())};
}

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& [role, f] : r.inputs) inputs[role] = {{"path", f.path}, {"sha256", f.sha256}};
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto& m : r.metrics) metrics.push_back({{"group", m.group}, {"name", m.name}, {"value", m.value}});
  nlohmann::json j = {{"schema", kReportSchema},
                      {"tool_version", r.tool_version},
                      {"command", r.command},
                      {"inputs", inputs},
                      {"conventions", r.conventions},
                      {"metrics", metrics},
                      {"records", r.records}};
  if (r.elapsed_s) j["timing"] = {{"elapsed_s", *r.elapsed_s}};
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema", "") != kReportSchema)
    throw std::runtime_error("not an " + std::string(kReportSchema) + " document");
  EvalReport r;
  try {
    r.tool_version = j.at("tool_version").get<std::string>();
    r.command = j.at("command").get<std::string>();
    for (const auto& [role, f] : j.at("inputs").items())
      r.inputs[role] = {f.at("path").get<std::string>(), f.at("sha256").get<std::string>()};
    r.conventions = j.at("conventions");
    for (const auto& m : j.at("metrics"))
      r.add(m.at("group").get<std::string>(), m.at("name").get<std::string>(), m.at("value").get<double>());
    r.records = j.at("records");
    if (j.contains("timing")) r.elapsed_s = j["timing"].at("elapsed_s").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed report: ") + e.what());
  }
  return r;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string convention_text(const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void write_csv(const EvalReport& r, std::ostream& out) {
  out << "group,name,value\n";
  out << std::setprecision(17);
  for (const auto& m : r.metrics) out << csv_field(m.group) << ',' << csv_field(m.name) << ',' << m.value << '\n';
}

void write_markdown(const EvalReport& r, std::ostream& out) {
  out << "## anycap " << r.command << "\n\n";
  if (!r.inputs.empty()) {
    for (const auto& [role, f] : r.inputs) out << "- " << role << ": `" << f.path << "`\n";
    out << '\n';
  }
  out << "| group | metric | value |\n|---|---|---:|\n";
  out << std::fixed << std::setprecision(4);
  for (const auto& m : r.metrics) out << "| " << m.group << " | " << m.name << " | " << m.value << " |\n";
  if (!r.conventions.empty()) {
    out << '\n';
    for (const auto& [k, v] : r.conventions.items()) out << "- " << k << ": " << convention_text(v) << '\n';
  }
  if (!r.records.empty()) out << "\n" << r.records.size() << " per-record entries (see --out json).\n";
  if (r.elapsed_s) out << "\nelapsed: " << *r.elapsed_s << " s\n";
}

}  // namespace

void write_report(const EvalReport& report, OutputFormat format, std::ostream& out) {
  switch (format) {
    case OutputFormat::kJson: out << report_to_json(report).dump(2) << '\n'; break;
    case OutputFormat::kCsv: write_csv(report, out); break;
    case OutputFormat::kMarkdown: write_markdown(report, out); break;
  }
}

}  // namespace anycap::cli
