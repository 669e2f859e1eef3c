#include "anycap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "anycap/error.hpp"
#include "anycap/rng.hpp"
#include "anycap/strings.hpp"
#include "anycap/text_metrics.hpp"

namespace anycap {

namespace {

constexpr std::string_view kCategoryNames[] = {"depth", "human_pose", "multi_identities", "camera", "compositional"};
constexpr std::string_view kStageNames[] = {"identities", "human_pose", "camera", "depth"};
constexpr std::string_view kRecordFields[] = {"id",         "video_ref",     "duration_s",        "category",
                                              "conditions", "short_caption", "structured_caption"};

using json = nlohmann::json;

const json& require(const json& j, std::string_view field, std::size_t index) {
  auto it = j.find(field);
  if (it == j.end()) throw SchemaError(index, std::string(field), "required field is missing");
  return *it;
}

std::string require_string(const json& j, std::string_view field, std::size_t index) {
  const json& v = require(j, field, index);
  if (!v.is_string() || strings::is_blank(v.get_ref<const std::string&>()))
    throw SchemaError(index, std::string(field), "must be a non-empty string");
  return v.get<std::string>();
}

// Condition errors arrive as "field: message"; lift the field into the path.
[[noreturn]] void rethrow_condition_error(const std::exception& e, std::size_t index, std::size_t item) {
  std::string what = e.what();
  std::string path = "conditions[" + std::to_string(item) + "]";
  auto colon = what.find(": ");
  if (colon != std::string::npos && what.find(' ') > colon) {
    path += "." + what.substr(0, colon);
    what = what.substr(colon + 2);
  }
  throw SchemaError(index, path, what);
}

}  // namespace

std::string_view category_name(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::optional<Category> category_from_name(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kCategoryNames); ++i)
    if (kCategoryNames[i] == name) return static_cast<Category>(i);
  return std::nullopt;
}

bool category_consistent(Category category, const ConditionSet& conditions) {
  std::set<ConditionKind> kinds;
  for (const auto& c : conditions.items()) kinds.insert(c.kind);
  auto only = [&](ConditionKind k) { return kinds.size() == 1 && *kinds.begin() == k; };
  switch (category) {
    case Category::kDepth: return only(ConditionKind::kDepth);
    case Category::kHumanPose: return only(ConditionKind::kPose);
    case Category::kMultiIdentities: return only(ConditionKind::kIdentities);
    case Category::kCamera: return only(ConditionKind::kCamera);
    case Category::kCompositional: return kinds.size() >= 2;
  }
  return false;
}

Any2CapRecord record_from_json(const json& j, std::size_t index) {
  if (!j.is_object()) throw SchemaError(index, "$", "record must be an object");
  for (const auto& [key, _] : j.items())
    if (std::find(std::begin(kRecordFields), std::end(kRecordFields), key) == std::end(kRecordFields))
      throw SchemaError(index, key, "unknown field");

  Any2CapRecord r;
  r.id = require_string(j, "id", index);
  r.video_ref = require_string(j, "video_ref", index);

  const json& d = require(j, "duration_s", index);
  if (!d.is_number() || !std::isfinite(d.get<double>()) || d.get<double>() <= 0)
    throw SchemaError(index, "duration_s", "must be a positive number");
  r.duration_s = d.get<double>();

  std::string cat = require_string(j, "category", index);
  auto category = category_from_name(cat);
  if (!category) throw SchemaError(index, "category", "unknown category '" + cat + "'");
  r.category = *category;

  const json& conds = require(j, "conditions", index);
  if (!conds.is_array() || conds.empty()) throw SchemaError(index, "conditions", "must be a non-empty array");
  for (std::size_t i = 0; i < conds.size(); ++i) {
    Condition c;
    try {
      c = condition_from_json(conds[i]);
    } catch (const InvalidArgument& e) {
      rethrow_condition_error(e, index, i);
    }
    try {
      r.conditions.add(std::move(c));
    } catch (const InvalidArgument& e) {
      throw SchemaError(index, "conditions[" + std::to_string(i) + "]", e.what());
    }
  }
  if (!category_consistent(r.category, r.conditions))
    throw SchemaError(index, "category", "category '" + cat + "' does not match the condition types");

  r.short_caption = ShortPrompt(require_string(j, "short_caption", index));

  const json& sc = require(j, "structured_caption", index);
  try {
    r.structured_caption = caption_from_json(sc);
  } catch (const Error& e) {
    throw SchemaError(index, "structured_caption", e.what());
  }
  if (r.structured_caption.empty()) throw SchemaError(index, "structured_caption", "has no components");
  return r;
}

json record_to_json(const Any2CapRecord& r) {
  json conds = json::array();
  for (const auto& c : r.conditions.items()) conds.push_back(condition_to_json(c));
  json out = json::object();
  out["id"] = r.id;
  out["video_ref"] = r.video_ref;
  out["duration_s"] = r.duration_s;
  out["category"] = category_name(r.category);
  out["conditions"] = std::move(conds);
  out["short_caption"] = r.short_caption.text();
  out["structured_caption"] = caption_to_json(r.structured_caption);
  return out;
}

namespace {

template <class OnRecord, class OnError>
void scan_lines(std::istream& in, OnRecord on_record, OnError on_error) {
  std::string line;
  std::size_t lineno = 0, index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (strings::is_blank(line)) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      on_error(RecordViolation{index++, lineno, "$", "not valid JSON", {}});
      continue;
    }
    try {
      on_record(record_from_json(j, index), index, lineno);
    } catch (const SchemaError& e) {
      auto id = j.is_object() ? j.find("id") : j.end();
      on_error(RecordViolation{index, lineno, e.field_path(), e.detail(),
                               id != j.end() && id->is_string() ? id->get<std::string>() : std::string()});
    }
    ++index;
  }
}

}  // namespace

std::vector<Any2CapRecord> read_records(std::istream& in) {
  std::vector<Any2CapRecord> out;
  scan_lines(
      in, [&](Any2CapRecord r, std::size_t, std::size_t) { out.push_back(std::move(r)); },
      [](const RecordViolation& v) { throw SchemaError(v.index, v.field_path, v.message); });
  return out;
}

std::vector<Any2CapRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_records(in);
}

void write_records(std::span<const Any2CapRecord> records, std::ostream& out) {
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
  if (!out) throw IoError("record write failed");
}

void write_records(std::span<const Any2CapRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_records(records, out);
}

std::vector<RecordViolation> validate_records(std::istream& in) {
  std::vector<RecordViolation> out;
  std::map<std::string, std::size_t> seen;
  scan_lines(
      in,
      [&](const Any2CapRecord& r, std::size_t index, std::size_t lineno) {
        auto [it, fresh] = seen.emplace(r.id, index);
        if (!fresh)
          out.push_back({index, lineno, "id",
                         "duplicate id '" + r.id + "' (first at record " + std::to_string(it->second) + ")", r.id});
      },
      [&](RecordViolation v) { out.push_back(std::move(v)); });
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.line < b.line; });
  return out;
}

std::vector<CaptionRecord> read_caption_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<CaptionRecord> out;
  std::string line;
  std::size_t lineno = 0, index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (strings::is_blank(line)) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw SchemaError(index, "$", "line " + std::to_string(lineno) + " is not a JSON object");
    CaptionRecord c;
    c.id = require_string(j, "id", index);
    try {
      c.caption = caption_from_json(require(j, "structured_caption", index));
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      throw SchemaError(index, "structured_caption", e.what());
    }
    if (auto it = j.find("short_caption"); it != j.end() && it->is_string()) c.short_caption = it->get<std::string>();
    out.push_back(std::move(c));
    ++index;
  }
  return out;
}

double CategoryStats::avg_duration_s() const { return instances ? duration_s / static_cast<double>(instances) : 0; }
double CategoryStats::short_mean_words() const {
  return instances ? static_cast<double>(short_words) / static_cast<double>(instances) : 0;
}
double CategoryStats::structured_mean_words() const {
  return instances ? static_cast<double>(structured_words) / static_cast<double>(instances) : 0;
}

CategoryStats& CategoryStats::operator+=(const CategoryStats& o) {
  instances += o.instances;
  conditions += o.conditions;
  duration_s += o.duration_s;
  short_words += o.short_words;
  structured_words += o.structured_words;
  return *this;
}

DatasetStats& DatasetStats::operator+=(const DatasetStats& o) {
  if (histogram_bin_width != o.histogram_bin_width) throw InvalidArgument("histogram bin widths differ");
  for (const auto& [c, s] : o.per_category) per_category[c] += s;
  total += o.total;
  for (const auto& [b, n] : o.short_words_hist) short_words_hist[b] += n;
  for (const auto& [b, n] : o.structured_words_hist) structured_words_hist[b] += n;
  for (const auto& [k, n] : o.identities_per_instance) identities_per_instance[k] += n;
  return *this;
}

DatasetStats compute_stats(std::span<const Any2CapRecord> records, std::size_t bin_width) {
  if (records.empty()) throw InvalidArgument("compute_stats needs at least one record");
  if (bin_width == 0) throw InvalidArgument("histogram bin width must be positive");
  DatasetStats s;
  s.histogram_bin_width = bin_width;
  for (const auto& r : records) {
    CategoryStats one;
    one.instances = 1;
    for (const auto& c : r.conditions.items()) one.conditions += c.annotation_count();
    one.duration_s = r.duration_s;
    one.short_words = word_count(r.short_caption.text());
    one.structured_words = word_count(r.structured_caption.body_text());
    s.per_category[r.category] += one;
    s.total += one;
    ++s.short_words_hist[one.short_words / bin_width * bin_width];
    ++s.structured_words_hist[one.structured_words / bin_width * bin_width];
    if (r.category == Category::kMultiIdentities) ++s.identities_per_instance[one.conditions];
  }
  return s;
}

json stats_to_json(const DatasetStats& stats) {
  auto row = [](const CategoryStats& c) {
    return json{{"instances", c.instances},
                {"conditions", c.conditions},
                {"avg_duration_s", c.avg_duration_s()},
                {"total_duration_h", c.total_duration_h()},
                {"short_mean_words", c.short_mean_words()},
                {"structured_mean_words", c.structured_mean_words()}};
  };
  auto hist = [](const WordHistogram& h) {
    json out = json::array();
    for (const auto& [b, n] : h) out.push_back({{"bin", b}, {"count", n}});
    return out;
  };
  json per = json::object();
  for (const auto& [c, v] : stats.per_category) per[std::string(category_name(c))] = row(v);
  json ids = json::array();
  for (const auto& [k, n] : stats.identities_per_instance) ids.push_back({{"identities", k}, {"instances", n}});
  return {{"per_category", per},
          {"total", row(stats.total)},
          {"histogram_bin_width", stats.histogram_bin_width},
          {"short_words_hist", hist(stats.short_words_hist)},
          {"structured_words_hist", hist(stats.structured_words_hist)},
          {"identities_per_instance", ids}};
}

namespace {

struct MarkerPair {
  std::string_view start, pad, end;
};

constexpr MarkerPair kVision{"<|vision_start|>", "", "<|vision_end|>"};
constexpr MarkerPair kMotion{"<|motion_start|>", "<|video_pad|>", "<|motion_end|>"};
constexpr MarkerPair kCamera{"<|camera_start|>", "<|video_pad|>", "<|camera_end|>"};

}  // namespace

std::string assemble_condition_sequence(const Any2CapRecord& record) {
  std::string out;
  auto span = [&](const MarkerPair& m, std::string_view pad) {
    out += m.start;
    out += pad;
    out += m.end;
  };
  for (const auto& c : record.conditions.items()) {
    switch (c.kind) {
      case ConditionKind::kDepth: span(kVision, "<|video_pad|>"); break;
      case ConditionKind::kIdentities:
        for (std::size_t i = 0; i < c.refs.size(); ++i) span(kVision, "<|image_pad|>");
        break;
      case ConditionKind::kPose: span(kMotion, kMotion.pad); break;
      case ConditionKind::kCamera: span(kCamera, kCamera.pad); break;
      default: throw InvalidArgument("unknown condition tag");
    }
  }
  out += "\n";
  out += record.short_caption.text();
  return out;
}

bool markers_balanced(std::string_view text) {
  static constexpr std::pair<std::string_view, std::string_view> kPairs[] = {
      {"<|vision_start|>", "<|vision_end|>"},
      {"<|motion_start|>", "<|motion_end|>"},
      {"<|camera_start|>", "<|camera_end|>"}};
  constexpr std::size_t kNone = std::size(kPairs);
  std::size_t open = kNone;
  for (std::size_t pos = 0; (pos = text.find("<|", pos)) != std::string_view::npos;) {
    std::string_view rest = text.substr(pos);
    bool matched = false;
    for (std::size_t k = 0; k < std::size(kPairs); ++k) {
      if (rest.starts_with(kPairs[k].first)) {
        if (open != kNone) return false;  // nested
        open = k;
        matched = true;
        pos += kPairs[k].first.size();
        break;
      }
      if (rest.starts_with(kPairs[k].second)) {
        if (open != k) return false;
        open = kNone;
        matched = true;
        pos += kPairs[k].second.size();
        break;
      }
    }
    if (!matched) pos += 2;
  }
  return open == kNone;
}

std::string_view stage_name(Stage s) { return kStageNames[static_cast<std::size_t>(s)]; }

std::optional<Stage> stage_from_name(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kStageNames); ++i)
    if (kStageNames[i] == name) return static_cast<Stage>(i);
  return std::nullopt;
}

ConditionKind stage_condition(Stage s) {
  switch (s) {
    case Stage::kIdentities: return ConditionKind::kIdentities;
    case Stage::kHumanPose: return ConditionKind::kPose;
    case Stage::kCamera: return ConditionKind::kCamera;
    case Stage::kDepth: return ConditionKind::kDepth;
  }
  throw InvalidArgument("unknown stage");
}

int stage_position(Stage s) {
  for (std::size_t i = 0; i < std::size(kStageOrder); ++i)
    if (kStageOrder[i] == s) return static_cast<int>(i);
  throw InvalidArgument("unknown stage");
}

StageConfig default_stage_config(Stage s, std::uint64_t seed) {
  switch (s) {
    case Stage::kIdentities: return {s, 0.0, 0.6, 0.4, seed};
    case Stage::kHumanPose: return {s, 0.4, 0.6, 0.6, seed};
    case Stage::kCamera: return {s, 0.6, 0.6, 0.6, seed};
    case Stage::kDepth: return {s, 0.8, 0.6, 0.6, seed};
  }
  throw InvalidArgument("unknown stage");
}

std::size_t TrainingManifest::aux_count() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const ManifestEntry& e) {
    return e.source == ManifestEntry::Source::kAux;
  }));
}

bool TrainingManifest::operator==(const TrainingManifest& o) const {
  return config.stage == o.config.stage && config.joint_train_ratio == o.config.joint_train_ratio &&
         config.sentence_dropout_rate == o.config.sentence_dropout_rate &&
         config.condition_dropout_rate == o.config.condition_dropout_rate && config.seed == o.config.seed &&
         entries == o.entries;
}

std::vector<Any2CapRecord> records_for_stage(std::span<const Any2CapRecord> records, Stage stage) {
  std::vector<Any2CapRecord> out;
  for (const auto& r : records)
    if (r.conditions.contains(stage_condition(stage))) out.push_back(r);
  return out;
}

namespace {

template <class T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
  DeterministicRng rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

void check_rate(double r, const char* what) {
  if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

TrainingManifest build_manifest(std::span<const Any2CapRecord> records, std::span<const std::string> aux_pool,
                                const StageConfig& config) {
  constexpr double kRatios[] = {0.0, 0.4, 0.6, 0.8};
  const double r = config.joint_train_ratio;
  if (std::none_of(std::begin(kRatios), std::end(kRatios), [r](double x) { return std::abs(x - r) < 1e-12; }))
    throw InvalidArgument("joint-train ratio must be one of 0.0, 0.4, 0.6, 0.8");
  check_rate(config.sentence_dropout_rate, "sentence dropout rate");
  check_rate(config.condition_dropout_rate, "condition dropout rate");
  if (records.empty()) throw InvalidArgument("manifest needs at least one dataset record");

  const std::size_t n = records.size();
  const auto n_aux = static_cast<std::size_t>(std::llround(r * static_cast<double>(n) / (1.0 - r)));
  if (aux_pool.size() < n_aux)
    throw InvalidArgument("auxiliary pool has " + std::to_string(aux_pool.size()) + " entries, stage needs " +
                          std::to_string(n_aux));

  std::vector<std::string> data;
  for (const auto& rec : records) data.push_back(rec.id);
  seeded_shuffle(data, mix64(config.seed ^ 0x64617461ULL));
  std::vector<std::string> aux(aux_pool.begin(), aux_pool.end());
  seeded_shuffle(aux, mix64(config.seed ^ 0x617578ULL));
  aux.resize(n_aux);

  TrainingManifest m;
  m.config = config;
  const std::size_t total = n + n_aux;
  std::size_t di = 0, ai = 0;
  for (std::size_t i = 0; i < total; ++i) {
    // Aux slot whenever floor((i+1)*a/T) steps; spreads aux evenly.
    const bool is_aux = (i + 1) * n_aux / total > i * n_aux / total;
    ManifestEntry e;
    e.source = is_aux ? ManifestEntry::Source::kAux : ManifestEntry::Source::kData;
    e.ref = is_aux ? aux[ai++] : data[di++];
    e.seed = mix64(config.seed + i);
    m.entries.push_back(std::move(e));
  }
  return m;
}

void write_manifest(const TrainingManifest& manifest, std::ostream& out) {
  const auto& c = manifest.config;
  json header = {{"manifest_version", 1},
                 {"stage", stage_name(c.stage)},
                 {"position", stage_position(c.stage)},
                 {"joint_train_ratio", c.joint_train_ratio},
                 {"sentence_dropout_rate", c.sentence_dropout_rate},
                 {"condition_dropout_rate", c.condition_dropout_rate},
                 {"seed", c.seed}};
  out << header.dump() << '\n';
  for (const auto& e : manifest.entries) {
    json line = {{"source", e.source == ManifestEntry::Source::kAux ? "aux" : "data"},
                 {"ref", e.ref},
                 {"stage", stage_name(c.stage)},
                 {"seed", e.seed}};
    out << line.dump() << '\n';
  }
  if (!out) throw IoError("manifest write failed");
}

TrainingManifest read_manifest(std::istream& in) {
  TrainingManifest m;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (strings::is_blank(line)) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError("manifest line is not a JSON object", lineno);
    try {
      if (!have_header) {
        if (j.at("manifest_version").get<int>() != 1) throw ParseError("unsupported manifest version", lineno);
        auto stage = stage_from_name(j.at("stage").get<std::string>());
        if (!stage) throw ParseError("unknown stage", lineno);
        m.config = {*stage, j.at("joint_train_ratio").get<double>(), j.at("sentence_dropout_rate").get<double>(),
                    j.at("condition_dropout_rate").get<double>(), j.at("seed").get<std::uint64_t>()};
        have_header = true;
        continue;
      }
      ManifestEntry e;
      const auto source = j.at("source").get<std::string>();
      if (source != "data" && source != "aux") throw ParseError("source must be data or aux", lineno);
      e.source = source == "aux" ? ManifestEntry::Source::kAux : ManifestEntry::Source::kData;
      e.ref = j.at("ref").get<std::string>();
      e.seed = j.at("seed").get<std::uint64_t>();
      if (j.at("stage").get<std::string>() != stage_name(m.config.stage))
        throw ParseError("entry stage differs from the header", lineno);
      m.entries.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (!have_header) throw ParseError("manifest has no header line");
  return m;
}

}  // namespace anycap
