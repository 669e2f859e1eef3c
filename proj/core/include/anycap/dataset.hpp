#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "anycap/caption.hpp"
#include "anycap/conditions.hpp"

namespace anycap {

enum class Category { kDepth, kHumanPose, kMultiIdentities, kCamera, kCompositional };
inline constexpr Category kAllCategories[] = {Category::kDepth, Category::kHumanPose, Category::kMultiIdentities,
                                              Category::kCamera, Category::kCompositional};

std::string_view category_name(Category c);
std::optional<Category> category_from_name(std::string_view name);

/// Whether `conditions` fits `category`: a single-kind category needs
/// exactly that kind, compositional needs at least two distinct kinds.
bool category_consistent(Category category, const ConditionSet& conditions);

struct Any2CapRecord {
  std::string id;
  std::string video_ref;
  double duration_s = 0;
  Category category = Category::kDepth;
  ConditionSet conditions;
  ShortPrompt short_caption{"-"};
  StructuredCaption structured_caption;

  bool operator==(const Any2CapRecord&) const = default;
};

/// Throws SchemaError(index, field path) on the first violation.
Any2CapRecord record_from_json(const nlohmann::json& j, std::size_t index = 0);
nlohmann::json record_to_json(const Any2CapRecord& r);

struct RecordViolation {
  std::size_t index;      ///< 0-based record index (non-blank lines)
  std::size_t line;       ///< 1-based line number
  std::string field_path;
  std::string message;
  std::string id;         ///< empty when the line has no string id
};

/// Reads line-delimited records; blank lines are skipped. Throws SchemaError
/// on the first invalid record.
std::vector<Any2CapRecord> read_records(std::istream& in);
std::vector<Any2CapRecord> read_records(const std::filesystem::path& path);
void write_records(std::span<const Any2CapRecord> records, std::ostream& out);
void write_records(std::span<const Any2CapRecord> records, const std::filesystem::path& path);

/// Checks every line and reports all violations, including duplicate ids.
std::vector<RecordViolation> validate_records(std::istream& in);

/// Minimal form used for predicted captions: {"id", "structured_caption"}
/// plus an optional "short_caption". Full records are accepted as well.
struct CaptionRecord {
  std::string id;
  StructuredCaption caption;
  std::optional<std::string> short_caption;
};
std::vector<CaptionRecord> read_caption_records(const std::filesystem::path& path);

/// Path of the versioned record schema relative to the installed data dir.
inline constexpr std::string_view kRecordSchemaName = "any2cap_record.v1.schema.json";

using WordHistogram = std::map<std::size_t, std::size_t>;  ///< bin start -> count

/// Additive sums for one category; means are derived from them.
struct CategoryStats {
  std::size_t instances = 0;
  std::size_t conditions = 0;
  double duration_s = 0;
  std::size_t short_words = 0;
  std::size_t structured_words = 0;

  double avg_duration_s() const;
  double total_duration_h() const { return duration_s / 3600.0; }
  double short_mean_words() const;
  double structured_mean_words() const;

  CategoryStats& operator+=(const CategoryStats& o);
};

struct DatasetStats {
  std::map<Category, CategoryStats> per_category;
  CategoryStats total;
  std::size_t histogram_bin_width = 10;
  WordHistogram short_words_hist;
  WordHistogram structured_words_hist;
  /// Identity images per multi_identities instance -> number of instances.
  std::map<std::size_t, std::size_t> identities_per_instance;

  DatasetStats& operator+=(const DatasetStats& o);
};

/// Throws InvalidArgument on an empty list.
DatasetStats compute_stats(std::span<const Any2CapRecord> records, std::size_t bin_width = 10);
nlohmann::json stats_to_json(const DatasetStats& stats);

/// Marker-wrapped condition placeholders in condition order, then a newline
/// and the short caption.
std::string assemble_condition_sequence(const Any2CapRecord& record);

/// True when every start marker is closed by its own end marker before any
/// other marker opens.
bool markers_balanced(std::string_view text);

enum class Stage { kIdentities, kHumanPose, kCamera, kDepth };
/// Training order of the condition stages.
inline constexpr Stage kStageOrder[] = {Stage::kIdentities, Stage::kHumanPose, Stage::kCamera, Stage::kDepth};

std::string_view stage_name(Stage s);
std::optional<Stage> stage_from_name(std::string_view name);
ConditionKind stage_condition(Stage s);
/// 0-based position of `s` in kStageOrder.
int stage_position(Stage s);

struct StageConfig {
  Stage stage = Stage::kIdentities;
  double joint_train_ratio = 0;
  double sentence_dropout_rate = 0;
  double condition_dropout_rate = 0;
  std::uint64_t seed = 0;
};

/// Ratio and dropout rates used for each stage in training.
StageConfig default_stage_config(Stage s, std::uint64_t seed = 0);

struct ManifestEntry {
  enum class Source { kData, kAux };
  Source source = Source::kData;
  std::string ref;
  std::uint64_t seed = 0;  ///< per-entry seed for load-time dropout
  bool operator==(const ManifestEntry&) const = default;
};

struct TrainingManifest {
  StageConfig config;
  std::vector<ManifestEntry> entries;

  std::size_t aux_count() const;
  bool operator==(const TrainingManifest&) const;
};

/// Records whose conditions include the stage's condition kind.
std::vector<Any2CapRecord> records_for_stage(std::span<const Any2CapRecord> records, Stage stage);

/// Shuffles the stage records and a seeded sample of round(r*n/(1-r))
/// auxiliary refs, then spreads the auxiliary entries evenly between the
/// data entries. Throws InvalidArgument for a ratio outside
/// {0, 0.4, 0.6, 0.8}, an empty record list, or a pool that is too small.
TrainingManifest build_manifest(std::span<const Any2CapRecord> records, std::span<const std::string> aux_pool,
                                const StageConfig& config);

/// One header line with the stage configuration, then one
/// {source, ref, stage, seed} line per entry.
void write_manifest(const TrainingManifest& manifest, std::ostream& out);
TrainingManifest read_manifest(std::istream& in);

}  // namespace anycap
