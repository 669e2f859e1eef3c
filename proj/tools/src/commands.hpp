#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anycap/camera.hpp"
#include "anycap/judge.hpp"
#include "report.hpp"

namespace anycap::cli {

/// Bad flag values or combinations; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The inputs were readable but the evaluation cannot be carried out or
/// found violations; exit code 1.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct CommonOptions {
  OutputFormat format = OutputFormat::kJson;
  bool timing = false;
  unsigned jobs = 1;
};

struct CommandResult {
  EvalReport report;
  int exit_code = kExitOk;
};

struct ValidateOptions {
  std::string records;
};

struct ScoreOptions {
  std::string pred, gt;
  std::vector<std::string> metrics{"bleu2", "rouge_l", "meteor", "integrity"};
  std::string embed_endpoint;  ///< empty: seeded mock embeddings
  std::string embed_cache;
  std::uint64_t seed = 0;
};

struct SimilarityOptions {
  std::string records;
  std::string text = "short";  ///< short or structured
  std::size_t frames = 8;
  std::string embed_endpoint, embed_cache;
  std::uint64_t seed = 0;
};

struct IrScoreOptions {
  std::string pred, gt;
  std::string judge_cache;
  std::string judge_endpoint;
  std::string judge_model;
  bool replay = false;
  int max_retries = 3;
  /// Used instead of an HTTP backend when set; not reachable from the command line.
  std::shared_ptr<JudgeBackend> backend;
};

struct CameraOptions {
  std::string pred, gt;
  bool normalized_intrinsics = false;
  int width = 0, height = 0;
  Aggregation agg = Aggregation::kMean;
  bool absolute = false;  ///< skip re-expressing both trajectories relative to their first frame
};

struct PoseOptions {
  std::string pred, gt;
  double alpha = 0.05;
};

struct DepthOptions {
  std::string pred, gt;
};

struct StatsOptions {
  std::string records;
  std::size_t bin_width = 10;
};

struct ManifestOptions {
  std::string records, aux, stage, output;
  std::uint64_t seed = 0;
  std::optional<double> ratio, sentence_rate, condition_rate;
};

struct AssembleOptions {
  std::string records;
};

struct AugmentOptions {
  std::string records, output;
  std::uint64_t seed = 0;
  double sentence_rate = 0.6, condition_rate = 0.6;
};

struct PlueckerOptions {
  std::string traj, output;
  std::size_t height = 0, width = 0;
  bool normalized_intrinsics = false;
  int image_width = 0, image_height = 0;
};

CommandResult cmd_validate(const ValidateOptions& o, const CommonOptions& c);
CommandResult cmd_score(const ScoreOptions& o, const CommonOptions& c);
CommandResult cmd_similarity(const SimilarityOptions& o, const CommonOptions& c);
CommandResult cmd_irscore(const IrScoreOptions& o, const CommonOptions& c);
CommandResult cmd_camera(const CameraOptions& o, const CommonOptions& c);
CommandResult cmd_pose(const PoseOptions& o, const CommonOptions& c);
CommandResult cmd_depth(const DepthOptions& o, const CommonOptions& c);
CommandResult cmd_dataset_stats(const StatsOptions& o, const CommonOptions& c);
CommandResult cmd_dataset_manifest(const ManifestOptions& o, const CommonOptions& c);
CommandResult cmd_dataset_assemble(const AssembleOptions& o, const CommonOptions& c);
CommandResult cmd_augment(const AugmentOptions& o, const CommonOptions& c);
CommandResult cmd_pluecker(const PlueckerOptions& o, const CommonOptions& c);

/// Runs a command, writes its report to `out` and any error to `err`, and
/// maps exceptions to exit codes.
int execute(const std::function<CommandResult()>& command, const CommonOptions& c, std::ostream& out,
            std::ostream& err);

}  // namespace anycap::cli
