#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace anycap {

struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
};

/// World-to-camera pose: x_cam = R x_world + t. Camera axes follow the
/// usual image convention: +x right, +y down, +z forward.
struct CameraPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  Intrinsics intrinsics;

  /// Camera center in world coordinates, -R^T t.
  Eigen::Vector3d center() const { return -rotation.transpose() * translation; }
};

struct CameraTrajectory {
  std::vector<std::int64_t> frame_indices;
  std::vector<CameraPose> poses;
  /// Image size the intrinsics refer to; 0 when unknown.
  int width = 0;
  int height = 0;

  std::size_t size() const { return poses.size(); }
};

/// Throws InvalidArgument unless R^T R = I and det R = 1 within `tol`.
void check_rotation(const Eigen::Matrix3d& r, double tol = 1e-6);

/// Nearest rotation matrix in the Frobenius sense (SVD projection).
Eigen::Matrix3d project_to_rotation(const Eigen::Matrix3d& m);

struct TrajectoryLoadOptions {
  /// fx, cx are fractions of the width and fy, cy of the height.
  bool normalized_intrinsics = false;
  int width = 0;
  int height = 0;
  /// Text files carry few digits, so rotations are accepted within this
  /// tolerance and then projected onto SO(3).
  double rotation_tolerance = 1e-4;
};

/// One frame per line:
///   frame_idx fx fy cx cy r11 r12 r13 t1 r21 r22 r23 t2 r31 r32 r33 t3
/// Blank lines and lines starting with '#' are skipped. Throws ParseError
/// with the 1-based line number on malformed input.
CameraTrajectory parse_trajectory(std::istream& in, const TrajectoryLoadOptions& opts = {});
CameraTrajectory load_trajectory(const std::filesystem::path& path, const TrajectoryLoadOptions& opts = {});
void save_trajectory(const CameraTrajectory& traj, std::ostream& out);

/// Re-expresses every pose relative to the first camera, which becomes the
/// identity. Composing a result with the original first pose gives back the
/// original pose.
CameraTrajectory normalize_to_first(const CameraTrajectory& traj);

/// N x 6 x H x W ray embedding, channels (o x d, d), row-major frames.
struct PlueckerMap {
  std::size_t frames = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> values;

  float at(std::size_t n, std::size_t channel, std::size_t v, std::size_t u) const {
    return values[((n * 6 + channel) * height + v) * width + u];
  }
};

/// Rays through pixel centers (u + 0.5, v + 0.5). If the trajectory records
/// an image size different from W x H, intrinsics are rescaled to the grid.
PlueckerMap pluecker_embedding(const CameraTrajectory& traj, std::size_t height, std::size_t width);

inline constexpr std::uint32_t kPlueckerMagic = 0x524B4C50;  // "PLKR" little-endian
inline constexpr std::uint32_t kPlueckerVersion = 1;

/// Little-endian binary: eight uint32 header words
/// (magic, version, N, 6, H, W, 0, 0) followed by float32 values.
void write_pluecker(const PlueckerMap& map, std::ostream& out);
PlueckerMap read_pluecker(std::istream& in);

enum class Aggregation { kMean, kSum };
std::string_view aggregation_name(Aggregation agg);

/// Geodesic angle between R_pred and R_gt per frame, in degrees. Callers
/// normally first-frame normalize both trajectories beforehand; the metric
/// compares frames as given. With R = Rp Rg^T this is
/// atan2(|vee(R - R^T)| / 2, (tr R - 1) / 2), which equals
/// arccos((tr R - 1) / 2) and stays accurate near zero.
double rot_err(const CameraTrajectory& pred, const CameraTrajectory& gt, Aggregation agg = Aggregation::kMean);

/// Camera centers scaled by 1/max center norm per trajectory (no-op when
/// all centers sit at the origin); per-frame Euclidean distance.
double trans_err(const CameraTrajectory& pred, const CameraTrajectory& gt, Aggregation agg = Aggregation::kMean);

/// Per-frame Frobenius distance between [R | o] matrices, with o scaled as
/// in trans_err.
double cam_mc(const CameraTrajectory& pred, const CameraTrajectory& gt, Aggregation agg = Aggregation::kMean);

enum class Movement {
  kFixed,
  kForward,
  kBackward,
  kLeft,
  kRight,
  kUp,
  kDown,
  kPanLeft,
  kPanRight,
  kTiltUp,
  kTiltDown,
  kRollCw,
  kRollCcw,
};

std::string_view movement_name(Movement m);
std::optional<Movement> movement_from_name(std::string_view name);

struct MovementThresholds {
  double rotation_degrees = 5.0;
  /// Fraction of the largest camera-center distance from the first frame.
  double translation_fraction = 0.05;
  /// Displacements at or below this are noise regardless of the fraction.
  double translation_floor = 1e-9;
};

/// Net camera motion from first to last frame (after first-frame
/// normalization), split into translation along camera axes and
/// yaw/pitch/roll with R_cam_to_world = Ry(yaw) Rx(pitch) Rz(roll).
struct NetMotion {
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double max_center_norm = 0.0;
  double yaw_deg = 0.0;    ///< > 0: pans right
  double pitch_deg = 0.0;  ///< > 0: tilts up
  double roll_deg = 0.0;   ///< > 0: rolls clockwise as seen from behind the camera
};
NetMotion net_motion(const CameraTrajectory& traj);

/// Labels in enum order; [fixed] when no threshold is exceeded. Throws
/// InvalidArgument for fewer than two frames.
std::vector<Movement> classify_movement(const CameraTrajectory& traj, const MovementThresholds& thresholds = {});

/// "pan to the right", "tilt up", ...; phrases joined by ", ".
std::string describe_movement(std::span<const Movement> labels);
/// Same, from label names; throws InvalidArgument on an unknown name.
std::string describe_movement(std::span<const std::string> label_names);

}  // namespace anycap
