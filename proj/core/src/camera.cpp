#include "anycap/camera.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "anycap/error.hpp"
#include "anycap/strings.hpp"
#include "binary_io.hpp"

namespace anycap {

namespace {
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}

void check_rotation(const Eigen::Matrix3d& r, double tol) {
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!(ortho <= tol)) throw InvalidArgument("rotation is not orthonormal (max |R^T R - I| = " + std::to_string(ortho) + ")");
  const double det = r.determinant();
  if (!(std::abs(det - 1.0) <= tol)) throw InvalidArgument("rotation determinant is " + std::to_string(det) + ", not 1");
}

Eigen::Matrix3d project_to_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0) u.col(2) *= -1.0;
  return u * v.transpose();
}

CameraTrajectory parse_trajectory(std::istream& in, const TrajectoryLoadOptions& opts) {
  if (opts.normalized_intrinsics && (opts.width <= 0 || opts.height <= 0))
    throw InvalidArgument("normalized intrinsics need a positive image width and height");
  CameraTrajectory traj;
  traj.width = opts.width;
  traj.height = opts.height;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view t = strings::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = strings::split_ws(t);
    if (fields.size() != 17)
      throw ParseError("expected 17 values (frame_idx, 4 intrinsics, 12 extrinsics), got " +
                           std::to_string(fields.size()),
                       lineno);
    std::array<double, 17> v{};
    for (std::size_t i = 0; i < fields.size(); ++i) {
      std::string field(fields[i]);
      std::size_t used = 0;
      try {
        v[i] = std::stod(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != field.size() || !std::isfinite(v[i]))
        throw ParseError("value " + std::to_string(i + 1) + " ('" + field + "') is not a finite number", lineno);
    }
    const double frame = v[0];
    if (frame != std::floor(frame)) throw ParseError("frame index must be an integer", lineno);
    const auto idx = static_cast<std::int64_t>(frame);
    if (!traj.frame_indices.empty() && idx <= traj.frame_indices.back())
      throw ParseError("frame indices must be strictly increasing", lineno);

    CameraPose pose;
    pose.intrinsics = {v[1], v[2], v[3], v[4]};
    if (opts.normalized_intrinsics) {
      pose.intrinsics.fx *= opts.width;
      pose.intrinsics.cx *= opts.width;
      pose.intrinsics.fy *= opts.height;
      pose.intrinsics.cy *= opts.height;
    }
    if (!(pose.intrinsics.fx > 0.0 && pose.intrinsics.fy > 0.0))
      throw ParseError("focal lengths must be positive", lineno);
    Eigen::Matrix3d r;
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) r(row, col) = v[5 + row * 4 + col];
      pose.translation(row) = v[5 + row * 4 + 3];
    }
    try {
      check_rotation(r, opts.rotation_tolerance);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), lineno);
    }
    pose.rotation = project_to_rotation(r);
    traj.frame_indices.push_back(idx);
    traj.poses.push_back(pose);
  }
  if (traj.poses.empty()) throw ParseError("trajectory has no frames");
  return traj;
}

CameraTrajectory load_trajectory(const std::filesystem::path& path, const TrajectoryLoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory file " + path.string());
  try {
    return parse_trajectory(in, opts);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

void save_trajectory(const CameraTrajectory& traj, std::ostream& out) {
  out << std::setprecision(17);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& p = traj.poses[i];
    out << traj.frame_indices[i] << ' ' << p.intrinsics.fx << ' ' << p.intrinsics.fy << ' ' << p.intrinsics.cx
        << ' ' << p.intrinsics.cy;
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) out << ' ' << p.rotation(row, col);
      out << ' ' << p.translation(row);
    }
    out << '\n';
  }
}

CameraTrajectory normalize_to_first(const CameraTrajectory& traj) {
  if (traj.poses.empty()) throw InvalidArgument("normalize_to_first: empty trajectory");
  CameraTrajectory out = traj;
  const Eigen::Matrix3d r0t = traj.poses.front().rotation.transpose();
  const Eigen::Vector3d t0 = traj.poses.front().translation;
  for (auto& p : out.poses) {
    const Eigen::Matrix3d r = p.rotation * r0t;
    p.translation = p.translation - r * t0;
    p.rotation = r;
  }
  out.poses.front().rotation.setIdentity();
  out.poses.front().translation.setZero();
  return out;
}

PlueckerMap pluecker_embedding(const CameraTrajectory& traj, std::size_t height, std::size_t width) {
  if (height < 1 || width < 1) throw InvalidArgument("pluecker_embedding: H and W must be >= 1");
  const double sx = traj.width > 0 ? static_cast<double>(width) / traj.width : 1.0;
  const double sy = traj.height > 0 ? static_cast<double>(height) / traj.height : 1.0;

  PlueckerMap map;
  map.frames = traj.size();
  map.height = height;
  map.width = width;
  map.values.resize(map.frames * 6 * height * width);
  const std::size_t plane = height * width;

  for (std::size_t n = 0; n < traj.size(); ++n) {
    const auto& pose = traj.poses[n];
    const double fx = pose.intrinsics.fx * sx, fy = pose.intrinsics.fy * sy;
    const double cx = pose.intrinsics.cx * sx, cy = pose.intrinsics.cy * sy;
    if (!(fx != 0.0 && fy != 0.0)) throw InvalidArgument("pluecker_embedding: singular intrinsics at frame " + std::to_string(n));
    const Eigen::Matrix3d rt = pose.rotation.transpose();
    const Eigen::Vector3d origin = pose.center();
    float* base = map.values.data() + n * 6 * plane;
    for (std::size_t v = 0; v < height; ++v) {
      for (std::size_t u = 0; u < width; ++u) {
        const Eigen::Vector3d cam((static_cast<double>(u) + 0.5 - cx) / fx,
                                  (static_cast<double>(v) + 0.5 - cy) / fy, 1.0);
        const Eigen::Vector3d d = (rt * cam).normalized();
        const Eigen::Vector3d m = origin.cross(d);
        const std::size_t px = v * width + u;
        for (int c = 0; c < 3; ++c) {
          base[static_cast<std::size_t>(c) * plane + px] = static_cast<float>(m(c));
          base[static_cast<std::size_t>(c + 3) * plane + px] = static_cast<float>(d(c));
        }
      }
    }
  }
  return map;
}

void write_pluecker(const PlueckerMap& map, std::ostream& out) {
  for (std::uint32_t w : {kPlueckerMagic, kPlueckerVersion, static_cast<std::uint32_t>(map.frames), 6u,
                          static_cast<std::uint32_t>(map.height), static_cast<std::uint32_t>(map.width), 0u, 0u})
    detail::put_u32(out, w);
  for (float f : map.values) detail::put_f32(out, f);
  if (!out) throw IoError("failed to write Pluecker map");
}

PlueckerMap read_pluecker(std::istream& in) {
  std::array<std::uint32_t, 8> h{};
  for (auto& w : h) w = detail::get_u32(in);
  if (h[0] != kPlueckerMagic) throw ParseError("not a Pluecker map (bad magic)");
  if (h[1] != kPlueckerVersion) throw ParseError("unsupported Pluecker map version " + std::to_string(h[1]));
  if (h[3] != 6) throw ParseError("Pluecker map must have 6 channels");
  PlueckerMap map;
  map.frames = h[2];
  map.height = h[4];
  map.width = h[5];
  map.values.resize(map.frames * 6 * map.height * map.width);
  for (float& f : map.values) f = detail::get_f32(in);
  return map;
}

std::string_view aggregation_name(Aggregation agg) { return agg == Aggregation::kMean ? "mean" : "sum"; }

namespace {

void require_same_length(const CameraTrajectory& a, const CameraTrajectory& b) {
  if (a.size() != b.size())
    throw ShapeError("trajectory length mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  if (a.size() == 0) throw InvalidArgument("empty trajectory");
}

double aggregate(const std::vector<double>& per_frame, Aggregation agg) {
  double s = 0.0;
  for (double x : per_frame) s += x;
  return agg == Aggregation::kSum ? s : s / static_cast<double>(per_frame.size());
}

std::vector<Eigen::Vector3d> scaled_centers(const CameraTrajectory& traj) {
  std::vector<Eigen::Vector3d> c;
  double max_norm = 0.0;
  for (const auto& p : traj.poses) {
    c.push_back(p.center());
    max_norm = std::max(max_norm, c.back().norm());
  }
  if (max_norm > 0.0)
    for (auto& x : c) x /= max_norm;
  return c;
}

}  // namespace

double rot_err(const CameraTrajectory& pred, const CameraTrajectory& gt, Aggregation agg) {
  require_same_length(pred, gt);
  std::vector<double> per_frame;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    // Angle of Rp Rg^T from its sine (skew part) and cosine (trace); stays
    // accurate near 0 where acos of the trace loses precision.
    const Eigen::Matrix3d r = pred.poses[i].rotation * gt.poses[i].rotation.transpose();
    const Eigen::Vector3d skew(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
    per_frame.push_back(std::atan2(0.5 * skew.norm(), 0.5 * (r.trace() - 1.0)) * kRadToDeg);
  }
  return aggregate(per_frame, agg);
}

double trans_err(const CameraTrajectory& pred, const CameraTrajectory& gt, Aggregation agg) {
  require_same_length(pred, gt);
  auto cp = scaled_centers(pred);
  auto cg = scaled_centers(gt);
  std::vector<double> per_frame;
  for (std::size_t i = 0; i < cp.size(); ++i) per_frame.push_back((cp[i] - cg[i]).norm());
  return aggregate(per_frame, agg);
}

double cam_mc(const CameraTrajectory& pred, const CameraTrajectory& gt, Aggregation agg) {
  require_same_length(pred, gt);
  auto cp = scaled_centers(pred);
  auto cg = scaled_centers(gt);
  std::vector<double> per_frame;
  for (std::size_t i = 0; i < cp.size(); ++i) {
    Eigen::Matrix<double, 3, 4> a, b;
    a << pred.poses[i].rotation, cp[i];
    b << gt.poses[i].rotation, cg[i];
    per_frame.push_back((a - b).norm());
  }
  return aggregate(per_frame, agg);
}

namespace {

struct MovementInfo {
  Movement m;
  std::string_view name;
  std::string_view phrase;
};

constexpr std::array<MovementInfo, 13> kMovements = {{
    {Movement::kFixed, "fixed", "fixed"},
    {Movement::kForward, "forward", "forward"},
    {Movement::kBackward, "backward", "backward"},
    {Movement::kLeft, "left", "move to the left"},
    {Movement::kRight, "right", "move to the right"},
    {Movement::kUp, "up", "move up"},
    {Movement::kDown, "down", "move down"},
    {Movement::kPanLeft, "pan_left", "pan to the left"},
    {Movement::kPanRight, "pan_right", "pan to the right"},
    {Movement::kTiltUp, "tilt_up", "tilt up"},
    {Movement::kTiltDown, "tilt_down", "tilt down"},
    {Movement::kRollCw, "roll_cw", "roll clockwise"},
    {Movement::kRollCcw, "roll_ccw", "roll counterclockwise"},
}};

}  // namespace

std::string_view movement_name(Movement m) { return kMovements[static_cast<std::size_t>(m)].name; }

std::optional<Movement> movement_from_name(std::string_view name) {
  for (const auto& info : kMovements)
    if (info.name == name) return info.m;
  return std::nullopt;
}

NetMotion net_motion(const CameraTrajectory& traj) {
  const CameraTrajectory rel = normalize_to_first(traj);
  NetMotion out;
  for (const auto& p : rel.poses) out.max_center_norm = std::max(out.max_center_norm, p.center().norm());
  const auto& last = rel.poses.back();
  out.translation = last.center();
  // Camera-to-world rotation of the last frame, expressed in the first
  // camera's axes: M = Ry(yaw) Rx(pitch) Rz(roll).
  const Eigen::Matrix3d m = last.rotation.transpose();
  out.pitch_deg = std::asin(std::clamp(-m(1, 2), -1.0, 1.0)) * kRadToDeg;
  out.yaw_deg = std::atan2(m(0, 2), m(2, 2)) * kRadToDeg;
  out.roll_deg = std::atan2(m(1, 0), m(1, 1)) * kRadToDeg;
  return out;
}

std::vector<Movement> classify_movement(const CameraTrajectory& traj, const MovementThresholds& thresholds) {
  if (traj.size() < 2) throw InvalidArgument("classify_movement needs at least two frames");
  const NetMotion nm = net_motion(traj);
  const double tthr = std::max(thresholds.translation_fraction * nm.max_center_norm, thresholds.translation_floor);
  const double rthr = thresholds.rotation_degrees;
  std::vector<Movement> labels;
  auto axis = [&](double value, double thr, Movement pos, Movement neg) {
    if (value > thr) labels.push_back(pos);
    else if (value < -thr) labels.push_back(neg);
  };
  axis(nm.translation.z(), tthr, Movement::kForward, Movement::kBackward);
  axis(nm.translation.x(), tthr, Movement::kRight, Movement::kLeft);
  axis(nm.translation.y(), tthr, Movement::kDown, Movement::kUp);
  axis(nm.yaw_deg, rthr, Movement::kPanRight, Movement::kPanLeft);
  axis(nm.pitch_deg, rthr, Movement::kTiltUp, Movement::kTiltDown);
  axis(nm.roll_deg, rthr, Movement::kRollCw, Movement::kRollCcw);
  std::sort(labels.begin(), labels.end());
  if (labels.empty()) labels.push_back(Movement::kFixed);
  return labels;
}

std::string describe_movement(std::span<const Movement> labels) {
  if (labels.empty()) throw InvalidArgument("describe_movement: no labels");
  std::vector<std::string> phrases;
  for (Movement m : labels) phrases.emplace_back(kMovements[static_cast<std::size_t>(m)].phrase);
  return strings::join(phrases, ", ");
}

std::string describe_movement(std::span<const std::string> label_names) {
  std::vector<Movement> labels;
  for (const auto& name : label_names) {
    auto m = movement_from_name(name);
    if (!m) throw InvalidArgument("unknown movement label '" + name + "'");
    labels.push_back(*m);
  }
  return describe_movement(labels);
}

}  // namespace anycap
