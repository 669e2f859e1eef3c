#include "anycap/pose.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>

#include "anycap/error.hpp"
#include "anycap/strings.hpp"

namespace anycap {

PoseTrack::PoseTrack(std::string person_id, std::size_t keypoints_per_frame)
    : person_id_(std::move(person_id)), k_(keypoints_per_frame) {
  if (k_ == 0) throw InvalidArgument("pose track needs at least one keypoint");
}

void PoseTrack::add_frame(std::int64_t frame_idx, std::vector<Keypoint> keypoints) {
  if (keypoints.size() != k_)
    throw InvalidArgument("frame " + std::to_string(frame_idx) + " has " + std::to_string(keypoints.size()) +
                          " keypoints, track expects " + std::to_string(k_));
  for (const auto& kp : keypoints)
    if (!std::isfinite(kp.x) || !std::isfinite(kp.y) || !std::isfinite(kp.confidence))
      throw InvalidArgument("frame " + std::to_string(frame_idx) + " has a non-finite keypoint value");
  frame_indices_.push_back(frame_idx);
  data_.insert(data_.end(), keypoints.begin(), keypoints.end());
}

namespace {

std::string person_key(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw InvalidArgument("person_id must be a string or an integer");
}

struct RawFrame {
  std::int64_t frame_idx;
  std::vector<Keypoint> keypoints;
  std::size_t line;
};

}  // namespace

std::vector<PoseTrack> parse_pose_tracks(std::istream& in) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<RawFrame>> by_person;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (strings::is_blank(line)) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError("pose record is not a JSON object", lineno);
    try {
      std::string person = person_key(j.at("person_id"));
      RawFrame f{j.at("frame_idx").get<std::int64_t>(), {}, lineno};
      for (const auto& kp : j.at("keypoints")) {
        if (!kp.is_array() || kp.size() != 3) throw InvalidArgument("each keypoint must be [x, y, conf]");
        f.keypoints.push_back({kp[0].get<double>(), kp[1].get<double>(), kp[2].get<double>()});
      }
      if (!by_person.count(person)) order.push_back(person);
      by_person[person].push_back(std::move(f));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("pose record: ") + e.what(), lineno);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), lineno);
    }
  }

  std::vector<PoseTrack> tracks;
  for (const auto& person : order) {
    auto& frames = by_person[person];
    std::stable_sort(frames.begin(), frames.end(),
                     [](const RawFrame& a, const RawFrame& b) { return a.frame_idx < b.frame_idx; });
    PoseTrack track(person, frames.front().keypoints.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
      if (i > 0 && frames[i].frame_idx == frames[i - 1].frame_idx)
        throw ParseError("person " + person + " has two records for frame " + std::to_string(frames[i].frame_idx),
                         frames[i].line);
      try {
        track.add_frame(frames[i].frame_idx, std::move(frames[i].keypoints));
      } catch (const InvalidArgument& e) {
        throw ParseError("person " + person + ": " + e.what(), frames[i].line);
      }
    }
    tracks.push_back(std::move(track));
  }
  return tracks;
}

std::vector<PoseTrack> load_pose_tracks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pose file " + path.string());
  return parse_pose_tracks(in);
}

void write_pose_tracks(const std::vector<PoseTrack>& tracks, std::ostream& out) {
  for (const auto& t : tracks) {
    for (std::size_t n = 0; n < t.frames(); ++n) {
      nlohmann::json kps = nlohmann::json::array();
      for (std::size_t k = 0; k < t.keypoints(); ++k) {
        const auto& kp = t.at(n, k);
        kps.push_back({kp.x, kp.y, kp.confidence});
      }
      out << nlohmann::json{{"person_id", t.person_id()}, {"frame_idx", t.frame_indices()[n]}, {"keypoints", kps}}
                 .dump()
          << '\n';
    }
  }
}

void SkeletonTopology::validate() const {
  if (keypoint_names.empty()) throw InvalidArgument("topology has no keypoints");
  for (const auto& [a, b] : bones) {
    if (a >= size() || b >= size())
      throw InvalidArgument("bone (" + std::to_string(a) + ", " + std::to_string(b) + ") is out of range");
    if (a == b) throw InvalidArgument("bone (" + std::to_string(a) + ", " + std::to_string(b) + ") is a self-loop");
  }
}

SkeletonTopology SkeletonTopology::coco17() {
  SkeletonTopology t;
  t.keypoint_names = {"nose",        "left_eye",     "right_eye",     "left_ear",   "right_ear",  "left_shoulder",
                      "right_shoulder", "left_elbow", "right_elbow",  "left_wrist", "right_wrist", "left_hip",
                      "right_hip",   "left_knee",    "right_knee",    "left_ankle", "right_ankle"};
  t.bones = {{15, 13}, {13, 11}, {16, 14}, {14, 12}, {11, 12}, {5, 11}, {6, 12}, {5, 6}, {5, 7}, {6, 8},
             {7, 9},   {8, 10},  {1, 2},   {0, 1},   {0, 2},   {1, 3},  {2, 4},  {3, 5}, {4, 6}};
  return t;
}

SkeletonTopology SkeletonTopology::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open topology file " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError(path.string() + ": not valid JSON");
  SkeletonTopology t;
  try {
    t.keypoint_names = j.at("keypoints").get<std::vector<std::string>>();
    for (const auto& b : j.at("bones")) t.bones.emplace_back(b.at(0).get<std::size_t>(), b.at(1).get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  t.validate();
  return t;
}

std::size_t Mask::count() const { return static_cast<std::size_t>(std::count(pixels.begin(), pixels.end(), 1)); }

namespace {

std::ptrdiff_t to_pixel(double normalized, std::size_t extent) {
  double p = std::floor(normalized * static_cast<double>(extent));
  p = std::clamp(p, 0.0, static_cast<double>(extent - 1));
  return static_cast<std::ptrdiff_t>(p);
}

void plot(Mask& m, std::ptrdiff_t x, std::ptrdiff_t y) {
  if (x < 0 || y < 0 || x >= static_cast<std::ptrdiff_t>(m.width) || y >= static_cast<std::ptrdiff_t>(m.height)) return;
  m.pixels[static_cast<std::size_t>(y) * m.width + static_cast<std::size_t>(x)] = 1;
}

// Integer line stepping along the major axis; the minor coordinate is the
// exact interpolant rounded half up. Endpoints are put in a fixed order so
// a bone draws the same pixels whichever way round it is listed.
void draw_line(Mask& m, std::ptrdiff_t x0, std::ptrdiff_t y0, std::ptrdiff_t x1, std::ptrdiff_t y1) {
  if (std::pair(x1, y1) < std::pair(x0, y0)) {
    std::swap(x0, x1);
    std::swap(y0, y1);
  }
  const std::ptrdiff_t dx = x1 - x0, dy = y1 - y0;
  const std::ptrdiff_t steps = std::max(std::abs(dx), std::abs(dy));
  if (steps == 0) {
    plot(m, x0, y0);
    return;
  }
  auto offset = [steps](std::ptrdiff_t t, std::ptrdiff_t d) {
    const std::ptrdiff_t mag = (2 * t * std::abs(d) + steps) / (2 * steps);
    return d < 0 ? -mag : mag;
  };
  for (std::ptrdiff_t t = 0; t <= steps; ++t) plot(m, x0 + offset(t, dx), y0 + offset(t, dy));
}

}  // namespace

std::vector<Mask> rasterize_pose(const PoseTrack& track, const SkeletonTopology& topology, std::size_t height,
                                 std::size_t width, double conf_min) {
  if (height < 8 || width < 8) throw InvalidArgument("rasterize_pose: H and W must be >= 8");
  topology.validate();
  if (topology.size() != track.keypoints())
    throw ShapeError("topology has " + std::to_string(topology.size()) + " keypoints, track has " +
                     std::to_string(track.keypoints()));
  std::vector<Mask> out;
  out.reserve(track.frames());
  for (std::size_t n = 0; n < track.frames(); ++n) {
    Mask m{height, width, std::vector<std::uint8_t>(height * width, 0)};
    auto visible = [&](std::size_t k) { return track.at(n, k).confidence >= conf_min; };
    auto px = [&](std::size_t k) { return to_pixel(track.at(n, k).x, width); };
    auto py = [&](std::size_t k) { return to_pixel(track.at(n, k).y, height); };
    for (const auto& [a, b] : topology.bones)
      if (visible(a) && visible(b)) draw_line(m, px(a), py(a), px(b), py(b));
    for (std::size_t k = 0; k < track.keypoints(); ++k) {
      if (!visible(k)) continue;
      for (std::ptrdiff_t dy = -1; dy <= 1; ++dy)
        for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) plot(m, px(k) + dx, py(k) + dy);
    }
    out.push_back(std::move(m));
  }
  return out;
}

PoseAccuracy pose_accuracy(const PoseTrack& pred, const PoseTrack& gt, double alpha) {
  if (pred.frames() != gt.frames() || pred.keypoints() != gt.keypoints())
    throw ShapeError("pose shapes differ: pred " + std::to_string(pred.frames()) + "x" +
                     std::to_string(pred.keypoints()) + ", gt " + std::to_string(gt.frames()) + "x" +
                     std::to_string(gt.keypoints()));
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be non-negative");
  constexpr double kVisible = 0.5;
  PoseAccuracy acc;
  for (std::size_t n = 0; n < gt.frames(); ++n) {
    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = -min_x;
    bool any = false;
    for (std::size_t k = 0; k < gt.keypoints(); ++k) {
      const auto& g = gt.at(n, k);
      if (g.confidence < kVisible) continue;
      any = true;
      min_x = std::min(min_x, g.x);
      max_x = std::max(max_x, g.x);
      min_y = std::min(min_y, g.y);
      max_y = std::max(max_y, g.y);
    }
    if (!any) continue;
    const double threshold = alpha * std::max(max_x - min_x, max_y - min_y);
    for (std::size_t k = 0; k < gt.keypoints(); ++k) {
      const auto& g = gt.at(n, k);
      if (g.confidence < kVisible) continue;
      const auto& p = pred.at(n, k);
      ++acc.evaluated;
      if (std::hypot(p.x - g.x, p.y - g.y) <= threshold) ++acc.correct;
    }
  }
  if (acc.evaluated == 0) throw InvalidArgument("pose_accuracy: no ground-truth keypoint has confidence >= 0.5");
  acc.percent = 100.0 * static_cast<double>(acc.correct) / static_cast<double>(acc.evaluated);
  return acc;
}

}  // namespace anycap
