#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace anycap {

struct Keypoint {
  double x = 0.0;  ///< normalized image coordinate, 0 = left edge
  double y = 0.0;  ///< normalized image coordinate, 0 = top edge
  double confidence = 0.0;
};

/// One person's keypoints over N frames, K keypoints per frame.
class PoseTrack {
 public:
  PoseTrack() = default;
  PoseTrack(std::string person_id, std::size_t keypoints_per_frame);

  /// Appends a frame; throws InvalidArgument if the keypoint count differs
  /// from the track's K or a coordinate is not finite.
  void add_frame(std::int64_t frame_idx, std::vector<Keypoint> keypoints);

  const std::string& person_id() const { return person_id_; }
  std::size_t frames() const { return frame_indices_.size(); }
  std::size_t keypoints() const { return k_; }
  const std::vector<std::int64_t>& frame_indices() const { return frame_indices_; }
  const Keypoint& at(std::size_t frame, std::size_t k) const { return data_[frame * k_ + k]; }
  Keypoint& at(std::size_t frame, std::size_t k) { return data_[frame * k_ + k]; }

 private:
  std::string person_id_;
  std::size_t k_ = 0;
  std::vector<std::int64_t> frame_indices_;
  std::vector<Keypoint> data_;
};

/// Reads line-delimited records {"person_id", "frame_idx", "keypoints": [[x, y, conf], ...]}.
/// Returns one track per person in order of first appearance, frames sorted
/// by index. Throws ParseError (with line number) on malformed records or a
/// keypoint count that changes within a track.
std::vector<PoseTrack> parse_pose_tracks(std::istream& in);
std::vector<PoseTrack> load_pose_tracks(const std::filesystem::path& path);
void write_pose_tracks(const std::vector<PoseTrack>& tracks, std::ostream& out);

struct SkeletonTopology {
  std::vector<std::string> keypoint_names;
  std::vector<std::pair<std::size_t, std::size_t>> bones;

  /// Throws InvalidArgument on out-of-range or self-loop bones.
  void validate() const;
  std::size_t size() const { return keypoint_names.size(); }

  /// 17-keypoint COCO body skeleton.
  static SkeletonTopology coco17();
  /// JSON file {"keypoints": [names...], "bones": [[i, j], ...]}.
  static SkeletonTopology load(const std::filesystem::path& path);
};

/// Binary H x W frame, row-major, 1 = drawn.
struct Mask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
  std::size_t count() const;
};

/// Draws bones whose endpoints both have confidence >= conf_min as 1-pixel
/// Bresenham lines and those keypoints as 3x3 squares. A normalized
/// coordinate maps to pixel floor(x W), clamped into the image.
std::vector<Mask> rasterize_pose(const PoseTrack& track, const SkeletonTopology& topology, std::size_t height,
                                 std::size_t width, double conf_min = 0.3);

struct PoseAccuracy {
  double percent = 0.0;
  std::size_t correct = 0;
  std::size_t evaluated = 0;
};

/// PCK-style accuracy. Per frame the reference box is the tight box around
/// ground-truth keypoints with confidence >= 0.5; a keypoint is correct when
/// its distance to ground truth is <= alpha * max(box width, box height).
/// Keypoints with ground-truth confidence < 0.5 are not evaluated; counts
/// are pooled over frames. Throws ShapeError on N/K mismatch and
/// InvalidArgument when nothing is evaluable.
PoseAccuracy pose_accuracy(const PoseTrack& pred, const PoseTrack& gt, double alpha = 0.05);

}  // namespace anycap
