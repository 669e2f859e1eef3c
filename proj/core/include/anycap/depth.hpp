#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace anycap {

/// N frames of H x W non-negative depth values.
class DepthSequence {
 public:
  DepthSequence() = default;
  /// Throws InvalidArgument if the value count is not N*H*W or a value is
  /// negative or not finite.
  DepthSequence(std::size_t frames, std::size_t height, std::size_t width, std::vector<double> values);

  std::size_t frames() const { return frames_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  const std::vector<double>& values() const { return values_; }
  double at(std::size_t n, std::size_t row, std::size_t col) const {
    return values_[(n * height_ + row) * width_ + col];
  }

 private:
  std::size_t frames_ = 0, height_ = 0, width_ = 0;
  std::vector<double> values_;
};

inline constexpr std::uint32_t kDepthMagic = 0x48545044;  // "DPTH" little-endian
inline constexpr std::uint32_t kDepthVersion = 1;

/// Little-endian binary: uint32 header (magic, version, N, H, W), then
/// float32 values. Values are held in double precision in memory.
void write_depth(const DepthSequence& depth, std::ostream& out);
DepthSequence read_depth(std::istream& in);

/// Binary 16-bit PGM (P5, maxval <= 65535) for a single frame.
void write_pgm16(const std::filesystem::path& path, std::size_t height, std::size_t width,
                 const std::vector<std::uint16_t>& values);
/// Manifest: one frame image path per line, relative to the manifest's
/// directory; blank lines and '#' comments are skipped.
DepthSequence read_depth_manifest(const std::filesystem::path& manifest);

/// Opens `path` as a binary depth file, or as a frame manifest when the
/// extension is .txt or .manifest.
DepthSequence load_depth(const std::filesystem::path& path);

/// Mean absolute error after per-frame min-max normalization to [0, 1]
/// (a constant frame maps to all zeros). Throws ShapeError on mismatch.
double depth_mae(const DepthSequence& pred, const DepthSequence& gt);

}  // namespace anycap
