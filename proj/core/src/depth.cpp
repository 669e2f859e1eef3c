#include "anycap/depth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include "anycap/error.hpp"
#include "anycap/strings.hpp"
#include "binary_io.hpp"

namespace anycap {

DepthSequence::DepthSequence(std::size_t frames, std::size_t height, std::size_t width, std::vector<double> values)
    : frames_(frames), height_(height), width_(width), values_(std::move(values)) {
  if (values_.size() != frames * height * width)
    throw InvalidArgument("depth sequence holds " + std::to_string(values_.size()) + " values, expected " +
                          std::to_string(frames * height * width));
  for (double v : values_)
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("depth values must be finite and non-negative");
}

void write_depth(const DepthSequence& depth, std::ostream& out) {
  for (std::uint32_t w : {kDepthMagic, kDepthVersion, static_cast<std::uint32_t>(depth.frames()),
                          static_cast<std::uint32_t>(depth.height()), static_cast<std::uint32_t>(depth.width())})
    detail::put_u32(out, w);
  for (double v : depth.values()) detail::put_f32(out, static_cast<float>(v));
  if (!out) throw IoError("failed to write depth sequence");
}

DepthSequence read_depth(std::istream& in) {
  if (detail::get_u32(in) != kDepthMagic) throw ParseError("not a depth file (bad magic)");
  if (auto v = detail::get_u32(in); v != kDepthVersion) throw ParseError("unsupported depth version " + std::to_string(v));
  const std::size_t n = detail::get_u32(in), h = detail::get_u32(in), w = detail::get_u32(in);
  std::vector<double> values(n * h * w);
  for (double& v : values) v = detail::get_f32(in);
  return DepthSequence(n, h, w, std::move(values));
}

void write_pgm16(const std::filesystem::path& path, std::size_t height, std::size_t width,
                 const std::vector<std::uint16_t>& values) {
  if (values.size() != height * width) throw InvalidArgument("write_pgm16: value count does not match size");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << width << ' ' << height << "\n65535\n";
  for (std::uint16_t v : values) {
    out.put(static_cast<char>(v >> 8));
    out.put(static_cast<char>(v & 0xff));
  }
}

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

struct PgmFrame {
  std::size_t height, width;
  std::vector<double> values;
};

PgmFrame read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open depth frame " + path.string());
  if (pgm_token(in) != "P5") throw ParseError(path.string() + ": not a binary PGM (P5)");
  std::size_t w = 0, h = 0, maxval = 0;
  try {
    w = std::stoul(pgm_token(in));
    h = std::stoul(pgm_token(in));
    maxval = std::stoul(pgm_token(in));
  } catch (const std::exception&) {
    throw ParseError(path.string() + ": malformed PGM header");
  }
  if (maxval == 0 || maxval > 65535) throw ParseError(path.string() + ": PGM maxval out of range");
  PgmFrame f{h, w, std::vector<double>(h * w)};
  const bool wide = maxval > 255;
  for (double& v : f.values) {
    int hi = in.get();
    int lo = wide ? in.get() : 0;
    if (!in) throw ParseError(path.string() + ": truncated PGM data");
    v = wide ? static_cast<double>((hi << 8) | lo) : static_cast<double>(hi);
  }
  return f;
}

}  // namespace

DepthSequence read_depth_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open depth manifest " + manifest.string());
  const auto dir = manifest.parent_path();
  std::vector<double> values;
  std::size_t frames = 0, height = 0, width = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = strings::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::filesystem::path p(std::string{t});
    if (p.is_relative()) p = dir / p;
    PgmFrame f = read_pgm(p);
    if (frames == 0) {
      height = f.height;
      width = f.width;
    } else if (f.height != height || f.width != width) {
      throw ParseError("frame size differs from the first frame", lineno);
    }
    values.insert(values.end(), f.values.begin(), f.values.end());
    ++frames;
  }
  if (frames == 0) throw ParseError(manifest.string() + ": manifest lists no frames");
  return DepthSequence(frames, height, width, std::move(values));
}

DepthSequence load_depth(const std::filesystem::path& path) {
  const auto ext = path.extension();
  if (ext == ".txt" || ext == ".manifest") return read_depth_manifest(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open depth file " + path.string());
  return read_depth(in);
}

double depth_mae(const DepthSequence& pred, const DepthSequence& gt) {
  if (pred.frames() != gt.frames() || pred.height() != gt.height() || pred.width() != gt.width())
    throw ShapeError("depth shapes differ");
  const std::size_t plane = gt.height() * gt.width();
  if (plane == 0 || gt.frames() == 0) throw InvalidArgument("depth_mae: empty sequence");

  auto normalize = [plane](const std::vector<double>& src, std::size_t n, std::vector<double>& dst) {
    auto first = src.begin() + static_cast<std::ptrdiff_t>(n * plane);
    auto [lo, hi] = std::minmax_element(first, first + static_cast<std::ptrdiff_t>(plane));
    const double min = *lo, range = *hi - min;
    for (std::size_t i = 0; i < plane; ++i)
      dst[i] = range > 0.0 ? (first[static_cast<std::ptrdiff_t>(i)] - min) / range : 0.0;
  };

  std::vector<double> a(plane), b(plane);
  double total = 0.0;
  for (std::size_t n = 0; n < gt.frames(); ++n) {
    normalize(pred.values(), n, a);
    normalize(gt.values(), n, b);
    for (std::size_t i = 0; i < plane; ++i) total += std::abs(a[i] - b[i]);
  }
  return total / static_cast<double>(plane * gt.frames());
}

}  // namespace anycap
