#pragma once

// Grayscale raster, PGM (P5) I/O, resampling and scale pyramids.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "biocrypt/bytes.hpp"
#include "biocrypt/error.hpp"

namespace biocrypt {

/// Side of the square detection window, in pixels.
inline constexpr int kWindowSide = 64;

/// 8-bit single-channel image, row-major.
class GrayImage {
 public:
  GrayImage() = default;

  GrayImage(int width, int height, std::uint8_t fill = 0) : width_(width), height_(height) {
    if (width < 1 || height < 1) fail(Errc::invalid_argument, "image dimensions must be positive");
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 1 || height < 1) fail(Errc::invalid_argument, "image dimensions must be positive");
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
      fail(Errc::invalid_argument, "pixel count does not match dimensions");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

  /// Edge-replicating access.
  std::uint8_t clamped(int x, int y) const {
    return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
  }

  const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }

  GrayImage crop(int x, int y, int w, int h) const {
    if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > width_ || y + h > height_)
      fail(Errc::invalid_argument, "crop rectangle outside image");
    GrayImage out(w, h);
    for (int row = 0; row < h; ++row)
      std::copy_n(pixels_.begin() + static_cast<std::ptrdiff_t>(index(x, y + row)), w,
                  out.pixels_.begin() + static_cast<std::ptrdiff_t>(row) * w);
    return out;
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

namespace detail {

inline bool is_pnm_space(std::uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

// Reads one unsigned decimal header field, skipping whitespace and '#' comments.
inline int read_header_field(ByteView raw, std::size_t& pos) {
  for (;;) {
    while (pos < raw.size() && is_pnm_space(raw[pos])) ++pos;
    if (pos < raw.size() && raw[pos] == '#') {
      while (pos < raw.size() && raw[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  if (pos >= raw.size()) fail(Errc::bad_format, "truncated PGM header");
  if (raw[pos] < '0' || raw[pos] > '9') fail(Errc::bad_format, "non-numeric PGM header field");
  long value = 0;
  while (pos < raw.size() && raw[pos] >= '0' && raw[pos] <= '9') {
    value = value * 10 + (raw[pos] - '0');
    if (value > 1'000'000) fail(Errc::bad_format, "PGM header field out of range");
    ++pos;
  }
  if (pos < raw.size() && !is_pnm_space(raw[pos])) fail(Errc::bad_format, "non-numeric PGM header field");
  return static_cast<int>(value);
}

}  // namespace detail

/// Parses a binary P5 PGM with maxval 255.
inline GrayImage load_pgm(ByteView raw) {
  if (raw.size() < 2 || raw[0] != 'P' || raw[1] != '5') fail(Errc::bad_format, "wrong magic number (expected P5)");
  std::size_t pos = 2;
  if (pos >= raw.size() || !detail::is_pnm_space(raw[pos])) fail(Errc::bad_format, "wrong magic number (expected P5)");
  int width = detail::read_header_field(raw, pos);
  int height = detail::read_header_field(raw, pos);
  int maxval = detail::read_header_field(raw, pos);
  if (maxval != 255) fail(Errc::bad_format, "unsupported maxval " + std::to_string(maxval));
  if (width < 1 || height < 1) fail(Errc::bad_format, "PGM dimensions must be positive");
  if (pos >= raw.size()) fail(Errc::bad_format, "truncated pixel data");
  ++pos;  // single whitespace byte
  auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (raw.size() - pos < count) fail(Errc::bad_format, "truncated pixel data");
  auto first = raw.begin() + static_cast<std::ptrdiff_t>(pos);
  return GrayImage(width, height, std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(count)));
}

inline Bytes save_pgm(const GrayImage& img) {
  std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

inline GrayImage read_pgm_file(const std::filesystem::path& path) { return load_pgm(read_file(path)); }

inline void write_pgm_file(const std::filesystem::path& path, const GrayImage& img) {
  write_file_atomic(path, save_pgm(img));
}

/// ITU-R BT.601 luma, rounded half away from zero.
constexpr std::uint8_t to_grayscale(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  double y = 0.299 * r + 0.587 * g + 0.114 * b;
  double rounded = static_cast<double>(static_cast<long>(y + 0.5));
  return static_cast<std::uint8_t>(std::clamp(rounded, 0.0, 255.0));
}

/// Bilinear resampling with pixel-center alignment and edge clamping.
inline GrayImage resize_bilinear(const GrayImage& img, int new_w, int new_h) {
  if (new_w < 1 || new_h < 1) fail(Errc::invalid_argument, "zero target dimension");
  if (new_w == img.width() && new_h == img.height()) return img;

  const double sx = static_cast<double>(img.width()) / new_w;
  const double sy = static_cast<double>(img.height()) / new_h;

  struct Tap {
    int lo, hi;
    double t;
  };
  auto taps = [](int out_len, int in_len, double scale) {
    std::vector<Tap> v(static_cast<std::size_t>(out_len));
    for (int i = 0; i < out_len; ++i) {
      double src = std::clamp((i + 0.5) * scale - 0.5, 0.0, static_cast<double>(in_len - 1));
      int lo = static_cast<int>(std::floor(src));
      int hi = std::min(lo + 1, in_len - 1);
      v[static_cast<std::size_t>(i)] = {lo, hi, src - lo};
    }
    return v;
  };
  const auto xs = taps(new_w, img.width(), sx);
  const auto ys = taps(new_h, img.height(), sy);

  GrayImage out(new_w, new_h);
  for (int y = 0; y < new_h; ++y) {
    const Tap& ty = ys[static_cast<std::size_t>(y)];
    for (int x = 0; x < new_w; ++x) {
      const Tap& tx = xs[static_cast<std::size_t>(x)];
      double top = img.at(tx.lo, ty.lo) * (1.0 - tx.t) + img.at(tx.hi, ty.lo) * tx.t;
      double bottom = img.at(tx.lo, ty.hi) * (1.0 - tx.t) + img.at(tx.hi, ty.hi) * tx.t;
      double v = top * (1.0 - ty.t) + bottom * ty.t;
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return out;
}

inline constexpr double kDefaultPyramidScale = 1.25;

/// Successively downscaled copies of an image; level 0 is the original.
struct Pyramid {
  std::vector<GrayImage> levels;
  double scale_factor = kDefaultPyramidScale;
};

/// Level k has dimensions floor(level[k-1] / scale_factor); generation stops
/// before either side would drop below `min_side`.
inline Pyramid build_pyramid(const GrayImage& img, double scale_factor = kDefaultPyramidScale,
                             int min_side = kWindowSide) {
  if (!(scale_factor > 1.0)) fail(Errc::invalid_argument, "pyramid scale factor must exceed 1");
  if (min_side < kWindowSide) fail(Errc::invalid_argument, "pyramid min_side must be at least the window side");
  if (img.width() < kWindowSide || img.height() < kWindowSide)
    fail(Errc::too_small, "image smaller than the 64x64 detection window");

  Pyramid p;
  p.scale_factor = scale_factor;
  p.levels.push_back(img);
  for (;;) {
    const GrayImage& prev = p.levels.back();
    int w = static_cast<int>(std::floor(prev.width() / scale_factor));
    int h = static_cast<int>(std::floor(prev.height() / scale_factor));
    if (w < min_side || h < min_side) break;
    p.levels.push_back(resize_bilinear(prev, w, h));
  }
  return p;
}

}  // namespace biocrypt
