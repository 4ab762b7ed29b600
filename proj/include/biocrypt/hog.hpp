#pragma once

// Histogram of Oriented Gradients over a 64x64 window: 8x8-pixel cells,
// 9 unsigned orientation bins, 2x2-cell blocks at a one-cell stride, L2-Hys.

#include <cmath>
#include <numbers>
#include <vector>

#include "biocrypt/error.hpp"
#include "biocrypt/image.hpp"

namespace biocrypt {

namespace hog_params {
inline constexpr int kCellSize = 8;
inline constexpr int kBins = 9;
inline constexpr double kBinWidth = 180.0 / kBins;
inline constexpr int kBlockCells = 2;
inline constexpr double kEpsilon = 1e-5;
inline constexpr double kClip = 0.2;
}  // namespace hog_params

/// ((W/8 - 1) * (H/8 - 1) * 36) for a W x H window.
constexpr std::size_t hog_length(int width, int height) {
  using namespace hog_params;
  return static_cast<std::size_t>(width / kCellSize - 1) * static_cast<std::size_t>(height / kCellSize - 1) *
         kBlockCells * kBlockCells * kBins;
}

inline constexpr std::size_t kDescriptorLength = hog_length(kWindowSide, kWindowSide);
static_assert(kDescriptorLength == 1764);

struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> magnitude;    ///< >= 0
  std::vector<double> orientation;  ///< degrees in [0, 180)

  double mag(int x, int y) const { return magnitude[static_cast<std::size_t>(y * width + x)]; }
  double angle(int x, int y) const { return orientation[static_cast<std::size_t>(y * width + x)]; }
};

struct CellGrid {
  int cells_x = 0;
  int cells_y = 0;
  std::vector<double> histograms;  ///< cells_y * cells_x * 9, row-major by cell

  const double* cell(int cx, int cy) const {
    return histograms.data() + static_cast<std::size_t>((cy * cells_x + cx) * hog_params::kBins);
  }
  double* cell(int cx, int cy) {
    return histograms.data() + static_cast<std::size_t>((cy * cells_x + cx) * hog_params::kBins);
  }
};

struct HogDescriptor {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const HogDescriptor&, const HogDescriptor&) = default;
};

/// Unsigned gradient angle in degrees, folded into [0, 180).
inline double unsigned_orientation(double gx, double gy) {
  double deg = std::atan2(gy, gx) * (180.0 / std::numbers::pi);
  if (deg < 0.0) deg += 180.0;
  if (deg >= 180.0) deg -= 180.0;
  return deg;
}

/// Centered [-1, 0, 1] differences with edge replication.
inline GradientField compute_gradients(const GrayImage& img) {
  if (img.width() < 3 || img.height() < 3) fail(Errc::too_small, "gradient input must be at least 3x3");
  GradientField f;
  f.width = img.width();
  f.height = img.height();
  const auto n = static_cast<std::size_t>(f.width) * static_cast<std::size_t>(f.height);
  f.magnitude.resize(n);
  f.orientation.resize(n);
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      double gx = static_cast<double>(img.clamped(x + 1, y)) - static_cast<double>(img.clamped(x - 1, y));
      double gy = static_cast<double>(img.clamped(x, y + 1)) - static_cast<double>(img.clamped(x, y - 1));
      auto i = static_cast<std::size_t>(y * f.width + x);
      f.magnitude[i] = std::sqrt(gx * gx + gy * gy);
      f.orientation[i] = unsigned_orientation(gx, gy);
    }
  }
  return f;
}

/// Splits a magnitude between the two nearest bin centers (10 + 20k degrees),
/// wrapping around 0/180.
inline void vote_orientation(double* hist, double magnitude, double angle_deg) {
  using namespace hog_params;
  double pos = angle_deg / kBinWidth - 0.5;
  double lo = std::floor(pos);
  double frac = pos - lo;
  int lo_bin = (static_cast<int>(lo) + kBins) % kBins;
  int hi_bin = (lo_bin + 1) % kBins;
  hist[lo_bin] += magnitude * (1.0 - frac);
  hist[hi_bin] += magnitude * frac;
}

inline CellGrid cell_histograms(const GradientField& field, int cell_size = hog_params::kCellSize) {
  if (cell_size < 1 || field.width % cell_size != 0 || field.height % cell_size != 0)
    fail(Errc::invalid_argument, "field dimensions not divisible by cell size");
  CellGrid grid;
  grid.cells_x = field.width / cell_size;
  grid.cells_y = field.height / cell_size;
  grid.histograms.assign(static_cast<std::size_t>(grid.cells_x * grid.cells_y * hog_params::kBins), 0.0);
  for (int y = 0; y < field.height; ++y)
    for (int x = 0; x < field.width; ++x)
      vote_orientation(grid.cell(x / cell_size, y / cell_size), field.mag(x, y), field.angle(x, y));
  return grid;
}

/// L2-Hys over overlapping 2x2-cell blocks; blocks are concatenated row-major,
/// cells inside a block row-major.
inline HogDescriptor block_normalize(const CellGrid& grid) {
  using namespace hog_params;
  if (grid.cells_x < kBlockCells || grid.cells_y < kBlockCells)
    fail(Errc::too_small, "cell grid smaller than one block");

  constexpr int block_len = kBlockCells * kBlockCells * kBins;
  const int blocks_x = grid.cells_x - kBlockCells + 1;
  const int blocks_y = grid.cells_y - kBlockCells + 1;

  HogDescriptor d;
  d.values.resize(static_cast<std::size_t>(blocks_x * blocks_y * block_len));
  double* out = d.values.data();

  auto normalize = [](double* v) {
    double sq = 0.0;
    for (int i = 0; i < block_len; ++i) sq += v[i] * v[i];
    const double inv = 1.0 / std::sqrt(sq + kEpsilon * kEpsilon);
    for (int i = 0; i < block_len; ++i) v[i] *= inv;
  };

  for (int by = 0; by < blocks_y; ++by) {
    for (int bx = 0; bx < blocks_x; ++bx) {
      double* block = out;
      for (int cy = 0; cy < kBlockCells; ++cy)
        for (int cx = 0; cx < kBlockCells; ++cx) {
          const double* h = grid.cell(bx + cx, by + cy);
          for (int b = 0; b < kBins; ++b) *out++ = h[b];
        }
      normalize(block);
      for (int i = 0; i < block_len; ++i) block[i] = std::min(block[i], kClip);
      normalize(block);
    }
  }
  return d;
}

/// HOG encoding of an exactly 64x64 window.
inline HogDescriptor hog_descriptor(const GrayImage& window) {
  if (window.width() != kWindowSide || window.height() != kWindowSide)
    fail(Errc::invalid_argument, "HOG window must be exactly 64x64");
  return block_normalize(cell_histograms(compute_gradients(window)));
}

}  // namespace biocrypt
