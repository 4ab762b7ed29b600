#pragma once

// Linear SVM window classifier and multi-scale sliding-window face detection.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <thread>
#include <vector>

#include "biocrypt/bytes.hpp"
#include "biocrypt/hog.hpp"
#include "biocrypt/image.hpp"
#include "biocrypt/random.hpp"

namespace biocrypt {

struct LinearSvmModel {
  std::vector<double> weights;
  double bias = 0.0;
  double lambda = 0.01;
  std::uint32_t epochs = 0;
  std::uint64_t seed = 0;

  std::size_t dimension() const noexcept { return weights.size(); }
  friend bool operator==(const LinearSvmModel&, const LinearSvmModel&) = default;
};

inline constexpr double kDefaultLambda = 0.01;
inline constexpr std::uint32_t kDefaultEpochs = 30;
inline constexpr std::uint64_t kDefaultTrainSeed = 7;

struct TrainingSample {
  HogDescriptor descriptor;
  int label = 0;  ///< +1 or -1
};

/// Regularized hinge objective  lambda/2 (|w|^2 + b^2) + mean(max(0, 1 - y (w.x + b))).
inline double svm_objective(std::span<const double> w, double b, double lambda, std::span<const TrainingSample> samples) {
  double reg = std::inner_product(w.begin(), w.end(), w.begin(), b * b);
  double loss = 0.0;
  for (const auto& s : samples) {
    double f = std::inner_product(w.begin(), w.end(), s.descriptor.values.begin(), b);
    loss += std::max(0.0, 1.0 - s.label * f);
  }
  return 0.5 * lambda * reg + loss / static_cast<double>(samples.size());
}

inline double score(const LinearSvmModel& model, const HogDescriptor& d) {
  if (d.size() != model.dimension()) fail(Errc::dimension_mismatch, "descriptor length does not match model");
  return std::inner_product(model.weights.begin(), model.weights.end(), d.values.begin(), model.bias);
}

/// Objective of the averaged iterate after each epoch.
struct TrainingTrace {
  std::vector<double> objective;
};

/// Pegasos-style stochastic subgradient descent with step 1/(lambda t),
/// projection onto the 1/sqrt(lambda) ball, and iterate averaging. The bias
/// is carried as the weight of a constant 1 feature, so it shrinks and
/// projects with the rest of w. Sample order per epoch is a SplitMix64 shuffle, so
/// (samples, lambda, epochs, seed) fully determine the result.
inline LinearSvmModel train_svm(std::span<const TrainingSample> samples, double lambda, std::uint32_t epochs,
                                std::uint64_t seed, TrainingTrace* trace = nullptr) {
  if (samples.empty()) fail(Errc::empty_input, "no training samples");
  if (!(lambda > 0.0)) fail(Errc::invalid_argument, "lambda must be positive");
  const std::size_t dim = samples.front().descriptor.size();
  bool pos = false, neg = false;
  for (const auto& s : samples) {
    if (s.descriptor.size() != dim) fail(Errc::dimension_mismatch, "training descriptors differ in length");
    if (s.label == 1) pos = true;
    else if (s.label == -1) neg = true;
    else fail(Errc::invalid_argument, "labels must be +1 or -1");
  }
  if (!pos || !neg) fail(Errc::single_class, "training set needs both labels");

  std::vector<double> w(dim, 0.0), avg_w(dim, 0.0);
  double b = 0.0, avg_b = 0.0;
  const double radius = 1.0 / std::sqrt(lambda);
  SplitMix64 rng(seed);
  std::uint64_t t = 0;

  for (std::uint32_t epoch = 0; epoch < epochs; ++epoch) {
    for (auto i : shuffled_indices(samples.size(), rng)) {
      const auto& s = samples[i];
      const auto& x = s.descriptor.values;
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double margin = s.label * std::inner_product(w.begin(), w.end(), x.begin(), b);
      const double shrink = 1.0 - eta * lambda;
      for (auto& wj : w) wj *= shrink;
      b *= shrink;
      if (margin < 1.0) {
        for (std::size_t j = 0; j < dim; ++j) w[j] += eta * s.label * x[j];
        b += eta * s.label;
      }
      const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), b * b));
      if (norm > radius) {
        const double k = radius / norm;
        for (auto& wj : w) wj *= k;
        b *= k;
      }
      const double inv_t = 1.0 / static_cast<double>(t);
      for (std::size_t j = 0; j < dim; ++j) avg_w[j] += (w[j] - avg_w[j]) * inv_t;
      avg_b += (b - avg_b) * inv_t;
    }
    if (trace) trace->objective.push_back(svm_objective(avg_w, avg_b, lambda, samples));
  }

  return LinearSvmModel{std::move(avg_w), avg_b, lambda, epochs, seed};
}

inline double training_accuracy(const LinearSvmModel& model, std::span<const TrainingSample> samples) {
  if (samples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& s : samples) correct += (score(model, s.descriptor) > 0.0 ? 1 : -1) == s.label;
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

// Model file: "BSVM", u16 version, u32 dim, f64[dim] weights, f64 bias,
// f64 lambda, u32 epochs, u64 seed; all little-endian.
inline constexpr std::uint16_t kModelVersion = 1;

inline Bytes save_model(const LinearSvmModel& m) {
  ByteWriter w;
  w.raw("BSVM");
  w.le<std::uint16_t>(kModelVersion);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(m.weights.size()));
  for (double v : m.weights) w.le(v);
  w.le(m.bias);
  w.le(m.lambda);
  w.le<std::uint32_t>(m.epochs);
  w.le<std::uint64_t>(m.seed);
  return std::move(w).bytes();
}

inline LinearSvmModel load_model(ByteView raw) {
  ByteReader r(raw);
  auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), "BSVM")) fail(Errc::bad_format, "bad model magic");
  if (r.le<std::uint16_t>() != kModelVersion) fail(Errc::bad_format, "unsupported model version");
  const auto dim = r.le<std::uint32_t>();
  if (r.remaining() < std::size_t{dim} * 8) fail(Errc::bad_format, "truncated record");
  LinearSvmModel m;
  m.weights.resize(dim);
  for (auto& v : m.weights) v = r.le<double>();
  m.bias = r.le<double>();
  m.lambda = r.le<double>();
  m.epochs = r.le<std::uint32_t>();
  m.seed = r.le<std::uint64_t>();
  return m;
}

struct Detection {
  int x = 0;
  int y = 0;
  int side = 0;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

inline double iou(const Detection& a, const Detection& b) {
  const long ix = std::max(0, std::min(a.x + a.side, b.x + b.side) - std::max(a.x, b.x));
  const long iy = std::max(0, std::min(a.y + a.side, b.y + b.side) - std::max(a.y, b.y));
  const long inter = ix * iy;
  const long uni = long{a.side} * a.side + long{b.side} * b.side - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

/// Score descending, then (y, x, side) ascending.
inline bool detection_order(const Detection& a, const Detection& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.y != b.y) return a.y < b.y;
  if (a.x != b.x) return a.x < b.x;
  return a.side < b.side;
}

/// Greedy non-maximum suppression; keeps a box iff its IoU with every box
/// already kept is <= iou_threshold.
inline std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold) {
  std::stable_sort(dets.begin(), dets.end(), detection_order);
  std::vector<Detection> kept;
  for (const auto& d : dets)
    if (std::all_of(kept.begin(), kept.end(), [&](const Detection& k) { return iou(d, k) <= iou_threshold; }))
      kept.push_back(d);
  return kept;
}

struct DetectOptions {
  double threshold = 0.0;
  double iou_threshold = 0.3;
  int stride = hog_params::kCellSize;
  double scale_factor = kDefaultPyramidScale;
  unsigned threads = 1;
};

/// Scores every stride-aligned 64x64 window on every pyramid level, keeps
/// scores above the threshold, maps boxes to level-0 coordinates and runs NMS.
inline std::vector<Detection> detect_faces(const GrayImage& img, const LinearSvmModel& model,
                                           const DetectOptions& opt = {}) {
  if (model.dimension() != kDescriptorLength) fail(Errc::dimension_mismatch, "model is not a 64x64 HOG model");
  if (opt.stride < 1) fail(Errc::invalid_argument, "stride must be positive");
  const Pyramid pyr = build_pyramid(img, opt.scale_factor, kWindowSide);

  struct Window {
    int level, x, y;
  };
  std::vector<Window> windows;
  for (int level = 0; level < static_cast<int>(pyr.levels.size()); ++level) {
    const auto& L = pyr.levels[static_cast<std::size_t>(level)];
    for (int y = 0; y + kWindowSide <= L.height(); y += opt.stride)
      for (int x = 0; x + kWindowSide <= L.width(); x += opt.stride) windows.push_back({level, x, y});
  }

  std::vector<double> scores(windows.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& w = windows[i];
      const auto& L = pyr.levels[static_cast<std::size_t>(w.level)];
      scores[i] = score(model, hog_descriptor(L.crop(w.x, w.y, kWindowSide, kWindowSide)));
    }
  };
  const std::size_t nthreads = std::clamp<std::size_t>(opt.threads, 1, std::max<std::size_t>(1, windows.size()));
  if (nthreads == 1) {
    work(0, windows.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (windows.size() + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t)
      pool.emplace_back(work, std::min(windows.size(), t * chunk), std::min(windows.size(), (t + 1) * chunk));
  }

  std::vector<Detection> candidates;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!(scores[i] > opt.threshold)) continue;
    const auto& w = windows[i];
    const double f = std::pow(opt.scale_factor, w.level);
    Detection d;
    d.side = std::min({static_cast<int>(std::lround(kWindowSide * f)), img.width(), img.height()});
    d.x = std::min(static_cast<int>(std::lround(w.x * f)), img.width() - d.side);
    d.y = std::min(static_cast<int>(std::lround(w.y * f)), img.height() - d.side);
    d.score = scores[i];
    candidates.push_back(d);
  }
  return nms(std::move(candidates), opt.iou_threshold);
}

inline std::vector<Detection> detect_faces(const GrayImage& img, const LinearSvmModel& model, double threshold,
                                           double iou_threshold) {
  DetectOptions opt;
  opt.threshold = threshold;
  opt.iou_threshold = iou_threshold;
  return detect_faces(img, model, opt);
}

}  // namespace biocrypt
