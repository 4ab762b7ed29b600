#pragma once

// Procedural face fixtures: seeded cartoon faces, background clutter, and
// scenes with a known face box. Everything is a pure function of its seed.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "biocrypt/detector.hpp"
#include "biocrypt/image.hpp"
#include "biocrypt/random.hpp"

namespace biocrypt::synthetic {

/// Geometry and tone of one identity, in 64x64 window units.
struct FaceParams {
  double face_rx = 22, face_ry = 27;
  double face_cy = 34;
  double skin = 185, hair = 50, background = 110;
  double eye_dx = 10, eye_y = 28, eye_rx = 4, eye_ry = 2.5;
  double brow_y = 21, brow_tilt = 0, brow_len = 9, brow_thick = 2;
  double nose_len = 10, nose_w = 2;
  double mouth_y = 47, mouth_w = 8, mouth_h = 2, mouth_curve = 2;
  double hair_line = 14;
  bool glasses = false;
  bool beard = false;
};

/// Variation applied to one capture of an identity.
struct Capture {
  double brightness = 0;
  double contrast = 1;
  double noise = 0;  ///< uniform noise amplitude
  double dx = 0, dy = 0;  ///< sub-window shift, window units
  std::uint64_t seed = 0;
};

inline double lerp(double a, double b, double t) { return a + (b - a) * t; }

inline FaceParams person(std::uint64_t id) {
  SplitMix64 r(0xFACE0000ULL + id * 7919);
  auto u = [&](double lo, double hi) { return lerp(lo, hi, r.uniform()); };
  FaceParams p;
  p.face_rx = u(18, 25);
  p.face_ry = u(24, 29);
  p.face_cy = u(32, 35);
  p.skin = u(150, 215);
  p.hair = u(20, 90);
  p.background = u(70, 140);
  p.eye_dx = u(7, 13);
  p.eye_y = u(24, 31);
  p.eye_rx = u(2.5, 5.5);
  p.eye_ry = u(1.5, 3.5);
  p.brow_y = p.eye_y - u(5, 9);
  p.brow_tilt = u(-0.35, 0.35);
  p.brow_len = u(6, 11);
  p.brow_thick = u(1, 3);
  p.nose_len = u(6, 14);
  p.nose_w = u(1, 4);
  p.mouth_y = u(43, 52);
  p.mouth_w = u(5, 12);
  p.mouth_h = u(1, 3.5);
  p.mouth_curve = u(-3, 3);
  p.hair_line = u(8, 18);
  p.glasses = r.below(3) == 0;
  p.beard = r.below(4) == 0;
  return p;
}

namespace detail {

inline double ellipse(double x, double y, double cx, double cy, double rx, double ry) {
  const double dx = (x - cx) / rx, dy = (y - cy) / ry;
  return dx * dx + dy * dy;
}

// Intensity of the face drawing at window coordinates (x, y) in [0, 64).
inline double face_intensity(const FaceParams& p, double x, double y) {
  const double cx = 32;
  double v = p.background;
  const double head = ellipse(x, y, cx, p.face_cy, p.face_rx, p.face_ry);
  const double hair_outer = ellipse(x, y, cx, p.face_cy - 2, p.face_rx + 3, p.face_ry + 3);
  if (hair_outer <= 1.0 && y < p.face_cy) v = p.hair;
  if (head <= 1.0) {
    v = p.skin;
    if (y < p.hair_line + 0.15 * std::abs(x - cx)) v = p.hair;
    if (p.beard && y > p.mouth_y - 4 && head > 0.35) v = p.hair + 25;
  }
  for (int side : {-1, 1}) {
    const double ex = cx + side * p.eye_dx;
    if (ellipse(x, y, ex, p.eye_y, p.eye_rx, p.eye_ry) <= 1.0) v = 30;
    const double t = (x - ex) * side;
    if (std::abs(t) <= p.brow_len / 2) {
      const double by = p.brow_y + p.brow_tilt * t;
      if (std::abs(y - by) <= p.brow_thick / 2) v = p.hair * 0.6;
    }
    if (p.glasses) {
      const double ring = ellipse(x, y, ex, p.eye_y, p.eye_rx + 3.5, p.eye_ry + 3.5);
      if (ring <= 1.0 && ring >= 0.62) v = 15;
    }
  }
  if (p.glasses && std::abs(y - p.eye_y) <= 0.8 && std::abs(x - cx) <= p.eye_dx - p.eye_rx - 3) v = 15;
  if (y >= p.eye_y + 2 && y <= p.eye_y + 2 + p.nose_len && std::abs(x - cx) <= p.nose_w / 2) v = p.skin * 0.7;
  const double mx = (x - cx) / p.mouth_w;
  if (std::abs(mx) <= 1.0) {
    const double my = p.mouth_y - p.mouth_curve * (1.0 - mx * mx);
    if (std::abs(y - my) <= p.mouth_h / 2 + 0.5) v = 60;
  }
  return v;
}

inline std::uint8_t to_pixel(double v) { return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0)); }

}  // namespace detail

/// Draws a face into `img` at (ox, oy) with the given side, 4x4 supersampled.
inline void draw_face(GrayImage& img, int ox, int oy, int side, const FaceParams& p, const Capture& c = {}) {
  SplitMix64 noise(c.seed ^ 0x5EEDULL);
  const double scale = 64.0 / side;
  for (int py = 0; py < side; ++py) {
    for (int px = 0; px < side; ++px) {
      const int ix = ox + px, iy = oy + py;
      if (ix < 0 || iy < 0 || ix >= img.width() || iy >= img.height()) continue;
      double acc = 0;
      for (int sy = 0; sy < 4; ++sy)
        for (int sx = 0; sx < 4; ++sx)
          acc += detail::face_intensity(p, (px + (sx + 0.5) / 4) * scale - c.dx, (py + (sy + 0.5) / 4) * scale - c.dy);
      double v = (acc / 16 - 128) * c.contrast + 128 + c.brightness;
      if (c.noise > 0) v += (noise.uniform() * 2 - 1) * c.noise;
      img.at(ix, iy) = detail::to_pixel(v);
    }
  }
}

inline GrayImage face_crop(const FaceParams& p, const Capture& c = {}) {
  GrayImage img(kWindowSide, kWindowSide, detail::to_pixel(p.background));
  draw_face(img, 0, 0, kWindowSide, p, c);
  return img;
}

/// Smooth shaded background with soft blobs, a few hard-edged shapes, and
/// light noise.
inline GrayImage background(int width, int height, std::uint64_t seed) {
  SplitMix64 r(seed * 0x9E3779B97F4A7C15ULL + 17);
  auto u = [&](double lo, double hi) { return lerp(lo, hi, r.uniform()); };
  const double base = u(60, 170), gx = u(-0.4, 0.4), gy = u(-0.4, 0.4);
  struct Blob {
    double x, y, rad, amp;
  };
  std::vector<Blob> blobs(3 + r.below(4));
  for (auto& b : blobs) b = {u(0, width), u(0, height), u(15, 60), u(-40, 40)};
  struct Rect {
    double x0, y0, x1, y1, v;
  };
  std::vector<Rect> rects(r.below(4));
  for (auto& q : rects) {
    double x0 = u(0, width), y0 = u(0, height);
    q = {x0, y0, x0 + u(6, 40), y0 + u(6, 40), u(20, 230)};
  }
  const double noise_amp = u(1, 6);
  GrayImage img(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double v = base + gx * (x - width / 2.0) + gy * (y - height / 2.0);
      for (const auto& b : blobs) {
        const double d2 = ((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) / (b.rad * b.rad);
        v += b.amp * std::exp(-d2);
      }
      for (const auto& q : rects)
        if (x >= q.x0 && x < q.x1 && y >= q.y0 && y < q.y1) v = q.v;
      v += (r.uniform() * 2 - 1) * noise_amp;
      img.at(x, y) = detail::to_pixel(v);
    }
  return img;
}

struct Scene {
  GrayImage image;
  Detection truth;  ///< score unused
  std::uint64_t person_id = 0;
};

/// A background with one face of `side` pixels at (x, y).
inline Scene scene(std::uint64_t person_id, int width, int height, int x, int y, int side, std::uint64_t seed,
                   const Capture& c = {}) {
  Scene s;
  s.image = background(width, height, seed);
  draw_face(s.image, x, y, side, person(person_id), c);
  s.truth = {x, y, side, 0.0};
  s.person_id = person_id;
  return s;
}

/// A mild re-capture of the same identity (lighting and sensor noise only).
inline Capture live_capture(std::uint64_t seed) {
  SplitMix64 r(seed + 0xC0FFEEULL);
  Capture c;
  c.brightness = lerp(-8, 8, r.uniform());
  c.contrast = lerp(0.95, 1.05, r.uniform());
  c.noise = 2;
  c.seed = seed;
  return c;
}

inline constexpr int kTrainingIdentities = 8;

/// Face crops (label +1) and clutter windows (label -1) for the window
/// classifier.
struct TrainingSet {
  std::vector<GrayImage> positives;
  std::vector<GrayImage> negatives;
};

inline TrainingSet training_set(std::uint64_t seed = 1) {
  TrainingSet ts;
  SplitMix64 r(seed);
  auto u = [&](double lo, double hi) { return lerp(lo, hi, r.uniform()); };

  for (std::uint64_t id = 0; id < kTrainingIdentities; ++id)
    for (int k = 0; k < 6; ++k) {
      Capture c;
      c.brightness = u(-15, 15);
      c.contrast = u(0.85, 1.15);
      c.noise = u(0, 4);
      c.dx = k == 0 ? 0 : u(-1.5, 1.5);
      c.dy = k == 0 ? 0 : u(-1.5, 1.5);
      c.seed = r.next();
      ts.positives.push_back(face_crop(person(id), c));
    }

  // Clutter windows cut from backgrounds.
  for (int k = 0; k < 200; ++k) {
    auto bg = background(128, 128, 1000 + static_cast<std::uint64_t>(k));
    ts.negatives.push_back(bg.crop(static_cast<int>(r.below(65)), static_cast<int>(r.below(65)), kWindowSide, kWindowSide));
  }
  // Off-center and wrong-scale views of faces.
  for (int k = 0; k < 120; ++k) {
    const auto id = r.below(kTrainingIdentities);
    auto bg = background(192, 192, 5000 + static_cast<std::uint64_t>(k));
    const int side = k % 3 == 0 ? 64 : (k % 3 == 1 ? 100 : 40);
    draw_face(bg, 64, 64, side, person(id));
    int ox, oy;
    do {
      ox = 64 + static_cast<int>(r.below(65)) - 32;
      oy = 64 + static_cast<int>(r.below(65)) - 32;
    } while (side == 64 && std::abs(ox - 64) < 24 && std::abs(oy - 64) < 24);
    if (side == 100) {
      ox = 64 + static_cast<int>(r.below(37));
      oy = 64 + static_cast<int>(r.below(37));
    }
    ts.negatives.push_back(bg.crop(ox, oy, kWindowSide, kWindowSide));
  }
  return ts;
}

inline std::vector<TrainingSample> to_samples(const TrainingSet& ts) {
  std::vector<TrainingSample> out;
  for (const auto& img : ts.positives) out.push_back({hog_descriptor(img), +1});
  for (const auto& img : ts.negatives) out.push_back({hog_descriptor(img), -1});
  return out;
}

/// Five held-out scenes with one face each at a known box.
inline std::vector<Scene> detection_scenes() {
  return {
      scene(0, 160, 128, 32, 24, 64, 9001),
      scene(3, 192, 144, 96, 40, 64, 9002),
      scene(5, 128, 128, 0, 56, 64, 9003),
      scene(6, 200, 160, 40, 40, 80, 9004),
      scene(2, 176, 176, 64, 80, 64, 9005),
  };
}

/// Identity pair whose encodings fall below the default match threshold.
inline constexpr std::uint64_t kImpostorA = 3;
inline constexpr std::uint64_t kImpostorB = 5;

struct SampleFile {
  std::string name;
  Bytes data;
};

/// Ten files, one per extension across the audio / document / image /
/// presentation / video / other categories, each `size` bytes of mixed
/// structured and random content. Last bytes are never 0x00.
inline std::vector<SampleFile> sample_corpus(std::size_t size = 64 * 1024, std::uint64_t seed = 2024) {
  static constexpr const char* names[] = {"song.mp3",   "voice.wav", "report.docx", "paper.pdf",  "notes.txt",
                                          "index.html", "photo.jpg", "slides.pptx", "clip.mp4",   "tool.exe"};
  static constexpr const char* words[] = {"the ", "cipher ", "face ", "key ", "block ", "<div>", "</div>\n", "data ",
                                          "encoding ", "vector ", "\n", "alpha ", "beta "};
  std::vector<SampleFile> out;
  SplitMix64 rng(seed);
  for (std::size_t f = 0; f < std::size(names); ++f) {
    SampleFile file{names[f], {}};
    auto& d = file.data;
    d.reserve(size);
    const std::string header = std::string("HDR:") + names[f] + "\n";
    d.insert(d.end(), header.begin(), header.end());
    while (d.size() < size) {
      switch (rng.below(f % 2 == 0 ? 4 : 3)) {
        case 0: {  // prose-like text
          for (int k = 0; k < 40; ++k) {
            std::string w = words[rng.below(std::size(words))];
            d.insert(d.end(), w.begin(), w.end());
          }
          break;
        }
        case 1: {  // slowly varying samples, as in audio or raw pixels
          double phase = rng.uniform() * 6.28;
          for (int k = 0; k < 512; ++k)
            d.push_back(static_cast<std::uint8_t>(128 + 100 * std::sin(phase + k * 0.05) + rng.below(5)));
          break;
        }
        case 2: {  // runs, as in padded or sparse binaries
          const auto v = static_cast<std::uint8_t>(rng.below(4) == 0 ? 0 : rng.below(256));
          d.insert(d.end(), 64 + rng.below(256), v);
          break;
        }
        default: {  // compressed-looking noise
          for (int k = 0; k < 1024; ++k) d.push_back(static_cast<std::uint8_t>(rng.below(256)));
        }
      }
    }
    d.resize(size);
    if (d.back() == 0x00) d.back() = 0x0A;
    out.push_back(std::move(file));
  }
  return out;
}

}  // namespace biocrypt::synthetic
