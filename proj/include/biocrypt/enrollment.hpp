#pragma once

// Face templates, template-store persistence, cosine-similarity
// authentication, and key formation from a stored encoding.

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <string>

#include "biocrypt/aes.hpp"
#include "biocrypt/detector.hpp"

namespace biocrypt {

inline constexpr std::size_t kMaxUsernameBytes = 64;
inline constexpr double kDefaultAuthThreshold = 0.85;

struct FaceTemplate {
  std::string username;
  std::vector<double> encoding;  ///< HOG descriptor of the enrolled face window
  std::uint64_t enrolled_at = 0;  ///< seconds since the Unix epoch

  friend bool operator==(const FaceTemplate&, const FaceTemplate&) = default;
};

inline constexpr std::uint16_t kStoreVersion = 1;

struct TemplateStore {
  std::map<std::string, FaceTemplate> templates;
  std::uint16_t version = kStoreVersion;

  bool contains(const std::string& user) const { return templates.contains(user); }

  const FaceTemplate& at(const std::string& user) const {
    auto it = templates.find(user);
    if (it == templates.end()) fail(Errc::unknown_user, "unknown user '" + user + "'");
    return it->second;
  }

  friend bool operator==(const TemplateStore&, const TemplateStore&) = default;
};

using BioKey = std::array<std::uint8_t, kAes256KeySize>;

struct AuthDecision {
  bool matched = false;
  double similarity = 0.0;
  double threshold = kDefaultAuthThreshold;
};

namespace detail {

inline bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k)
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    i += len;
  }
  return true;
}

}  // namespace detail

inline void validate_username(const std::string& name) {
  if (name.empty()) fail(Errc::invalid_argument, "username must not be empty");
  if (name.size() > kMaxUsernameBytes) fail(Errc::invalid_argument, "username longer than 64 bytes");
  if (!detail::valid_utf8(name)) fail(Errc::invalid_argument, "username is not valid UTF-8");
}

inline void validate_encoding(std::span<const double> encoding) {
  if (encoding.size() != kDescriptorLength) fail(Errc::dimension_mismatch, "encoding length is not 1764");
  for (double v : encoding)
    if (!std::isfinite(v)) fail(Errc::invalid_argument, "encoding has a non-finite component");
  if (std::all_of(encoding.begin(), encoding.end(), [](double v) { return v == 0.0; }))
    fail(Errc::blank_encoding, "encoding is all zero (blank window)");
}

/// Detects exactly one face, crops it, resamples to 64x64 and encodes it.
inline HogDescriptor face_encoding(const GrayImage& img, const LinearSvmModel& model, const DetectOptions& opt = {}) {
  const auto faces = detect_faces(img, model, opt);
  if (faces.empty()) fail(Errc::no_face, "no face detected");
  if (faces.size() > 1) fail(Errc::multiple_faces, std::to_string(faces.size()) + " faces detected");
  const auto& f = faces.front();
  return hog_descriptor(resize_bilinear(img.crop(f.x, f.y, f.side, f.side), kWindowSide, kWindowSide));
}

inline std::uint64_t unix_now() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count());
}

inline const FaceTemplate& enroll(TemplateStore& store, const std::string& username, const GrayImage& img,
                                  const LinearSvmModel& model, const DetectOptions& opt = {},
                                  std::uint64_t enrolled_at = unix_now()) {
  validate_username(username);
  if (store.contains(username)) fail(Errc::duplicate_user, "user '" + username + "' already enrolled");
  auto encoding = face_encoding(img, model, opt).values;
  validate_encoding(encoding);
  auto [it, inserted] = store.templates.emplace(username, FaceTemplate{username, std::move(encoding), enrolled_at});
  return it->second;
}

/// Cosine similarity.
inline double similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(Errc::dimension_mismatch, "encodings differ in length");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) fail(Errc::invalid_argument, "similarity of a zero-norm encoding");
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

inline AuthDecision authenticate(const TemplateStore& store, const std::string& username, const GrayImage& img,
                                 const LinearSvmModel& model, double threshold = kDefaultAuthThreshold,
                                 const DetectOptions& opt = {}) {
  const auto& stored = store.at(username);
  const auto live = face_encoding(img, model, opt);
  const double s = similarity(live.values, stored.encoding);
  return AuthDecision{s >= threshold, s, threshold};
}

/// Fixed-point rendering with exactly 9 fractional digits, no exponent.
inline std::string render_component(double v) {
  if (!std::isfinite(v)) fail(Errc::invalid_argument, "cannot render a non-finite component");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 9);
  if (ec != std::errc{}) fail(Errc::invalid_argument, "component rendering overflow");
  return std::string(buf, end);
}

/// Renders every component, concatenates in order, and keeps the first 32
/// characters as the key bytes.
inline BioKey derive_key(std::span<const double> encoding) {
  std::string text;
  for (double v : encoding) {
    text += render_component(v);
    if (text.size() >= kAes256KeySize) break;
  }
  if (text.size() < kAes256KeySize) fail(Errc::invalid_argument, "encoding too short to form a 32-byte key");
  BioKey key;
  std::copy_n(text.begin(), kAes256KeySize, key.begin());
  return key;
}

inline BioKey derive_key(const FaceTemplate& t) {
  validate_encoding(t.encoding);
  return derive_key(std::span<const double>(t.encoding));
}

// Store file: "BCRY", u16 version, u32 count, then per record u16 name length,
// name bytes, u64 enrolled_at, u32 encoding length, f64[] encoding; all LE.
inline Bytes save_store(const TemplateStore& store) {
  ByteWriter w;
  w.raw("BCRY");
  w.le<std::uint16_t>(kStoreVersion);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(store.templates.size()));
  for (const auto& [name, t] : store.templates) {
    w.le<std::uint16_t>(static_cast<std::uint16_t>(name.size()));
    w.raw(name);
    w.le<std::uint64_t>(t.enrolled_at);
    w.le<std::uint32_t>(static_cast<std::uint32_t>(t.encoding.size()));
    for (double v : t.encoding) w.le(v);
  }
  return std::move(w).bytes();
}

inline TemplateStore load_store(ByteView raw) {
  ByteReader r(raw);
  auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), "BCRY")) fail(Errc::bad_format, "bad store magic");
  TemplateStore store;
  store.version = r.le<std::uint16_t>();
  if (store.version != kStoreVersion) fail(Errc::bad_format, "unsupported store version");
  const auto count = r.le<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    FaceTemplate t;
    const auto name_len = r.le<std::uint16_t>();
    auto name = r.take(name_len);
    t.username.assign(name.begin(), name.end());
    validate_username(t.username);
    t.enrolled_at = r.le<std::uint64_t>();
    const auto len = r.le<std::uint32_t>();
    if (r.remaining() < std::size_t{len} * 8) fail(Errc::bad_format, "truncated record");
    t.encoding.resize(len);
    for (auto& v : t.encoding) v = r.le<double>();
    if (!store.templates.emplace(t.username, t).second) fail(Errc::bad_format, "duplicate username in store");
  }
  return store;
}

inline TemplateStore load_store_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  return load_store(read_file(path));
}

inline void save_store_file(const std::filesystem::path& path, const TemplateStore& store) {
  write_file_atomic(path, save_store(store));
}

}  // namespace biocrypt
