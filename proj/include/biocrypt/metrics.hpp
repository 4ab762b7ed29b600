#pragma once

// Cipher quality measures: bit correlation, byte entropy, normalized Hamming
// distance, and the avalanche percentage under seeded byte perturbation.

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <string>

#include "biocrypt/cipher.hpp"
#include "biocrypt/random.hpp"

namespace biocrypt {

struct PerturbationSpec {
  double fraction = 0.5;
  std::uint64_t seed = 42;
};

struct MetricsReport {
  std::string file_label;
  double correlation = 0.0;
  double entropy_plain = 0.0;
  double entropy_cipher = 0.0;
  double hamming_norm = 0.0;
  double avalanche_pct = 0.0;
};

/// Pearson correlation between the bit streams of `a` and `b` (MSB first in
/// each byte), truncated to the shorter stream.
inline double bit_correlation(ByteView a, ByteView b) {
  if (a.empty() || b.empty()) fail(Errc::empty_input, "correlation of empty input");
  const std::size_t len = std::min(a.size(), b.size());
  using wide = __int128;
  const wide n = wide{8} * static_cast<wide>(len);

  // Bits are 0/1, so every sum in the Pearson formula reduces to popcounts:
  //   r = (n*Sxy - Sx*Sy) / sqrt((n*Sx - Sx^2) * (n*Sy - Sy^2)).
  wide sx = 0, sy = 0, sxy = 0;
  for (std::size_t i = 0; i < len; ++i) {
    sx += std::popcount(a[i]);
    sy += std::popcount(b[i]);
    sxy += std::popcount(static_cast<std::uint8_t>(a[i] & b[i]));
  }
  const wide vx = n * sx - sx * sx;
  const wide vy = n * sy - sy * sy;
  if (vx == 0 || vy == 0) fail(Errc::zero_variance, "correlation undefined: a bit stream is constant");
  const wide cov = n * sxy - sx * sy;
  const double denom = std::sqrt(static_cast<double>(vx) * static_cast<double>(vy));
  return std::clamp(static_cast<double>(cov) / denom, -1.0, 1.0);
}

/// Byte-symbol Shannon entropy in bits, in [0, 8].
inline double shannon_entropy(ByteView data) {
  if (data.empty()) fail(Errc::empty_input, "entropy of empty input");
  std::array<std::uint64_t, 256> counts{};
  for (auto b : data) ++counts[b];
  const double n = static_cast<double>(data.size());
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

inline std::uint64_t hamming_bits(ByteView a, ByteView b) {
  const std::size_t len = std::min(a.size(), b.size());
  std::uint64_t d = 0;
  for (std::size_t i = 0; i < len; ++i) d += static_cast<std::uint64_t>(std::popcount(static_cast<std::uint8_t>(a[i] ^ b[i])));
  return d;
}

/// Differing bits over total bits, on the common byte prefix.
inline double normalized_hamming(ByteView a, ByteView b) {
  if (a.empty() || b.empty()) fail(Errc::empty_input, "Hamming distance of empty input");
  const std::size_t len = std::min(a.size(), b.size());
  return static_cast<double>(hamming_bits(a, b)) / (8.0 * static_cast<double>(len));
}

/// The positions perturb_bytes will touch: the first floor(fraction * len)
/// entries of a seeded Fisher-Yates shuffle of all indices.
inline std::vector<std::size_t> perturbation_positions(std::size_t len, const PerturbationSpec& spec) {
  if (!(spec.fraction >= 0.0 && spec.fraction <= 1.0)) fail(Errc::invalid_argument, "perturbation fraction outside [0, 1]");
  const auto count = static_cast<std::size_t>(std::floor(spec.fraction * static_cast<double>(len)));
  SplitMix64 rng(spec.seed);
  auto idx = shuffled_indices(len, rng);
  idx.resize(std::min(count, len));
  return idx;
}

/// Flips bit (p mod 8) of each selected byte p: out[p] = in[p] ^ (1 << (p % 8)).
inline Bytes perturb_bytes(ByteView data, const PerturbationSpec& spec) {
  Bytes out(data.begin(), data.end());
  for (auto p : perturbation_positions(data.size(), spec)) out[p] ^= static_cast<std::uint8_t>(1u << (p % 8));
  return out;
}

/// Percentage of ciphertext-body bits that change when the plaintext is
/// perturbed, with key and IV held fixed.
inline double avalanche_percent(ByteView plain, ByteView key, ByteView iv, const PerturbationSpec& spec) {
  if (plain.empty()) fail(Errc::empty_input, "avalanche of empty plaintext");
  const auto c1 = encrypt_with_iv(plain, key, iv);
  const auto c2 = encrypt_with_iv(perturb_bytes(plain, spec), key, iv);
  return normalized_hamming(c1.body, c2.body) * 100.0;
}

inline MetricsReport analyze_file(ByteView plain, ByteView key, ByteView iv, const PerturbationSpec& spec,
                                  std::string label) {
  if (plain.empty()) fail(Errc::empty_input, "cannot analyze an empty file");
  const auto env = encrypt_with_iv(plain, key, iv);
  MetricsReport r;
  r.file_label = std::move(label);
  r.correlation = bit_correlation(plain, env.body);
  r.entropy_plain = shannon_entropy(plain);
  r.entropy_cipher = shannon_entropy(env.body);
  r.hamming_norm = normalized_hamming(plain, env.body);
  r.avalanche_pct = avalanche_percent(plain, key, iv, spec);
  return r;
}

inline constexpr const char* kReportHeader = "file,correlation,entropy_plain,entropy_cipher,hamming_norm,avalanche_pct";

namespace detail {
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string sig9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}
}  // namespace detail

/// One CSV row, numbers at 9 significant digits.
inline std::string to_csv_row(const MetricsReport& r) {
  using detail::sig9;
  return detail::csv_field(r.file_label) + "," + sig9(r.correlation) + "," + sig9(r.entropy_plain) + "," +
         sig9(r.entropy_cipher) + "," + sig9(r.hamming_norm) + "," + sig9(r.avalanche_pct);
}

inline std::string to_csv(std::span<const MetricsReport> rows) {
  std::string out = std::string(kReportHeader) + "\n";
  for (const auto& r : rows) out += to_csv_row(r) + "\n";
  return out;
}

}  // namespace biocrypt
