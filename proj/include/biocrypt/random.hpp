#pragma once

#include <cerrno>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <span>
#include <vector>

#if defined(__linux__)
#include <sys/random.h>
#endif

#include "biocrypt/error.hpp"

namespace biocrypt {

/// SplitMix64 (Steele, Lea, Flood 2014). Fixed constants, so sequences are
/// identical on every platform; not for key material.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound) by rejection; bound > 0.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do r = next();
    while (r >= limit);
    return r % bound;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Fisher-Yates shuffle driven by SplitMix64::below.
template <typename T>
void shuffle(std::span<T> items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

inline std::vector<std::size_t> shuffled_indices(std::size_t n, SplitMix64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  shuffle(std::span<std::size_t>(idx), rng);
  return idx;
}

/// Fills `out` from the operating system CSPRNG.
inline void secure_random_bytes(std::span<std::uint8_t> out) {
#if defined(__linux__)
  std::size_t filled = 0;
  while (filled < out.size()) {
    ssize_t n = ::getrandom(out.data() + filled, out.size() - filled, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    filled += static_cast<std::size_t>(n);
  }
  if (filled == out.size()) return;
#endif
  std::ifstream dev("/dev/urandom", std::ios::binary);
  if (!dev.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size())))
    fail(Errc::randomness, "system randomness source unavailable");
}

}  // namespace biocrypt
