#pragma once

// AES-256 block cipher (FIPS-197), byte-oriented. Only the single-block
// transform lives here; chaining is in cipher.hpp.

#include <array>
#include <cstdint>
#include <span>

#include "biocrypt/error.hpp"

namespace biocrypt {

inline constexpr std::size_t kAesBlockSize = 16;
inline constexpr std::size_t kAes256KeySize = 32;

using Block = std::array<std::uint8_t, kAesBlockSize>;

namespace aes_detail {

constexpr std::uint8_t xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1B : 0x00));
}

constexpr std::uint8_t gmul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  while (b) {
    if (b & 1) p ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return p;
}

constexpr std::uint8_t rotl8(std::uint8_t x, int s) {
  return static_cast<std::uint8_t>((x << s) | (x >> (8 - s)));
}

// S-box from the multiplicative inverse in GF(2^8) followed by the affine map.
constexpr std::array<std::uint8_t, 256> make_sbox() {
  std::array<std::uint8_t, 256> s{};
  for (int i = 0; i < 256; ++i) {
    std::uint8_t inv = 0;
    if (i != 0)
      for (int j = 1; j < 256; ++j)
        if (gmul(static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j)) == 1) {
          inv = static_cast<std::uint8_t>(j);
          break;
        }
    s[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(inv ^ rotl8(inv, 1) ^ rotl8(inv, 2) ^ rotl8(inv, 3) ^ rotl8(inv, 4) ^ 0x63);
  }
  return s;
}

constexpr std::array<std::uint8_t, 256> make_inverse(const std::array<std::uint8_t, 256>& s) {
  std::array<std::uint8_t, 256> inv{};
  for (int i = 0; i < 256; ++i) inv[s[static_cast<std::size_t>(i)]] = static_cast<std::uint8_t>(i);
  return inv;
}

constexpr std::array<std::uint8_t, 256> make_mul(std::uint8_t k) {
  std::array<std::uint8_t, 256> t{};
  for (int i = 0; i < 256; ++i) t[static_cast<std::size_t>(i)] = gmul(static_cast<std::uint8_t>(i), k);
  return t;
}

inline constexpr auto kSbox = make_sbox();
inline constexpr auto kInvSbox = make_inverse(kSbox);
inline constexpr auto kMul2 = make_mul(2);
inline constexpr auto kMul3 = make_mul(3);
inline constexpr auto kMul9 = make_mul(9);
inline constexpr auto kMul11 = make_mul(11);
inline constexpr auto kMul13 = make_mul(13);
inline constexpr auto kMul14 = make_mul(14);

static_assert(kSbox[0x00] == 0x63 && kSbox[0x53] == 0xED && kInvSbox[0x63] == 0x00);

}  // namespace aes_detail

class Aes256 {
 public:
  static constexpr int kRounds = 14;

  explicit Aes256(std::span<const std::uint8_t> key) {
    if (key.size() != kAes256KeySize) fail(Errc::invalid_argument, "AES-256 key must be exactly 32 bytes");
    expand(key);
  }

  Block encrypt_block(const Block& in) const {
    using namespace aes_detail;
    Block s = in;
    add_round_key(s, 0);
    for (int round = 1; round <= kRounds; ++round) {
      for (auto& b : s) b = kSbox[b];
      shift_rows(s);
      if (round != kRounds) mix_columns(s);
      add_round_key(s, round);
    }
    return s;
  }

  Block decrypt_block(const Block& in) const {
    using namespace aes_detail;
    Block s = in;
    add_round_key(s, kRounds);
    for (int round = kRounds - 1; round >= 0; --round) {
      inv_shift_rows(s);
      for (auto& b : s) b = kInvSbox[b];
      add_round_key(s, round);
      if (round != 0) inv_mix_columns(s);
    }
    return s;
  }

 private:
  // State is column-major: byte (row r, column c) sits at index 4c + r.
  void expand(std::span<const std::uint8_t> key) {
    using aes_detail::kSbox;
    constexpr int nk = 8;
    std::uint8_t rcon = 0x01;
    for (int i = 0; i < 4 * nk; ++i) round_keys_[static_cast<std::size_t>(i)] = key[static_cast<std::size_t>(i)];
    for (int w = nk; w < 4 * (kRounds + 1); ++w) {
      std::array<std::uint8_t, 4> t{};
      for (int j = 0; j < 4; ++j) t[static_cast<std::size_t>(j)] = round_keys_[static_cast<std::size_t>(4 * (w - 1) + j)];
      if (w % nk == 0) {
        t = {static_cast<std::uint8_t>(kSbox[t[1]] ^ rcon), kSbox[t[2]], kSbox[t[3]], kSbox[t[0]]};
        rcon = aes_detail::xtime(rcon);
      } else if (w % nk == 4) {
        for (auto& b : t) b = kSbox[b];
      }
      for (int j = 0; j < 4; ++j)
        round_keys_[static_cast<std::size_t>(4 * w + j)] =
            static_cast<std::uint8_t>(round_keys_[static_cast<std::size_t>(4 * (w - nk) + j)] ^ t[static_cast<std::size_t>(j)]);
    }
  }

  void add_round_key(Block& s, int round) const {
    for (std::size_t i = 0; i < kAesBlockSize; ++i) s[i] ^= round_keys_[static_cast<std::size_t>(round) * kAesBlockSize + i];
  }

  static void shift_rows(Block& s) {
    Block t = s;
    for (int c = 0; c < 4; ++c)
      for (int r = 1; r < 4; ++r) s[static_cast<std::size_t>(4 * c + r)] = t[static_cast<std::size_t>(4 * ((c + r) % 4) + r)];
  }

  static void inv_shift_rows(Block& s) {
    Block t = s;
    for (int c = 0; c < 4; ++c)
      for (int r = 1; r < 4; ++r) s[static_cast<std::size_t>(4 * ((c + r) % 4) + r)] = t[static_cast<std::size_t>(4 * c + r)];
  }

  static void mix_columns(Block& s) {
    using namespace aes_detail;
    for (std::size_t c = 0; c < 4; ++c) {
      std::uint8_t* col = &s[4 * c];
      const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
      col[0] = static_cast<std::uint8_t>(kMul2[a0] ^ kMul3[a1] ^ a2 ^ a3);
      col[1] = static_cast<std::uint8_t>(a0 ^ kMul2[a1] ^ kMul3[a2] ^ a3);
      col[2] = static_cast<std::uint8_t>(a0 ^ a1 ^ kMul2[a2] ^ kMul3[a3]);
      col[3] = static_cast<std::uint8_t>(kMul3[a0] ^ a1 ^ a2 ^ kMul2[a3]);
    }
  }

  static void inv_mix_columns(Block& s) {
    using namespace aes_detail;
    for (std::size_t c = 0; c < 4; ++c) {
      std::uint8_t* col = &s[4 * c];
      const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
      col[0] = static_cast<std::uint8_t>(kMul14[a0] ^ kMul11[a1] ^ kMul13[a2] ^ kMul9[a3]);
      col[1] = static_cast<std::uint8_t>(kMul9[a0] ^ kMul14[a1] ^ kMul11[a2] ^ kMul13[a3]);
      col[2] = static_cast<std::uint8_t>(kMul13[a0] ^ kMul9[a1] ^ kMul14[a2] ^ kMul11[a3]);
      col[3] = static_cast<std::uint8_t>(kMul11[a0] ^ kMul13[a1] ^ kMul9[a2] ^ kMul14[a3]);
    }
  }

  std::array<std::uint8_t, kAesBlockSize*(kRounds + 1)> round_keys_{};
};

}  // namespace biocrypt
