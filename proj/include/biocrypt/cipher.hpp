#pragma once

// AES-256-CBC with zero-byte padding and an IV-prefixed envelope:
//   C_0 = IV, C_i = E_K(P_i ^ C_{i-1}), output = IV || C_1 || ... || C_n.
// Decryption strips every trailing 0x00, so plaintexts that themselves end in
// 0x00 do not round-trip. Padding::pkcs7 is an opt-in alternative that does.

#include <algorithm>

#include "biocrypt/aes.hpp"
#include "biocrypt/bytes.hpp"
#include "biocrypt/random.hpp"

namespace biocrypt {

enum class Padding { null_bytes, pkcs7 };

struct CipherEnvelope {
  Block iv{};
  Bytes body;  ///< length is a multiple of 16

  Bytes serialize() const {
    Bytes out(iv.begin(), iv.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
  }

  static CipherEnvelope parse(ByteView raw) {
    if (raw.size() < kAesBlockSize) fail(Errc::malformed_envelope, "envelope shorter than the 16-byte IV");
    if ((raw.size() - kAesBlockSize) % kAesBlockSize != 0)
      fail(Errc::malformed_envelope, "ciphertext body is not a multiple of 16 bytes");
    CipherEnvelope e;
    std::copy_n(raw.begin(), kAesBlockSize, e.iv.begin());
    e.body.assign(raw.begin() + kAesBlockSize, raw.end());
    return e;
  }

  friend bool operator==(const CipherEnvelope&, const CipherEnvelope&) = default;
};

/// Appends (16 - L mod 16) mod 16 zero bytes.
inline Bytes pad_null(ByteView plain) {
  Bytes out(plain.begin(), plain.end());
  out.resize(out.size() + (kAesBlockSize - plain.size() % kAesBlockSize) % kAesBlockSize, 0x00);
  return out;
}

inline Bytes pad_pkcs7(ByteView plain) {
  Bytes out(plain.begin(), plain.end());
  const auto k = kAesBlockSize - plain.size() % kAesBlockSize;
  out.resize(out.size() + k, static_cast<std::uint8_t>(k));
  return out;
}

/// Removes the maximal run of trailing 0x00 bytes.
inline void strip_trailing_nulls(Bytes& data) {
  auto last = std::find_if(data.rbegin(), data.rend(), [](std::uint8_t b) { return b != 0x00; });
  data.erase(last.base(), data.end());
}

inline CipherEnvelope encrypt_with_iv(ByteView plain, ByteView key, ByteView iv,
                                      Padding padding = Padding::null_bytes) {
  if (iv.size() != kAesBlockSize) fail(Errc::invalid_argument, "IV must be exactly 16 bytes");
  const Aes256 aes(key);
  CipherEnvelope env;
  std::copy(iv.begin(), iv.end(), env.iv.begin());
  env.body = padding == Padding::pkcs7 ? pad_pkcs7(plain) : pad_null(plain);

  Block chain = env.iv;
  for (std::size_t off = 0; off < env.body.size(); off += kAesBlockSize) {
    Block b;
    for (std::size_t i = 0; i < kAesBlockSize; ++i) b[i] = env.body[off + i] ^ chain[i];
    chain = aes.encrypt_block(b);
    std::copy(chain.begin(), chain.end(), env.body.begin() + static_cast<std::ptrdiff_t>(off));
  }
  return env;
}

/// Encrypts under a fresh IV from the system CSPRNG.
inline CipherEnvelope encrypt(ByteView plain, ByteView key, Padding padding = Padding::null_bytes) {
  if (key.size() != kAes256KeySize) fail(Errc::invalid_argument, "AES-256 key must be exactly 32 bytes");
  Block iv;
  secure_random_bytes(iv);
  return encrypt_with_iv(plain, key, iv, padding);
}

inline Bytes decrypt(const CipherEnvelope& env, ByteView key, Padding padding = Padding::null_bytes) {
  if (env.body.size() % kAesBlockSize != 0)
    fail(Errc::malformed_envelope, "ciphertext body is not a multiple of 16 bytes");
  const Aes256 aes(key);
  Bytes plain(env.body.size());
  Block chain = env.iv;
  for (std::size_t off = 0; off < env.body.size(); off += kAesBlockSize) {
    Block c;
    std::copy_n(env.body.begin() + static_cast<std::ptrdiff_t>(off), kAesBlockSize, c.begin());
    const Block p = aes.decrypt_block(c);
    for (std::size_t i = 0; i < kAesBlockSize; ++i) plain[off + i] = p[i] ^ chain[i];
    chain = c;
  }

  if (padding == Padding::pkcs7) {
    if (plain.empty()) fail(Errc::malformed_envelope, "PKCS#7 envelope has no blocks");
    const std::uint8_t k = plain.back();
    if (k == 0 || k > kAesBlockSize ||
        !std::all_of(plain.end() - k, plain.end(), [k](std::uint8_t b) { return b == k; }))
      fail(Errc::malformed_envelope, "invalid PKCS#7 padding");
    plain.resize(plain.size() - k);
  } else {
    strip_trailing_nulls(plain);
  }
  return plain;
}

inline Bytes decrypt(ByteView serialized, ByteView key, Padding padding = Padding::null_bytes) {
  return decrypt(CipherEnvelope::parse(serialized), key, padding);
}

}  // namespace biocrypt
