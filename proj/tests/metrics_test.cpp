#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "biocrypt/metrics.hpp"

using namespace biocrypt;

namespace {

const Bytes kKey(32, 0x5A);
const Bytes kIv(16, 0x00);

Bytes random_bytes(SplitMix64& rng, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng.below(256));
  return b;
}

Bytes complement(ByteView a) {
  Bytes out(a.begin(), a.end());
  for (auto& b : out) b = static_cast<std::uint8_t>(~b);
  return out;
}

// Textbook Pearson over explicitly expanded bits (MSB first).
double pearson_oracle(ByteView a, ByteView b) {
  const std::size_t len = std::min(a.size(), b.size());
  std::vector<double> x, y;
  for (std::size_t i = 0; i < len; ++i)
    for (int k = 7; k >= 0; --k) {
      x.push_back((a[i] >> k) & 1);
      y.push_back((b[i] >> k) & 1);
    }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

}  // namespace

TEST(BitCorrelation, Examples) {
  Bytes a{0x3C, 0xA5, 0x0F};
  EXPECT_EQ(bit_correlation(a, a), 1.0);
  EXPECT_EQ(bit_correlation(a, complement(a)), -1.0);
  // 0x55 = 0101 0101, 0x66 = 0110 0110: the [0,1,0,1] vs [0,1,1,0] pattern twice.
  EXPECT_NEAR(bit_correlation(Bytes{0x55}, Bytes{0x66}), 0.0, 1e-12);
  EXPECT_NEAR(pearson_oracle(Bytes{0x55}, Bytes{0x66}), 0.0, 1e-12);
}

TEST(BitCorrelation, Errors) {
  EXPECT_THROW(bit_correlation(Bytes{}, Bytes{1}), Error);
  EXPECT_THROW(bit_correlation(Bytes{0x00, 0x00}, Bytes{0x12, 0x34}), Error);
  EXPECT_THROW(bit_correlation(Bytes{0x12, 0x34}, Bytes{0xFF}), Error);
}

TEST(BitCorrelation, MatchesOracleAndIsSymmetric) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_bytes(rng, 1 + rng.below(200));
    auto b = random_bytes(rng, 1 + rng.below(200));
    if (trial % 2) b = a, b[0] ^= 0x81;
    const double r = bit_correlation(a, b);
    EXPECT_NEAR(r, pearson_oracle(a, b), 1e-12);
    EXPECT_DOUBLE_EQ(r, bit_correlation(b, a));
    EXPECT_NEAR(r, bit_correlation(complement(a), complement(b)), 1e-12);
  }
}

TEST(ShannonEntropy, Examples) {
  EXPECT_EQ(shannon_entropy(Bytes(1000, 0x41)), 0.0);
  Bytes all(256);
  for (int i = 0; i < 256; ++i) all[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
  EXPECT_DOUBLE_EQ(shannon_entropy(all), 8.0);
  const double aab = -(2.0 / 3) * std::log2(2.0 / 3) - (1.0 / 3) * std::log2(1.0 / 3);
  EXPECT_NEAR(shannon_entropy(Bytes{'a', 'a', 'b'}), 0.918296, 1e-6);
  EXPECT_NEAR(shannon_entropy(Bytes{'a', 'a', 'b'}), aab, 1e-15);
  EXPECT_THROW(shannon_entropy(Bytes{}), Error);
}

TEST(ShannonEntropy, PermutationInvariantAndBounded) {
  SplitMix64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_bytes(rng, 1 + rng.below(3000));
    for (auto& x : a) x = static_cast<std::uint8_t>(x % (1 + trial * 5));
    auto b = a;
    shuffle(std::span<std::uint8_t>(b), rng);
    const double h = shannon_entropy(a);
    EXPECT_NEAR(h, shannon_entropy(b), 1e-12);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, 8.0);
  }
  Bytes uniform4(256 * 4);
  for (std::size_t i = 0; i < uniform4.size(); ++i) uniform4[i] = static_cast<std::uint8_t>(i);
  EXPECT_DOUBLE_EQ(shannon_entropy(uniform4), 8.0);
  uniform4[0] = 1;
  EXPECT_LT(shannon_entropy(uniform4), 8.0);
}

TEST(NormalizedHamming, Examples) {
  Bytes a{0x12, 0xF0, 0x99};
  EXPECT_EQ(normalized_hamming(a, a), 0.0);
  EXPECT_EQ(normalized_hamming(a, complement(a)), 1.0);
  EXPECT_EQ(normalized_hamming(Bytes{0xA0}, Bytes{0x80}), 0.125);
  EXPECT_EQ(normalized_hamming(Bytes{0xA0, 0xFF}, Bytes{0x80}), 0.125);
  EXPECT_THROW(normalized_hamming(Bytes{}, a), Error);
}

TEST(NormalizedHamming, IsAScaledMetric) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = 1 + rng.below(64);
    auto a = random_bytes(rng, n), b = random_bytes(rng, n), c = random_bytes(rng, n);
    const double ab = normalized_hamming(a, b), bc = normalized_hamming(b, c), ac = normalized_hamming(a, c);
    EXPECT_EQ(ab, normalized_hamming(b, a));
    EXPECT_LE(ac, ab + bc + 1e-15);
    EXPECT_EQ(ab == 0.0, a == b);
  }
}

TEST(Perturb, Examples) {
  Bytes data{1, 2, 3, 4};
  EXPECT_EQ(perturb_bytes(data, {0.0, 1}), data);

  auto out = perturb_bytes(data, {0.5, 1});
  int changed = 0;
  for (std::size_t i = 0; i < 4; ++i)
    if (out[i] != data[i]) {
      ++changed;
      EXPECT_EQ(std::popcount(static_cast<std::uint8_t>(out[i] ^ data[i])), 1);
      EXPECT_EQ(out[i] ^ data[i], 1 << (i % 8));
    }
  EXPECT_EQ(changed, 2);
}

TEST(Perturb, PositionNineFlipsBitOne) {
  Bytes data(16, 0x00);
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto pos = perturbation_positions(16, {0.25, seed});
    if (std::find(pos.begin(), pos.end(), 9u) == pos.end()) continue;
    auto out = perturb_bytes(data, {0.25, seed});
    EXPECT_EQ(out[9], 0b00000010);
    return;
  }
  FAIL() << "no seed selected position 9";
}

TEST(Perturb, ReproducibleAndExactBitCount) {
  SplitMix64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    auto data = random_bytes(rng, 1 + rng.below(2000));
    PerturbationSpec spec{rng.uniform(), rng.next()};
    auto a = perturb_bytes(data, spec);
    EXPECT_EQ(a, perturb_bytes(data, spec));
    auto pos = perturbation_positions(data.size(), spec);
    EXPECT_EQ(pos.size(), static_cast<std::size_t>(std::floor(spec.fraction * static_cast<double>(data.size()))));
    EXPECT_EQ(std::set<std::size_t>(pos.begin(), pos.end()).size(), pos.size());
    EXPECT_EQ(hamming_bits(data, a), pos.size());
  }
  EXPECT_THROW(perturb_bytes(Bytes{1}, {1.5, 0}), Error);
}

TEST(Avalanche, ZeroFractionIsZero) {
  EXPECT_EQ(avalanche_percent(Bytes(100, 3), kKey, kIv, {0.0, 1}), 0.0);
}

TEST(Avalanche, SingleBlockAveragesNearHalf) {
  SplitMix64 rng(7);
  double sum = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto p = random_bytes(rng, 16);
    for (auto& b : p) b |= 0x80;
    sum += avalanche_percent(p, kKey, kIv, {1.0 / 16, seed});
  }
  const double mean = sum / 200;
  EXPECT_GE(mean, 45.0);
  EXPECT_LE(mean, 55.0);
}

TEST(Avalanche, LargeMixedPlaintextNearHalf) {
  SplitMix64 rng(8);
  Bytes p(64 * 1024);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = i % 3 == 0 ? static_cast<std::uint8_t>(rng.below(256)) : 'a' + i % 26;
  const double pct = avalanche_percent(p, kKey, kIv, {0.5, 42});
  EXPECT_GE(pct, 49.0);
  EXPECT_LE(pct, 51.0);
}

TEST(AnalyzeFile, RandomInputLooksLikeTableOne) {
  SplitMix64 rng(9);
  auto p = random_bytes(rng, 64 * 1024);
  auto r = analyze_file(p, kKey, kIv, {0.5, 42}, "RAND");
  EXPECT_EQ(r.file_label, "RAND");
  EXPECT_LE(std::fabs(r.correlation), 0.01);
  EXPECT_GE(r.entropy_cipher, 7.95);
  EXPECT_LE(r.entropy_cipher, 8.0);
  EXPECT_GE(r.hamming_norm, 0.49);
  EXPECT_LE(r.hamming_norm, 0.51);
  EXPECT_GE(r.avalanche_pct, 49.0);
  EXPECT_LE(r.avalanche_pct, 51.0);
}

TEST(AnalyzeFile, ConstantPlaintextStillEncryptsToHighEntropy) {
  auto r = analyze_file(Bytes(64 * 1024, 0x41), kKey, kIv, {0.5, 42}, "MP3");
  EXPECT_EQ(r.file_label, "MP3");
  EXPECT_EQ(r.entropy_plain, 0.0);
  EXPECT_GE(r.entropy_cipher, 7.9);
  EXPECT_NE(to_csv_row(r).find("MP3,"), std::string::npos);
}

TEST(Report, CsvFormat) {
  MetricsReport r{"a,b", -0.000039032, 7.476443127, 7.619993924, 0.49993309, 49.9994066};
  EXPECT_EQ(to_csv_row(r), "\"a,b\",-3.9032e-05,7.47644313,7.61999392,0.49993309,49.9994066");
  std::vector<MetricsReport> rows{r};
  EXPECT_EQ(to_csv(rows), std::string(kReportHeader) + "\n" + to_csv_row(r) + "\n");
}
