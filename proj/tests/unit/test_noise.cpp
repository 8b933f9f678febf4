#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "owbf/image_io.hpp"
#include "owbf/metrics.hpp"
#include "owbf/noise.hpp"
#include "owbf/parallel.hpp"

namespace owbf {
namespace {

TEST(Noise, SplitMix64ReferenceOutputs) {
  // First outputs of the reference generator seeded with 0.
  EXPECT_EQ(splitmix64_at(0, 0), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(splitmix64_at(0, 1), 0x6E789E6AA1B965F4ull);
  EXPECT_EQ(splitmix64_at(0, 2), 0x06C45D188009454Full);
}

TEST(Noise, BoxMullerPairLayout) {
  const std::uint64_t seed = 12345;
  for (std::uint64_t q = 0; q < 50; ++q) {
    const double u1 = static_cast<double>((splitmix64_at(seed, 2 * q) >> 11) + 1) * 0x1p-53;
    const double u2 = static_cast<double>((splitmix64_at(seed, 2 * q + 1) >> 11) + 1) * 0x1p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    EXPECT_EQ(standard_normal_at(seed, 2 * q), r * std::cos(phi));
    EXPECT_EQ(standard_normal_at(seed, 2 * q + 1), r * std::sin(phi));
  }
}

TEST(Noise, ZeroSigmaIsIdentity) {
  const ImageF img = test::random_image(17, 9, 1);
  EXPECT_EQ(add_gaussian_noise(img, {0.0, 99}), img);
}

TEST(Noise, DeterministicAndSeedSensitive) {
  const ImageF img(32, 16, 100.0);
  const ImageF a = add_gaussian_noise(img, {10.0, 5});
  EXPECT_EQ(a, add_gaussian_noise(img, {10.0, 5}));
  EXPECT_NE(a, add_gaussian_noise(img, {10.0, 6}));
}

TEST(Noise, IndependentOfThreadCount) {
  const ImageF img = test::random_image(101, 67, 3);
  set_max_threads(1);
  const ImageF one = add_gaussian_noise(img, {25.0, 77});
  set_max_threads(4);
  const ImageF four = add_gaussian_noise(img, {25.0, 77});
  set_max_threads(0);
  EXPECT_EQ(one, four);
}

TEST(Noise, UnclippedAndAdditive) {
  const ImageF img(64, 64, 250.0);
  const ImageF out = add_gaussian_noise(img, {30.0, 1});
  auto [lo, hi] = min_max(out);
  EXPECT_GT(hi, 255.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out.pixels()[i], 250.0 + 30.0 * standard_normal_at(1, i));
  }
  (void)lo;
}

TEST(Noise, SampleVarianceWithinChiSquareBounds) {
  const ImageF img(64, 64, 50.0);
  const ImageF out = add_gaussian_noise(img, {10.0, 2024});
  double mean = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) mean += out.pixels()[i] - 50.0;
  mean /= static_cast<double>(out.size());
  double var = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = out.pixels()[i] - 50.0 - mean;
    var += d * d;
  }
  var /= static_cast<double>(out.size() - 1);
  EXPECT_GE(var, 85.0);
  EXPECT_LE(var, 115.0);
}

TEST(Noise, MeanOverSeedsNearZero) {
  const ImageF clean = test::scene(128, 128, 4);
  const int seeds = 20;
  double sum = 0.0;
  for (int k = 0; k < seeds; ++k) {
    const ImageF noisy = add_gaussian_noise(clean, {20.0, static_cast<std::uint64_t>(k)});
    for (std::size_t i = 0; i < clean.size(); ++i) sum += noisy.pixels()[i] - clean.pixels()[i];
  }
  const double count = static_cast<double>(seeds) * static_cast<double>(clean.size());
  EXPECT_LE(std::abs(sum / count), 3.0 * 20.0 / std::sqrt(count));
}

TEST(Noise, CameramanPsnrAtSigma30) {
  const ImageF clean = read_image(test::data_dir() / "cameraman.pgm");
  const ImageF noisy = add_gaussian_noise(clean, {30.0, 1});
  EXPECT_NEAR(psnr(clean, noisy).psnr_db, 18.588, 0.15);
}

}  // namespace
}  // namespace owbf
