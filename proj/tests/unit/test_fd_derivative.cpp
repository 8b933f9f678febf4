#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "owbf/errors.hpp"
#include "owbf/fd_derivative.hpp"

namespace owbf {
namespace {

BilateralParams params(double ss, double sr, int L = 1) {
  BilateralParams p;
  p.sigma_s = ss;
  p.sigma_r = sr;
  p.box_radius = L;
  return p;
}

std::vector<PixelPos> all_pixels(int w, int h) {
  std::vector<PixelPos> px;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) px.push_back({x, y});
  }
  return px;
}

TEST(FdDerivative, IdentityIsOne) {
  const ImageF f = test::random_image(9, 6, 1);
  for (double d : fd_derivative(probes::identity(), f, all_pixels(9, 6))) EXPECT_NEAR(d, 1.0, 1e-9);
}

TEST(FdDerivative, BoxIsOneNinthInside) {
  const ImageF f = test::random_image(10, 8, 2);
  const ImageF d = fd_self_derivative(probes::box(1), f);
  for (int y = 1; y < 7; ++y) {
    for (int x = 1; x < 9; ++x) EXPECT_NEAR(d(x, y), 1.0 / 9.0, 1e-9);
  }
  // On the edge the pixel is counted once; its mirror twin is a neighbor.
  EXPECT_NEAR(d(0, 4), 1.0 / 9.0, 1e-9);
  const ImageF d2 = fd_self_derivative(probes::box(2), f);
  EXPECT_NEAR(d2(5, 4), 1.0 / 25.0, 1e-9);
}

TEST(FdDerivative, LocalizedProbeMatchesWholeImage) {
  const ImageF f = test::noisy_scene(40, 33, 3);
  const BilateralParams p = params(1.5, 20);
  ProbeFilter whole = probes::rbf_direct(p);
  whole.radius = -1;
  const ProbeFilter local = probes::rbf_direct(p);
  const std::vector<PixelPos> px = {{0, 0}, {39, 32}, {3, 17}, {20, 20}, {38, 1}, {7, 31}};
  const auto a = fd_derivative(whole, f, px);
  const auto b = fd_derivative(local, f, px);
  // The sliding box sums round differently inside a crop.
  for (std::size_t i = 0; i < px.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-8) << i;
}

TEST(FdDerivative, SbfFieldMatchesGenericProbe) {
  const ImageF f = test::noisy_scene(24, 21, 4);
  const BilateralParams p = params(1.5, 25);
  const FilterOutput out = sbf_direct_fd(f, p);
  EXPECT_EQ(out.estimate, sbf_direct(f, p));
  const ImageF ref = fd_self_derivative(probes::sbf_direct(p), f);
  EXPECT_LT(test::max_abs_diff(out.self_derivative, ref), 1e-8);
}

TEST(FdDerivative, RbfFieldMatchesGenericProbe) {
  for (int L : {1, 2}) {
    const ImageF f = test::noisy_scene(22, 19, 5);
    const BilateralParams p = params(1.2, 30, L);
    const FilterOutput out = rbf_direct_fd(f, p);
    EXPECT_EQ(out.estimate, rbf_direct(f, p));
    const ImageF ref = fd_self_derivative(probes::rbf_direct(p), f);
    EXPECT_LT(test::max_abs_diff(out.self_derivative, ref), 1e-8) << L;
  }
}

TEST(FdDerivative, HugeRangeSigmaGivesCenterWeight) {
  // With the range kernel flat the SBF is linear: d out(i) / d f(i) = 1 / sum g.
  ImageF f = test::random_image(30, 30, 6);
  const BilateralParams p = params(1.0, 1e9);
  const FilterOutput out = sbf_direct_fd(f, p);
  double s = 0.0;
  for (int t = -3; t <= 3; ++t) s += std::exp(-t * t / 2.0);
  EXPECT_NEAR(out.self_derivative(15, 15), 1.0 / (s * s), 1e-7);
}

TEST(FdDerivative, RejectsBadArguments) {
  const ImageF f(5, 5);
  const std::vector<PixelPos> outside = {{5, 0}};
  EXPECT_THROW(fd_derivative(probes::identity(), f, outside), DimensionError);
  const std::vector<PixelPos> ok = {{1, 1}};
  EXPECT_THROW(fd_derivative(probes::identity(), f, ok, 0.0), ParameterError);
  EXPECT_THROW(fd_self_derivative(probes::identity(), f, -1.0), ParameterError);
  EXPECT_THROW(sbf_direct_fd(f, params(1, 10), 0.0), ParameterError);
}

}  // namespace
}  // namespace owbf
