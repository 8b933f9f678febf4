#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>

#include "owbf/image.hpp"
#include "owbf/noise.hpp"

namespace owbf::test {

inline std::filesystem::path data_dir() { return OWBF_DATA_DIR; }

// Uniform samples in [lo, hi).
inline ImageF random_image(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 255.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  ImageF img(w, h);
  for (double& v : img.pixels()) v = dist(rng);
  return img;
}

// Integer-valued uniform samples in [lo, hi].
inline ImageF random_integer_image(int w, int h, std::uint64_t seed, int lo = 0, int hi = 255) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(lo, hi);
  ImageF img(w, h);
  for (double& v : img.pixels()) v = dist(rng);
  return img;
}

// Piecewise-smooth scene: a tilted sinusoid plus a few random flat discs, so
// there are both gentle gradients and sharp edges.
inline ImageF scene(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double fx = 0.05 + 0.15 * u(rng);
  const double fy = 0.05 + 0.15 * u(rng);
  ImageF img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img(x, y) = 128.0 + 70.0 * std::sin(fx * x + 0.3) * std::cos(fy * y);
  }
  for (int d = 0; d < 3; ++d) {
    const double cx = u(rng) * w;
    const double cy = u(rng) * h;
    const double rad = (0.15 + 0.2 * u(rng)) * std::min(w, h);
    const double level = 30.0 + 195.0 * u(rng);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) < rad * rad) img(x, y) = level;
      }
    }
  }
  return img;
}

inline ImageF noisy_scene(int w, int h, std::uint64_t seed, double sigma = 20.0) {
  return add_gaussian_noise(scene(w, h, seed), {sigma, seed + 1000});
}

inline double max_abs_diff(const ImageF& a, const ImageF& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.pixels()[i] - b.pixels()[i]));
  return m;
}

// Reflection without repeating the edge sample, written independently of the
// library: bounce back and forth until the index lands inside.
inline int reflect(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

}  // namespace owbf::test
