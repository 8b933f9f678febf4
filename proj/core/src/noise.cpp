#include "owbf/noise.hpp"

#include <cmath>
#include <numbers>

#include "owbf/errors.hpp"
#include "owbf/parallel.hpp"

namespace owbf {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

double unit_open_closed(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

}  // namespace

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + (k + 1) * kGoldenGamma;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double standard_normal_at(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t pair = index / 2;
  const double u1 = unit_open_closed(splitmix64_at(seed, 2 * pair));
  const double u2 = unit_open_closed(splitmix64_at(seed, 2 * pair + 1));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return (index % 2 == 0) ? r * std::cos(phi) : r * std::sin(phi);
}

ImageF add_gaussian_noise(const ImageF& clean, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw ParameterError("noise sigma must be finite and >= 0");
  }
  ImageF out = clean;
  if (spec.sigma == 0.0) return out;
  const int w = clean.width();
  parallel_rows(clean.height(), [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      auto dst = out.row(y);
      for (int x = 0; x < w; ++x) {
        const auto index = static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(w) + x;
        dst[x] += spec.sigma * standard_normal_at(spec.seed, index);
      }
    }
  });
  return out;
}

}  // namespace owbf
