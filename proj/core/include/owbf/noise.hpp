#pragma once

#include <cstdint>

#include "owbf/image.hpp"

namespace owbf {

struct NoiseSpec {
  double sigma = 0.0;  // gray levels
  std::uint64_t seed = 0;
};

// SplitMix64 finalizer applied to the k-th state of a stream started at `seed`
// (state_k = seed + (k + 1) * golden gamma). Counter-indexed, so any output can
// be produced without generating its predecessors.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t k);

// Standard normal deviate for pixel `index` (row-major). Pixels 2q and 2q+1
// share one Box-Muller pair built from stream outputs 2q and 2q+1:
//   u = ((x >> 11) + 1) * 2^-53 in (0, 1]
//   r = sqrt(-2 ln u1), phi = 2 pi u2, even pixel -> r cos phi, odd -> r sin phi.
double standard_normal_at(std::uint64_t seed, std::uint64_t index);

// clean + sigma * w, unclipped. Deterministic in (sigma, seed, dimensions)
// regardless of thread count.
ImageF add_gaussian_noise(const ImageF& clean, const NoiseSpec& spec);

}  // namespace owbf
