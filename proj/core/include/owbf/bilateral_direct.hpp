#pragma once

#include <optional>

#include "owbf/image.hpp"

namespace owbf {

struct BilateralParams {
  double sigma_s = 3.0;                 // pixels
  double sigma_r = 30.0;                // gray levels
  std::optional<int> half_width;        // W; ceil(3 sigma_s) when unset
  int box_radius = 1;                   // L of the RBF box pre-filter

  int window() const;
  // Throws ParameterError on non-positive sigmas or box_radius < 1.
  void validate() const;
};

/// A denoised estimate together with the diagonal of the filter's Jacobian,
/// d estimate(i) / d f(i), which is what the SURE divergence term sums.
struct FilterOutput {
  ImageF estimate;
  ImageF self_derivative;
};

// Brute-force guided bilateral filter over the (2W+1)^2 window with mirror
// boundaries. The range kernel is evaluated on guide differences, the average
// is taken over f. O(W^2) per pixel; this is the reference the fast path is
// measured against.
ImageF guided_bilateral_direct(const ImageF& f, const ImageF& guide, const BilateralParams& p);

// Standard bilateral filter: guide = f.
ImageF sbf_direct(const ImageF& f, const BilateralParams& p);

// Robust bilateral filter: guide = box_filter(f, L).
ImageF rbf_direct(const ImageF& f, const BilateralParams& p);

// Oracle filter: guide = the clean image (only available in experiments).
ImageF oracle_bilateral_direct(const ImageF& f, const ImageF& clean, const BilateralParams& p);

}  // namespace owbf
