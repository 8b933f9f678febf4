#pragma once

#include "owbf/image.hpp"

namespace owbf {

struct Metrics {
  double mse = 0.0;      // gray levels^2
  double psnr_db = 0.0;  // +infinity when mse == 0
};

inline constexpr double kPeakValue = 255.0;

double mse(const ImageF& a, const ImageF& b);

// 10 log10(255^2 / mse); the peak is fixed at 255 whatever the image range.
double psnr_from_mse(double mse);

Metrics psnr(const ImageF& a, const ImageF& b);

}  // namespace owbf
