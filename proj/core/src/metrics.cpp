#include "owbf/metrics.hpp"

#include <cmath>
#include <limits>

namespace owbf {

double mse(const ImageF& a, const ImageF& b) {
  require_same_shape(a, b, "mse");
  // Per-row partial sums keep the reduction order fixed and symmetric in (a, b).
  double total = 0.0;
  for (int y = 0; y < a.height(); ++y) {
    auto ra = a.row(y);
    auto rb = b.row(y);
    double acc = 0.0;
    for (std::size_t x = 0; x < ra.size(); ++x) {
      const double d = ra[x] - rb[x];
      acc += d * d;
    }
    total += acc;
  }
  return total / static_cast<double>(a.size());
}

double psnr_from_mse(double mse) {
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(kPeakValue * kPeakValue / mse);
}

Metrics psnr(const ImageF& a, const ImageF& b) {
  const double m = mse(a, b);
  return {m, psnr_from_mse(m)};
}

}  // namespace owbf
