#include "owbf/shiftable_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "owbf/errors.hpp"

namespace owbf {

namespace {

// Binomial weights 2^-N C(N, n). Running the ratio recursion
// c_{n+1} = c_n (N - n) / (n + 1) forward from 2^-N underflows once N passes
// ~1074, so the recursion is run outward from the center on unnormalized
// values and the result is normalized. The lower half is mirrored so
// c_n == c_{N-n} bit for bit.
std::vector<double> binomial_weights(int order) {
  std::vector<double> c(static_cast<std::size_t>(order + 1), 0.0);
  const int mid = order / 2;
  c[static_cast<std::size_t>(mid)] = 1.0;
  for (int n = mid; n > 0; --n) {
    // c_{n-1} = c_n * n / (N - n + 1)
    c[static_cast<std::size_t>(n - 1)] =
        c[static_cast<std::size_t>(n)] * static_cast<double>(n) / static_cast<double>(order - n + 1);
  }
  for (int n = 0; n <= mid; ++n) c[static_cast<std::size_t>(order - n)] = c[static_cast<std::size_t>(n)];

  // Pairwise from the tails inward, so the sum is symmetric in n <-> N - n.
  double total = 0.0;
  for (int n = 0; n < order - n; ++n) total += 2.0 * c[static_cast<std::size_t>(n)];
  if (order % 2 == 0) total += c[static_cast<std::size_t>(mid)];
  for (double& v : c) v /= total;
  return c;
}

}  // namespace

double gaussian_range_kernel(double t, double sigma_r) {
  return std::exp(-0.5 * t * t / (sigma_r * sigma_r));
}

int lobe_order(double sigma_r, double range) {
  const double root = 2.0 * range / (std::numbers::pi * sigma_r);
  const double bound = root * root;
  if (bound > static_cast<double>(kMaxKernelOrder)) return kMaxKernelOrder + 1;
  return static_cast<int>(std::ceil(bound));
}

KernelErrors kernel_errors(int order, double sigma_r, double range, int samples) {
  const double scale = 1.0 / (sigma_r * std::sqrt(static_cast<double>(order)));
  KernelErrors e;
  for (int k = 0; k <= samples; ++k) {
    const double t = range * static_cast<double>(k) / samples;
    const double err = std::abs(std::pow(std::cos(t * scale), order) - gaussian_range_kernel(t, sigma_r));
    e.sup = std::max(e.sup, err);
    e.weighted = std::max(e.weighted, t * err);
  }
  return e;
}

int skipped_terms(std::span<const double> coeffs, double tail_mass) {
  const int order = static_cast<int>(coeffs.size()) - 1;
  int skip = 0;
  double mass = 0.0;
  while (2 * (skip + 1) <= order) {
    const double next = mass + 2.0 * coeffs[static_cast<std::size_t>(skip)];
    if (next > tail_mass) break;
    mass = next;
    ++skip;
  }
  return skip;
}

ShiftableKernel::ShiftableKernel(double sigma_r, double range, int order, double tail_mass)
    : sigma_r_(sigma_r), range_(range), order_(order), coeffs_(binomial_weights(order)) {
  const double nu = 1.0 / (sigma_r * std::sqrt(static_cast<double>(order)));
  freqs_.resize(static_cast<std::size_t>(order + 1));
  for (int n = 0; n <= order; ++n) freqs_[static_cast<std::size_t>(n)] = (2 * n - order) * nu;

  first_term_ = skipped_terms(coeffs_, tail_mass);
  double kept = 0.0;
  for (int n = first_term_; n < order - n; ++n) kept += 2.0 * coeffs_[static_cast<std::size_t>(n)];
  if (order % 2 == 0) kept += coeffs_[static_cast<std::size_t>(order / 2)];
  active_scale_ = 1.0 / kept;
  skipped_mass_ = std::max(0.0, 1.0 - kept);
}

double ShiftableKernel::evaluate_active(double t) const {
  double s = 0.0;
  for (int n = first_term_; n <= last_term(); ++n) {
    s += coeffs_[static_cast<std::size_t>(n)] * std::cos(freqs_[static_cast<std::size_t>(n)] * t);
  }
  return active_scale_ * s;
}

ShiftableKernel ShiftableKernel::build(double sigma_r, double range, std::optional<int> order,
                                       double tail_mass) {
  if (!(tail_mass >= 0.0) || tail_mass > 0.1) throw ParameterError("tail mass must lie in [0, 0.1]");
  if (!(sigma_r > 0.0) || !std::isfinite(sigma_r)) throw ParameterError("sigma_r must be positive");
  if (!(range > 0.0) || !std::isfinite(range)) throw ParameterError("kernel range T must be positive");

  const int lobe = lobe_order(sigma_r, range);
  if (order) {
    if (*order < 1 || *order > kMaxKernelOrder) {
      throw ParameterError("kernel order must lie in [1, " + std::to_string(kMaxKernelOrder) + "]");
    }
    return ShiftableKernel(sigma_r, range, *order, tail_mass);
  }

  // Skipping terms moves the applied kernel by at most twice the skipped mass.
  const double sup_budget = kKernelTolerance - 2.0 * tail_mass;
  const double bias_budget = kBiasTolerance - 2.0 * tail_mass * range;
  if (!(sup_budget > 0.0) || !(bias_budget > 0.0)) {
    throw ParameterError("tail mass leaves no kernel error budget");
  }
  auto accurate = [&](int n) {
    const KernelErrors e = kernel_errors(n, sigma_r, range);
    return e.sup < sup_budget && e.weighted < bias_budget;
  };

  // The error is non-increasing in N: gallop up, then bisect.
  int n = std::max(kMinKernelOrder, lobe);
  if (n <= kMaxKernelOrder && !accurate(n)) {
    int lo = n;  // invariant: !accurate(lo)
    int hi = std::min(2 * lo, kMaxKernelOrder);
    while (!accurate(hi)) {
      if (hi == kMaxKernelOrder) {
        hi = kMaxKernelOrder + 1;
        break;
      }
      lo = hi;
      hi = std::min(2 * hi, kMaxKernelOrder);
    }
    while (hi <= kMaxKernelOrder && hi - lo > 1) {
      const int mid = lo + (hi - lo) / 2;
      if (accurate(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    n = hi;
  }
  if (n > kMaxKernelOrder) {
    throw ParameterError("range kernel needs order > " + std::to_string(kMaxKernelOrder) +
                         " (sigma_r " + std::to_string(sigma_r) + " too small for range " +
                         std::to_string(range) + ")");
  }
  return ShiftableKernel(sigma_r, range, n, tail_mass);
}

double ShiftableKernel::lobe_limit() const {
  return 0.5 * std::numbers::pi * sigma_r_ * std::sqrt(static_cast<double>(order_));
}

double ShiftableKernel::evaluate(double t) const {
  return std::pow(std::cos(t / (sigma_r_ * std::sqrt(static_cast<double>(order_)))), order_);
}

}  // namespace owbf
