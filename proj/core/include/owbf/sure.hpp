#pragma once

#include <array>
#include <optional>

#include "owbf/bilateral_direct.hpp"
#include "owbf/fast_bilateral.hpp"
#include "owbf/fd_derivative.hpp"
#include "owbf/image.hpp"
#include "owbf/shiftable_kernel.hpp"

namespace owbf {

// Stein's unbiased estimate of the MSE of `out.estimate` against the unknown
// clean image:
//   (1/|I|) sum (est - f)^2 - sigma^2 + (2 sigma^2 / |I|) sum d est(i) / d f(i).
double sure(const ImageF& noisy, const FilterOutput& out, double sigma);

/// Optimal pair of weights for theta_1 est_1 + theta_2 est_2. SURE is
/// quadratic in theta, SURE(theta) = (theta'A theta - 2 theta'b + sum f^2)/|I| - sigma^2,
/// with A the Gram matrix of the two estimates and
/// b_k = sum f est_k - sigma^2 sum d est_k(i)/d f(i).
struct WeightSolution {
  std::array<double, 4> A{};  // row-major 2x2
  std::array<double, 2> b{};
  std::array<double, 2> theta{1.0, 0.0};
  double sure_sbf = 0.0;
  double sure_rbf = 0.0;
  double sure_wbf = 0.0;
  bool degenerate = false;
};

// Condition-number ceiling above which A is treated as singular.
inline constexpr double kMaxCondition = 1e12;

// Solves A theta = b. When A is (near) singular falls back to whichever of
// (1, 0), (0, 1) has the lower SURE and sets `degenerate`.
WeightSolution optimal_weights(const ImageF& noisy, const FilterOutput& out1, const FilterOutput& out2,
                               double sigma);

ImageF combine(const ImageF& est1, const ImageF& est2, const std::array<double, 2>& theta);
ImageF combine(const FilterOutput& out1, const FilterOutput& out2, const std::array<double, 2>& theta);

// Combined estimate and derivative field; the derivative is linear in theta.
FilterOutput combine_outputs(const FilterOutput& out1, const FilterOutput& out2,
                             const std::array<double, 2>& theta);

struct WbfResult {
  ImageF image;
  WeightSolution weights;
  FilterOutput sbf;
  FilterOutput rbf;
  std::optional<ShiftableKernel> kernel;  // set by the fast path only
};

// Fast SBF and RBF sharing one kernel sized for the noisy image's range (the
// box-filtered guide's range is contained in it), then the SURE-optimal blend.
WbfResult wbf(const ImageF& noisy, const BilateralParams& p, double sigma,
              std::optional<int> order = std::nullopt);

// The same blend from the direct filters, with self-derivatives by central
// differences of step h. About three direct passes per filter.
WbfResult wbf_direct(const ImageF& noisy, const BilateralParams& p, double sigma, double h = kDefaultFdStep);

}  // namespace owbf
