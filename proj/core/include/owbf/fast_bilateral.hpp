#pragma once

#include <optional>

#include "owbf/bilateral_direct.hpp"
#include "owbf/fd_derivative.hpp"
#include "owbf/image.hpp"
#include "owbf/shiftable_kernel.hpp"
#include "owbf/spatial.hpp"

namespace owbf {

// Kernel covering the dynamic range of `f`: T = max(f) - min(f), at least 1.
ShiftableKernel kernel_for(const ImageF& f, double sigma_r, std::optional<int> order = std::nullopt);

/// Fast guided bilateral filter with analytic self-derivatives.
///
/// With h_n(i) = exp(-i omega_n guide(i)) the numerator and denominator are
///
///   P(i) = sum_n c_n h_n(i) [g * (conj(h_n) f)](i),
///   Q(i) = sum_n c_n h_n(i) [g * conj(h_n)](i),
///
/// and the estimate is P / Q. Differentiating with respect to f(i), using
/// sum c_n = 1 and sum c_n omega_n = 0,
///
///   dP(i) = g(0) - i chain sum_n c_n omega_n h_n(i) [g * (conj(h_n) f)](i),
///   dQ(i) =      - i chain sum_n c_n omega_n h_n(i) [g * conj(h_n)](i),
///
/// where chain = d guide(i) / d f(i). Near the border g(0) becomes the sum of
/// g(j) over the offsets j whose mirrored sample is pixel i itself, which is
/// what a finite difference of the mirrored filter sees. The self-derivative is
/// (dP - estimate dQ) / Q. Terms n and N - n are complex conjugates, so only
/// n <= N/2 is evaluated with doubled weights and everything stays real.
///
/// Throws ParameterError when the guide's range exceeds the kernel's lobe
/// limit, NumericalError when |Q| < 1e-12 somewhere.
FilterOutput fast_guided(const ImageF& f, const ImageF& guide, double chain, const BilateralParams& p,
                         const ShiftableKernel& kernel);

// guide = f, chain = 1.
FilterOutput fast_sbf(const ImageF& f, const BilateralParams& p, const ShiftableKernel& kernel);

// guide = box_filter(f, L), chain = 1 / (2L + 1)^2. Only the chain term through
// the center pixel's own guide value is kept; the dependence of neighboring
// guide values on f(i) is dropped.
FilterOutput fast_rbf(const ImageF& f, const BilateralParams& p, const ShiftableKernel& kernel);

/// Complex accumulators of the literal per-term loop over all n = 0..N:
/// numer = P, denom = Q, numer_slope = sum c_n omega_n h_n F_n-bar,
/// denom_slope = sum c_n omega_n h_n G_n-bar. Twice the work of fast_guided;
/// meant for cross-checking it and for inspecting the imaginary residue.
struct ShiftableSums {
  ComplexImage numer;
  ComplexImage denom;
  ComplexImage numer_slope;
  ComplexImage denom_slope;
};

ShiftableSums shiftable_sums(const ImageF& f, const ImageF& guide, const BilateralParams& p,
                             const ShiftableKernel& kernel);

namespace probes {

// The fast filters with a frozen kernel, for finite-difference probing.
ProbeFilter fast_sbf(const BilateralParams& p, const ShiftableKernel& kernel);
ProbeFilter fast_rbf(const BilateralParams& p, const ShiftableKernel& kernel);

}  // namespace probes

}  // namespace owbf
