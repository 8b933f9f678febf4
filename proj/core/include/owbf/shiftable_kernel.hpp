#pragma once

#include <optional>
#include <span>
#include <vector>

namespace owbf {

inline constexpr int kMaxKernelOrder = 4096;
inline constexpr int kMinKernelOrder = 4;

// Ceiling on sup |cos^N - gaussian| over [-T, T] for the automatic order.
inline constexpr double kKernelTolerance = 5e-3;

// Ceiling, in gray levels, on sup |t| |kernel error(t)| over [-T, T] for the
// automatic order. A weight error at range offset t moves the filtered value
// by roughly that error times t, so this bounds the per-weight bias against
// the exact filter. It is what actually drives N for typical sigma_r.
inline constexpr double kBiasTolerance = 0.015;

// Binomial tail mass (both tails together) that the filters may skip. Skipped
// terms move the applied kernel by at most 2 * kTailMass anywhere.
inline constexpr double kTailMass = 2e-6;

double gaussian_range_kernel(double t, double sigma_r);

/// Raised-cosine approximation of the Gaussian range kernel,
///
///   cos(t / (sigma_r sqrt(N)))^N = sum_n c_n exp(i omega_n t),
///   c_n = 2^-N binom(N, n),  omega_n = (2n - N) / (sigma_r sqrt(N)),
///
/// valid for |t| <= T, where the cosine stays inside its central lobe.
class ShiftableKernel {
 public:
  // Order: `order` when given, otherwise the smallest N >= kMinKernelOrder
  // that satisfies the lobe condition N >= (2T / (pi sigma_r))^2 and keeps
  // both error measures (kernel_errors, plus the skipped tail's share) under
  // kKernelTolerance and kBiasTolerance. Throws ParameterError when N would
  // exceed kMaxKernelOrder. An explicit order is taken as is; the filters
  // check the lobe condition against their data.
  //
  // `tail_mass` selects the active terms: the largest symmetric run of n
  // around N/2 whose excluded coefficients sum to at most tail_mass. Pass 0
  // to keep every term.
  static ShiftableKernel build(double sigma_r, double range, std::optional<int> order = std::nullopt,
                               double tail_mass = kTailMass);

  int order() const { return order_; }
  double sigma_r() const { return sigma_r_; }
  double range() const { return range_; }

  std::span<const double> coefficients() const { return coeffs_; }
  std::span<const double> frequencies() const { return freqs_; }

  // Active terms are n in [first_term(), order() - first_term()]. Their
  // coefficients times active_scale() sum to 1, so the truncated expansion is
  // itself exact at t = 0 and keeps sum c_n omega_n = 0.
  int first_term() const { return first_term_; }
  int last_term() const { return order_ - first_term_; }
  double active_scale() const { return active_scale_; }
  double skipped_mass() const { return skipped_mass_; }

  // The truncated expansion the filters actually apply:
  // active_scale * sum over active n of c_n cos(omega_n t).
  double evaluate_active(double t) const;

  // Largest |t| for which the cosine argument stays within [-pi/2, pi/2].
  double lobe_limit() const;

  // cos(t / (sigma_r sqrt(N)))^N.
  double evaluate(double t) const;

 private:
  ShiftableKernel(double sigma_r, double range, int order, double tail_mass);

  double sigma_r_;
  double range_;
  int order_;
  int first_term_ = 0;
  double active_scale_ = 1.0;
  double skipped_mass_ = 0.0;
  std::vector<double> coeffs_;
  std::vector<double> freqs_;
};

struct KernelErrors {
  double sup = 0.0;       // sup |cos^N(t) - gaussian(t)|
  double weighted = 0.0;  // sup |t| |cos^N(t) - gaussian(t)|, gray levels
};

// Both error measures over a uniform grid on [0, T] (the functions are even).
// Used by the order search; `samples` controls the grid density.
KernelErrors kernel_errors(int order, double sigma_r, double range, int samples = 4096);

// Number of leading (and, by symmetry, trailing) coefficients whose combined
// mass over both tails stays within tail_mass.
int skipped_terms(std::span<const double> coeffs, double tail_mass);

// Lobe condition alone: ceil((2T / (pi sigma_r))^2).
int lobe_order(double sigma_r, double range);

}  // namespace owbf
