#include "owbf/sure.hpp"

#include <cmath>

#include "owbf/errors.hpp"

namespace owbf {

namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("noise sigma must be positive");
}

void check_output(const ImageF& noisy, const FilterOutput& out) {
  require_same_shape(noisy, out.estimate, "SURE estimate");
  require_same_shape(noisy, out.self_derivative, "SURE derivative");
}

// Row-major sum of fn(i) with per-row partials; the order is fixed.
template <class Fn>
double reduce(const ImageF& shape, Fn&& fn) {
  double total = 0.0;
  for (int y = 0; y < shape.height(); ++y) {
    double acc = 0.0;
    for (int x = 0; x < shape.width(); ++x) acc += fn(x, y);
    total += acc;
  }
  return total;
}

}  // namespace

double sure(const ImageF& noisy, const FilterOutput& out, double sigma) {
  check_sigma(sigma);
  check_output(noisy, out);
  const double count = static_cast<double>(noisy.size());
  const double residual = reduce(noisy, [&](int x, int y) {
    const double d = out.estimate(x, y) - noisy(x, y);
    return d * d;
  });
  const double divergence = reduce(noisy, [&](int x, int y) { return out.self_derivative(x, y); });
  return residual / count - sigma * sigma + 2.0 * sigma * sigma * divergence / count;
}

ImageF combine(const ImageF& est1, const ImageF& est2, const std::array<double, 2>& theta) {
  require_same_shape(est1, est2, "combine");
  ImageF out(est1.width(), est1.height());
  auto a = est1.pixels();
  auto b = est2.pixels();
  auto o = out.pixels();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = theta[0] * a[i] + theta[1] * b[i];
  return out;
}

ImageF combine(const FilterOutput& out1, const FilterOutput& out2, const std::array<double, 2>& theta) {
  return combine(out1.estimate, out2.estimate, theta);
}

FilterOutput combine_outputs(const FilterOutput& out1, const FilterOutput& out2,
                             const std::array<double, 2>& theta) {
  return {combine(out1.estimate, out2.estimate, theta),
          combine(out1.self_derivative, out2.self_derivative, theta)};
}

WeightSolution optimal_weights(const ImageF& noisy, const FilterOutput& out1, const FilterOutput& out2,
                               double sigma) {
  check_sigma(sigma);
  check_output(noisy, out1);
  check_output(noisy, out2);
  const ImageF& e1 = out1.estimate;
  const ImageF& e2 = out2.estimate;
  const double s2 = sigma * sigma;

  WeightSolution sol;
  const double a11 = reduce(noisy, [&](int x, int y) { return e1(x, y) * e1(x, y); });
  const double a12 = reduce(noisy, [&](int x, int y) { return e1(x, y) * e2(x, y); });
  const double a22 = reduce(noisy, [&](int x, int y) { return e2(x, y) * e2(x, y); });
  const double fe1 = reduce(noisy, [&](int x, int y) { return noisy(x, y) * e1(x, y); });
  const double fe2 = reduce(noisy, [&](int x, int y) { return noisy(x, y) * e2(x, y); });
  const double d1 = reduce(noisy, [&](int x, int y) { return out1.self_derivative(x, y); });
  const double d2 = reduce(noisy, [&](int x, int y) { return out2.self_derivative(x, y); });
  sol.A = {a11, a12, a12, a22};
  sol.b = {fe1 - s2 * d1, fe2 - s2 * d2};

  sol.sure_sbf = sure(noisy, out1, sigma);
  sol.sure_rbf = sure(noisy, out2, sigma);

  // Eigenvalues of the symmetric 2x2 Gram matrix.
  const double half_trace = 0.5 * (a11 + a22);
  const double det = a11 * a22 - a12 * a12;
  const double spread = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
  const double lambda_max = half_trace + spread;
  const double lambda_min = half_trace - spread;
  const bool singular = !(det > 1e-12 * half_trace * half_trace) || !(lambda_min > 0.0) ||
                        lambda_max / lambda_min > kMaxCondition;

  if (singular) {
    sol.degenerate = true;
    sol.theta = sol.sure_sbf <= sol.sure_rbf ? std::array<double, 2>{1.0, 0.0}
                                             : std::array<double, 2>{0.0, 1.0};
  } else {
    std::array<double, 2> t = {(a22 * sol.b[0] - a12 * sol.b[1]) / det,
                               (a11 * sol.b[1] - a12 * sol.b[0]) / det};
    // One step of iterative refinement against the residual.
    const double r0 = sol.b[0] - (a11 * t[0] + a12 * t[1]);
    const double r1 = sol.b[1] - (a12 * t[0] + a22 * t[1]);
    t[0] += (a22 * r0 - a12 * r1) / det;
    t[1] += (a11 * r1 - a12 * r0) / det;
    sol.theta = t;
  }

  sol.sure_wbf = sure(noisy, combine_outputs(out1, out2, sol.theta), sigma);
  return sol;
}

WbfResult wbf(const ImageF& noisy, const BilateralParams& p, double sigma, std::optional<int> order) {
  check_sigma(sigma);
  p.validate();
  ShiftableKernel kernel = kernel_for(noisy, p.sigma_r, order);
  FilterOutput sbf = fast_sbf(noisy, p, kernel);
  FilterOutput rbf = fast_rbf(noisy, p, kernel);
  WeightSolution weights = optimal_weights(noisy, sbf, rbf, sigma);
  ImageF image = combine(sbf, rbf, weights.theta);
  return {std::move(image), weights, std::move(sbf), std::move(rbf), std::move(kernel)};
}

WbfResult wbf_direct(const ImageF& noisy, const BilateralParams& p, double sigma, double h) {
  check_sigma(sigma);
  p.validate();
  FilterOutput sbf = sbf_direct_fd(noisy, p, h);
  FilterOutput rbf = rbf_direct_fd(noisy, p, h);
  WeightSolution weights = optimal_weights(noisy, sbf, rbf, sigma);
  ImageF image = combine(sbf, rbf, weights.theta);
  return {std::move(image), weights, std::move(sbf), std::move(rbf), std::nullopt};
}

}  // namespace owbf
