#pragma once

#include <functional>
#include <span>
#include <vector>

#include "owbf/bilateral_direct.hpp"
#include "owbf/image.hpp"

namespace owbf {

struct PixelPos {
  int x = 0;
  int y = 0;
};

/// A whole-image filter probed by finite differences. `radius` bounds how far
/// the output at a pixel reaches into the input; with radius >= 0 each probe
/// only re-filters a (2 radius + 1)^2 crop. radius < 0 means "re-filter the
/// whole image".
struct ProbeFilter {
  std::function<ImageF(const ImageF&)> apply;
  int radius = -1;
};

namespace probes {

ProbeFilter identity();
ProbeFilter box(int radius);
ProbeFilter sbf_direct(const BilateralParams& p);
ProbeFilter rbf_direct(const BilateralParams& p);

}  // namespace probes

inline constexpr double kDefaultFdStep = 1e-3;

// Central difference [F(f + h e_i)(i) - F(f - h e_i)(i)] / 2h at each pixel.
std::vector<double> fd_derivative(const ProbeFilter& filter, const ImageF& f,
                                  std::span<const PixelPos> pixels, double h = kDefaultFdStep);

// The same at every pixel; cost is |I| * 2 probes.
ImageF fd_self_derivative(const ProbeFilter& filter, const ImageF& f, double h = kDefaultFdStep);

// Direct SBF / RBF estimates with their self-derivative fields by central
// differences. A probe at pixel i only re-evaluates the output at i (the RBF
// guide is updated where the perturbed pixel enters its box), so the whole
// field costs two extra direct passes rather than |I| full filters.
FilterOutput sbf_direct_fd(const ImageF& f, const BilateralParams& p, double h = kDefaultFdStep);
FilterOutput rbf_direct_fd(const ImageF& f, const BilateralParams& p, double h = kDefaultFdStep);

}  // namespace owbf
