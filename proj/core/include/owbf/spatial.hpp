#pragma once

#include <optional>
#include <span>
#include <vector>

#include "owbf/image.hpp"

namespace owbf {

/// Pair of real rasters holding the real and imaginary parts of a complex
/// field. Both parts always share dimensions.
struct ComplexImage {
  ImageF re;
  ImageF im;

  ComplexImage() = default;
  ComplexImage(int width, int height) : re(width, height), im(width, height) {}
  ComplexImage(ImageF real, ImageF imag);

  int width() const { return re.width(); }
  int height() const { return re.height(); }

  friend bool operator==(const ComplexImage&, const ComplexImage&) = default;
};

/// Truncated, unnormalized Gaussian g(j) = exp(-|j|^2 / (2 sigma_s^2)) on the
/// square [-W, W]^2. The center tap is exactly 1.
class SpatialKernel {
 public:
  // W defaults to ceil(3 sigma_s).
  explicit SpatialKernel(double sigma_s, std::optional<int> half_width = std::nullopt);

  double sigma() const { return sigma_; }
  int half_width() const { return half_width_; }

  // 1-D taps for offsets -W..W; the 2-D kernel is their outer product.
  std::span<const double> taps() const { return taps_; }
  double tap(int offset) const { return taps_[static_cast<std::size_t>(offset + half_width_)]; }
  double center() const { return 1.0; }

  // (sum of 1-D taps)^2: the response to a constant unit image.
  double mass() const;

 private:
  double sigma_;
  int half_width_;
  std::vector<double> taps_;
};

// Symmetric extension without repeating the edge sample (... 2 1 | 0 1 2 ...),
// periodic with period 2(n - 1) for offsets beyond one reflection.
int mirror_index(int i, int n);

// Mean over the (2L+1)^2 window with mirror boundaries. Requires 2L+1 to fit
// in both dimensions.
ImageF box_filter(const ImageF& f, int radius);

/// Separable Gaussian convolution that keeps its scratch buffers between
/// calls. Rows first, then columns. Each output sample is the center tap plus
/// mirrored tap pairs summed from the outside in, in a fixed order.
class GaussianFilter {
 public:
  explicit GaussianFilter(SpatialKernel kernel) : kernel_(std::move(kernel)) {}

  const SpatialKernel& kernel() const { return kernel_; }

  // `out` is resized as needed and may not alias `in`.
  void apply(const ImageF& in, ImageF& out);

 private:
  void row_pass(const ImageF& in, ImageF& out) const;
  void column_pass(const ImageF& in, ImageF& out) const;

  SpatialKernel kernel_;
  ImageF scratch_;
};

ImageF gaussian_filter(const ImageF& f, const SpatialKernel& kernel);

// Real and imaginary parts are filtered independently.
ComplexImage gaussian_filter(const ComplexImage& f, const SpatialKernel& kernel);

}  // namespace owbf
