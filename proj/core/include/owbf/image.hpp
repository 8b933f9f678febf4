#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace owbf {

/// Real-valued grayscale raster stored row-major. Samples are gray levels;
/// values outside [0, 255] are allowed for noisy and intermediate images.
class ImageF {
 public:
  ImageF() = default;
  ImageF(int width, int height, double fill = 0.0);
  ImageF(int width, int height, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int x, int y) { return data_[index(x, y)]; }
  double operator()(int x, int y) const { return data_[index(x, y)]; }

  std::span<double> row(int y) {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const double> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  std::span<double> pixels() { return data_; }
  std::span<const double> pixels() const { return data_; }

  bool same_shape(const ImageF& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const ImageF&, const ImageF&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

ImageF transpose(const ImageF& image);

// Copies the rectangle [x0, x0 + w) x [y0, y0 + h).
ImageF crop(const ImageF& image, int x0, int y0, int w, int h);

std::pair<double, double> min_max(const ImageF& image);

bool all_finite(const ImageF& image);

// Throws DimensionError naming `what` when the shapes differ.
void require_same_shape(const ImageF& a, const ImageF& b, std::string_view what);

}  // namespace owbf
