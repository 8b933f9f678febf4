#include "owbf/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "owbf/errors.hpp"

namespace owbf {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw DimensionError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
}

}  // namespace

ImageF::ImageF(int width, int height, double fill) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

ImageF::ImageF(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw DimensionError("image data has " + std::to_string(data_.size()) + " samples, expected " +
                         std::to_string(static_cast<std::size_t>(width) * height));
  }
}

ImageF transpose(const ImageF& image) {
  ImageF out(image.height(), image.width());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) out(y, x) = image(x, y);
  }
  return out;
}

ImageF crop(const ImageF& image, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || w <= 0 || h <= 0 || x0 + w > image.width() || y0 + h > image.height()) {
    throw DimensionError("crop rectangle outside image");
  }
  ImageF out(w, h);
  for (int y = 0; y < h; ++y) {
    auto src = image.row(y0 + y).subspan(static_cast<std::size_t>(x0), static_cast<std::size_t>(w));
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

std::pair<double, double> min_max(const ImageF& image) {
  auto [lo, hi] = std::minmax_element(image.pixels().begin(), image.pixels().end());
  return {*lo, *hi};
}

bool all_finite(const ImageF& image) {
  return std::all_of(image.pixels().begin(), image.pixels().end(),
                     [](double v) { return std::isfinite(v); });
}

void require_same_shape(const ImageF& a, const ImageF& b, std::string_view what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": dimension mismatch " + std::to_string(a.width()) +
                         "x" + std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                         "x" + std::to_string(b.height()));
  }
}

}  // namespace owbf
