#include "owbf/fd_derivative.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "owbf/errors.hpp"
#include "owbf/parallel.hpp"
#include "owbf/spatial.hpp"

namespace owbf {

namespace probes {

ProbeFilter identity() {
  return {[](const ImageF& f) { return f; }, 0};
}

ProbeFilter box(int radius) {
  return {[radius](const ImageF& f) { return box_filter(f, radius); }, radius};
}

ProbeFilter sbf_direct(const BilateralParams& p) {
  return {[p](const ImageF& f) { return owbf::sbf_direct(f, p); }, p.window()};
}

ProbeFilter rbf_direct(const BilateralParams& p) {
  return {[p](const ImageF& f) { return owbf::rbf_direct(f, p); }, p.window() + p.box_radius};
}

}  // namespace probes

namespace {

// A (2 radius + 1)-wide crop, slid inward where it would cross the image
// edge. Clipped sides coincide with the image border, where mirror reflection
// matches the full image; unclipped sides are at least `radius` away from the
// probed pixel. Either way the probed output equals the full-image output.
struct Window {
  int x0, y0, w, h;
};

int window_start(int center, int radius, int extent) {
  const int span = std::min(extent, 2 * radius + 1);
  return std::clamp(center - radius, 0, extent - span);
}

Window probe_window(const ImageF& f, PixelPos pos, int radius) {
  if (radius < 0) return {0, 0, f.width(), f.height()};
  return {window_start(pos.x, radius, f.width()), window_start(pos.y, radius, f.height()),
          std::min(f.width(), 2 * radius + 1), std::min(f.height(), 2 * radius + 1)};
}

double probe(const ProbeFilter& filter, const ImageF& f, PixelPos pos, double h) {
  const Window win = probe_window(f, pos, filter.radius);
  ImageF local = crop(f, win.x0, win.y0, win.w, win.h);
  const int lx = pos.x - win.x0;
  const int ly = pos.y - win.y0;
  const double base = local(lx, ly);
  local(lx, ly) = base + h;
  const double plus = filter.apply(local)(lx, ly);
  local(lx, ly) = base - h;
  const double minus = filter.apply(local)(lx, ly);
  return (plus - minus) / (2.0 * h);
}

}  // namespace

std::vector<double> fd_derivative(const ProbeFilter& filter, const ImageF& f,
                                  std::span<const PixelPos> pixels, double h) {
  if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
  std::vector<double> out;
  out.reserve(pixels.size());
  for (const PixelPos& pos : pixels) {
    if (pos.x < 0 || pos.y < 0 || pos.x >= f.width() || pos.y >= f.height()) {
      throw DimensionError("probe pixel outside image");
    }
    out.push_back(probe(filter, f, pos, h));
  }
  return out;
}

ImageF fd_self_derivative(const ProbeFilter& filter, const ImageF& f, double h) {
  if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
  ImageF out(f.width(), f.height());
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) out(x, y) = probe(filter, f, {x, y}, h);
  }
  return out;
}

namespace {

// Output of the guided bilateral filter at one pixel after adding `delta` to
// f at that pixel. The guide moves by delta times a separable multiplicity:
// guide_scale * gx(column) * gy(row), where gx, gy count how often the
// perturbed pixel enters the guide at that position. Sample order matches
// guided_bilateral_direct.
class PixelProbe {
 public:
  PixelProbe(const ImageF& f, const ImageF& guide, const BilateralParams& p, int guide_radius)
      : f_(f), guide_(guide), r_(p.window()), side_(2 * r_ + 1), guide_radius_(guide_radius) {
    spatial_.resize(static_cast<std::size_t>(side_) * side_);
    const double s_scale = -0.5 / (p.sigma_s * p.sigma_s);
    for (int dy = -r_; dy <= r_; ++dy) {
      for (int dx = -r_; dx <= r_; ++dx) {
        spatial_[static_cast<std::size_t>((dy + r_) * side_ + dx + r_)] = std::exp(s_scale * (dx * dx + dy * dy));
      }
    }
    r_scale_ = -0.5 / (p.sigma_r * p.sigma_r);
    const double span = 2.0 * guide_radius + 1.0;
    guide_scale_ = guide_radius > 0 ? 1.0 / (span * span) : 1.0;
    col_.resize(static_cast<std::size_t>(f.width() + 2 * r_));
    for (int x = -r_; x < f.width() + r_; ++x) col_[static_cast<std::size_t>(x + r_)] = mirror_index(x, f.width());
  }

  double derivative(int x, int y, double h) {
    multiplicities(x, y);
    return (evaluate(x, y, h) - evaluate(x, y, -h)) / (2.0 * h);
  }

 private:
  // How many taps of the guide's box at `pos` land on `target`.
  int box_hits(int pos, int target, int extent) const {
    if (guide_radius_ == 0) return pos == target ? 1 : 0;
    int n = 0;
    for (int k = -guide_radius_; k <= guide_radius_; ++k) n += mirror_index(pos + k, extent) == target ? 1 : 0;
    return n;
  }

  void multiplicities(int x, int y) {
    gx_.resize(static_cast<std::size_t>(side_));
    gy_.resize(static_cast<std::size_t>(side_));
    rows_.resize(static_cast<std::size_t>(side_));
    for (int k = 0; k < side_; ++k) {
      gx_[static_cast<std::size_t>(k)] = box_hits(col_[static_cast<std::size_t>(x + k)], x, f_.width());
      const int yy = mirror_index(y - r_ + k, f_.height());
      rows_[static_cast<std::size_t>(k)] = yy;
      gy_[static_cast<std::size_t>(k)] = box_hits(yy, y, f_.height());
    }
    center_hits_ = box_hits(x, x, f_.width()) * box_hits(y, y, f_.height());
  }

  double evaluate(int x, int y, double delta) const {
    const double gd = delta * guide_scale_;
    const double center = guide_(x, y) + gd * center_hits_;
    const double base = f_(x, y) + delta;
    double num = 0.0;
    double den = 0.0;
    for (int j = 0; j < side_; ++j) {
      const int yy = rows_[static_cast<std::size_t>(j)];
      const double* frow = f_.row(yy).data();
      const double* grow = guide_.row(yy).data();
      const double* srow = spatial_.data() + static_cast<std::size_t>(j) * side_;
      const int* cols = col_.data() + x;
      const int gy = gy_[static_cast<std::size_t>(j)];
      for (int k = 0; k < side_; ++k) {
        const int xx = cols[k];
        double g = grow[xx];
        double fv = frow[xx];
        if (gy != 0) g += gd * gy * gx_[static_cast<std::size_t>(k)];
        if (yy == y && xx == x) fv += delta;
        const double d = g - center;
        const double wgt = srow[k] * std::exp(r_scale_ * d * d);
        num += wgt * (fv - base);
        den += wgt;
      }
    }
    return base + num / den;
  }

  const ImageF& f_;
  const ImageF& guide_;
  int r_;
  int side_;
  int guide_radius_;
  double r_scale_ = 0.0;
  double guide_scale_ = 1.0;
  int center_hits_ = 0;
  std::vector<double> spatial_;
  std::vector<int> col_, gx_, gy_, rows_;
};

ImageF probe_field(const ImageF& f, const ImageF& guide, const BilateralParams& p, int guide_radius, double h) {
  if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
  ImageF out(f.width(), f.height());
  parallel_rows(f.height(), [&](int y0, int y1) {
    PixelProbe probe(f, guide, p, guide_radius);
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < f.width(); ++x) out(x, y) = probe.derivative(x, y, h);
    }
  });
  return out;
}

}  // namespace

FilterOutput sbf_direct_fd(const ImageF& f, const BilateralParams& p, double h) {
  p.validate();
  return {sbf_direct(f, p), probe_field(f, f, p, 0, h)};
}

FilterOutput rbf_direct_fd(const ImageF& f, const BilateralParams& p, double h) {
  p.validate();
  const ImageF guide = box_filter(f, p.box_radius);
  return {guided_bilateral_direct(f, guide, p), probe_field(f, guide, p, p.box_radius, h)};
}

}  // namespace owbf
