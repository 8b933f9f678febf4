#include "owbf/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "owbf/errors.hpp"
#include "owbf/parallel.hpp"
#include "convolve.hpp"

namespace owbf {

ComplexImage::ComplexImage(ImageF real, ImageF imag) : re(std::move(real)), im(std::move(imag)) {
  require_same_shape(re, im, "ComplexImage");
}

SpatialKernel::SpatialKernel(double sigma_s, std::optional<int> half_width) : sigma_(sigma_s) {
  if (!(sigma_s > 0.0) || !std::isfinite(sigma_s)) {
    throw ParameterError("sigma_s must be positive and finite");
  }
  half_width_ = half_width ? *half_width : static_cast<int>(std::ceil(3.0 * sigma_s));
  if (half_width_ < 0) throw ParameterError("spatial half-width must be >= 0");
  taps_.resize(static_cast<std::size_t>(2 * half_width_ + 1));
  const double scale = -0.5 / (sigma_s * sigma_s);
  for (int t = -half_width_; t <= half_width_; ++t) {
    taps_[static_cast<std::size_t>(t + half_width_)] = std::exp(scale * t * t);
  }
}

double SpatialKernel::mass() const {
  double s = 0.0;
  for (double t : taps_) s += t;
  return s * s;
}

int mirror_index(int i, int n) {
  if (i >= 0 && i < n) return i;
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

ImageF box_filter(const ImageF& f, int radius) {
  if (radius < 1) throw ParameterError("box radius must be >= 1");
  const int w = f.width();
  const int h = f.height();
  const int span = 2 * radius + 1;
  if (span > w || span > h) {
    throw DimensionError("box window " + std::to_string(span) + " exceeds image " +
                         std::to_string(w) + "x" + std::to_string(h));
  }

  // Horizontal window sums, then vertical sums of those, then one division.
  ImageF rows(w, h);
  parallel_rows(h, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      auto src = f.row(y);
      auto dst = rows.row(y);
      double s = 0.0;
      for (int k = -radius; k <= radius; ++k) s += src[mirror_index(k, w)];
      dst[0] = s;
      for (int x = 1; x < w; ++x) {
        s += src[mirror_index(x + radius, w)] - src[mirror_index(x - radius - 1, w)];
        dst[x] = s;
      }
    }
  });

  ImageF out(w, h);
  const double count = static_cast<double>(span) * span;
  // Vertical running sums kept per column, advanced one row at a time so the
  // inner loops stay contiguous. Column blocks are independent.
  parallel_rows(w, [&](int x0, int x1) {
    std::vector<double> sums(static_cast<std::size_t>(x1 - x0), 0.0);
    for (int k = -radius; k <= radius; ++k) {
      auto src = rows.row(mirror_index(k, h));
      for (int x = x0; x < x1; ++x) sums[static_cast<std::size_t>(x - x0)] += src[x];
    }
    for (int y = 0; y < h; ++y) {
      auto dst = out.row(y);
      for (int x = x0; x < x1; ++x) dst[x] = sums[static_cast<std::size_t>(x - x0)] / count;
      if (y + 1 == h) break;
      auto add = rows.row(mirror_index(y + radius + 1, h));
      auto sub = rows.row(mirror_index(y - radius, h));
      for (int x = x0; x < x1; ++x) sums[static_cast<std::size_t>(x - x0)] += add[x] - sub[x];
    }
  });
  return out;
}

namespace detail {

#if defined(__GNUC__) || defined(__clang__)
#define OWBF_VECTOR_EXT 1
// Eight lanes; the compiler splits it when the target has narrower registers.
typedef double Lanes __attribute__((vector_size(64)));
constexpr int kLanes = 8;

inline Lanes load(const double* p) {
  Lanes v;
  std::memcpy(&v, p, sizeof v);
  return v;
}
inline void store(double* p, Lanes v) { std::memcpy(p, &v, sizeof v); }
#endif

// Each output is taps[r] * src[r] + sum_{t<r} taps[t] * (src[t] + src[2r - t]),
// accumulated for t = 0, 1, ..., r - 1 (outermost pair first).
void convolve_line(const double* const* src, std::span<const double> taps, int r, double* out, int w) {
  const double center = taps[static_cast<std::size_t>(r)];
  int x0 = 0;
#ifdef OWBF_VECTOR_EXT
  // Four independent accumulators held in registers across the tap loop.
  constexpr int kBlock = 4 * kLanes;
  for (; x0 + kBlock <= w; x0 += kBlock) {
    const double* c = src[r] + x0;
    Lanes a0 = center * load(c);
    Lanes a1 = center * load(c + kLanes);
    Lanes a2 = center * load(c + 2 * kLanes);
    Lanes a3 = center * load(c + 3 * kLanes);
    for (int t = 0; t < r; ++t) {
      const double k = taps[static_cast<std::size_t>(t)];
      const double* lo = src[t] + x0;
      const double* hi = src[2 * r - t] + x0;
      a0 += k * (load(lo) + load(hi));
      a1 += k * (load(lo + kLanes) + load(hi + kLanes));
      a2 += k * (load(lo + 2 * kLanes) + load(hi + 2 * kLanes));
      a3 += k * (load(lo + 3 * kLanes) + load(hi + 3 * kLanes));
    }
    store(out + x0, a0);
    store(out + x0 + kLanes, a1);
    store(out + x0 + 2 * kLanes, a2);
    store(out + x0 + 3 * kLanes, a3);
  }
  for (; x0 + kLanes <= w; x0 += kLanes) {
    Lanes a = center * load(src[r] + x0);
    for (int t = 0; t < r; ++t) {
      a += taps[static_cast<std::size_t>(t)] * (load(src[t] + x0) + load(src[2 * r - t] + x0));
    }
    store(out + x0, a);
  }
#endif
  for (int x = x0; x < w; ++x) {
    double acc = center * src[r][x];
    for (int t = 0; t < r; ++t) acc += taps[static_cast<std::size_t>(t)] * (src[t][x] + src[2 * r - t][x]);
    out[x] = acc;
  }
}

namespace {

template <int Rows>
void convolve_rows_fixed(const double* const* src, std::span<const double> taps, int r, double* const* out,
                         int w) {
  const int span = 2 * r + 1;
  int x0 = 0;
#ifdef OWBF_VECTOR_EXT
  for (; x0 + 2 * kLanes <= w; x0 += 2 * kLanes) {
    Lanes lo[Rows] = {};
    Lanes hi[Rows] = {};
    for (int i = 0; i < span + Rows - 1; ++i) {
      const Lanes a = load(src[i] + x0);
      const Lanes b = load(src[i] + x0 + kLanes);
      for (int j = 0; j < Rows; ++j) {
        const int t = i - j;
        if (t < 0 || t >= span) continue;
        const double k = taps[static_cast<std::size_t>(t)];
        lo[j] += k * a;
        hi[j] += k * b;
      }
    }
    for (int j = 0; j < Rows; ++j) {
      store(out[j] + x0, lo[j]);
      store(out[j] + x0 + kLanes, hi[j]);
    }
  }
#endif
  for (int x = x0; x < w; ++x) {
    for (int j = 0; j < Rows; ++j) {
      double acc = 0.0;
      for (int t = 0; t < span; ++t) acc += taps[static_cast<std::size_t>(t)] * src[j + t][x];
      out[j][x] = acc;
    }
  }
}

}  // namespace

void convolve_rows(const double* const* src, std::span<const double> taps, int r, double* const* out,
                   int rows, int w) {
  switch (rows) {
    case 1: convolve_rows_fixed<1>(src, taps, r, out, w); break;
    case 2: convolve_rows_fixed<2>(src, taps, r, out, w); break;
    case 3: convolve_rows_fixed<3>(src, taps, r, out, w); break;
    case 4: convolve_rows_fixed<4>(src, taps, r, out, w); break;
    default: throw ParameterError("convolve_rows: unsupported row count");
  }
}

}  // namespace detail

void GaussianFilter::row_pass(const ImageF& in, ImageF& out) const {
  const int w = in.width();
  const int r = kernel_.half_width();
  const auto taps = kernel_.taps();
  parallel_rows(in.height(), [&](int y0, int y1) {
    std::vector<double> padded(static_cast<std::size_t>(w + 2 * r));
    std::vector<const double*> src(taps.size());
    for (std::size_t t = 0; t < taps.size(); ++t) src[t] = padded.data() + t;
    for (int y = y0; y < y1; ++y) {
      auto row = in.row(y);
      for (int x = -r; x < w + r; ++x) padded[static_cast<std::size_t>(x + r)] = row[mirror_index(x, w)];
      detail::convolve_line(src.data(), taps, r, out.row(y).data(), w);
    }
  });
}

void GaussianFilter::column_pass(const ImageF& in, ImageF& out) const {
  const int w = in.width();
  const int h = in.height();
  const int r = kernel_.half_width();
  const auto taps = kernel_.taps();
  parallel_rows(h, [&](int y0, int y1) {
    std::vector<const double*> src(taps.size());
    for (int y = y0; y < y1; ++y) {
      for (std::size_t t = 0; t < taps.size(); ++t) {
        src[t] = in.row(mirror_index(y - r + static_cast<int>(t), h)).data();
      }
      detail::convolve_line(src.data(), taps, r, out.row(y).data(), w);
    }
  });
}

void GaussianFilter::apply(const ImageF& in, ImageF& out) {
  if (!scratch_.same_shape(in)) scratch_ = ImageF(in.width(), in.height());
  if (!out.same_shape(in)) out = ImageF(in.width(), in.height());
  row_pass(in, scratch_);
  column_pass(scratch_, out);
}

ImageF gaussian_filter(const ImageF& f, const SpatialKernel& kernel) {
  GaussianFilter filter(kernel);
  ImageF out;
  filter.apply(f, out);
  return out;
}

ComplexImage gaussian_filter(const ComplexImage& f, const SpatialKernel& kernel) {
  GaussianFilter filter(kernel);
  ComplexImage out;
  filter.apply(f.re, out.re);
  filter.apply(f.im, out.im);
  return out;
}

}  // namespace owbf
