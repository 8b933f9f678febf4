#include "owbf/bilateral_direct.hpp"

#include <cmath>
#include <vector>

#include "owbf/errors.hpp"
#include "owbf/parallel.hpp"
#include "owbf/spatial.hpp"

namespace owbf {

int BilateralParams::window() const {
  return half_width ? *half_width : static_cast<int>(std::ceil(3.0 * sigma_s));
}

void BilateralParams::validate() const {
  if (!(sigma_s > 0.0) || !std::isfinite(sigma_s)) throw ParameterError("sigma_s must be positive");
  if (!(sigma_r > 0.0) || !std::isfinite(sigma_r)) throw ParameterError("sigma_r must be positive");
  if (half_width && *half_width < 0) throw ParameterError("half-width must be >= 0");
  if (box_radius < 1) throw ParameterError("box radius must be >= 1");
}

ImageF guided_bilateral_direct(const ImageF& f, const ImageF& guide, const BilateralParams& p) {
  p.validate();
  require_same_shape(f, guide, "guided_bilateral_direct");
  const int w = f.width();
  const int h = f.height();
  const int r = p.window();
  const int side = 2 * r + 1;

  std::vector<double> spatial(static_cast<std::size_t>(side) * side);
  const double s_scale = -0.5 / (p.sigma_s * p.sigma_s);
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      spatial[static_cast<std::size_t>((dy + r) * side + dx + r)] = std::exp(s_scale * (dx * dx + dy * dy));
    }
  }
  const double r_scale = -0.5 / (p.sigma_r * p.sigma_r);

  // Column lookup table so interior and border pixels share one loop.
  std::vector<int> col(static_cast<std::size_t>(w + 2 * r));
  for (int x = -r; x < w + r; ++x) col[static_cast<std::size_t>(x + r)] = mirror_index(x, w);

  ImageF out(w, h);
  parallel_rows(h, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        const double center = guide(x, y);
        // Offsets from the center sample keep a constant window exact.
        const double base = f(x, y);
        double num = 0.0;
        double den = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          const int yy = mirror_index(y + dy, h);
          const double* frow = f.row(yy).data();
          const double* grow = guide.row(yy).data();
          const double* srow = spatial.data() + static_cast<std::size_t>(dy + r) * side;
          const int* cols = col.data() + x;
          for (int k = 0; k < side; ++k) {
            const int xx = cols[k];
            const double d = grow[xx] - center;
            const double wgt = srow[k] * std::exp(r_scale * d * d);
            num += wgt * (frow[xx] - base);
            den += wgt;
          }
        }
        out(x, y) = base + num / den;
      }
    }
  });
  return out;
}

ImageF sbf_direct(const ImageF& f, const BilateralParams& p) { return guided_bilateral_direct(f, f, p); }

ImageF rbf_direct(const ImageF& f, const BilateralParams& p) {
  p.validate();
  return guided_bilateral_direct(f, box_filter(f, p.box_radius), p);
}

ImageF oracle_bilateral_direct(const ImageF& f, const ImageF& clean, const BilateralParams& p) {
  return guided_bilateral_direct(f, clean, p);
}

}  // namespace owbf
