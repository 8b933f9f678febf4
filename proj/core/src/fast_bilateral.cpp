#include "owbf/fast_bilateral.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "owbf/errors.hpp"
#include "owbf/parallel.hpp"
#include "convolve.hpp"

namespace owbf {

namespace {

// Angles are re-evaluated with cos/sin every this many rotation steps to
// bound the drift of the recurrence.
constexpr int kReanchorInterval = 64;

constexpr double kMinDenominator = 1e-12;

void check_lobe(const ImageF& guide, const ShiftableKernel& kernel) {
  const auto [lo, hi] = min_max(guide);
  if (hi - lo > kernel.lobe_limit() * (1.0 + 1e-12)) {
    throw ParameterError("guide range " + std::to_string(hi - lo) + " exceeds kernel lobe limit " +
                         std::to_string(kernel.lobe_limit()) + " (order " +
                         std::to_string(kernel.order()) + ")");
  }
}

// Total spatial weight with which a pixel enters its own window: g(0) inside,
// more within W of an edge where mirrored offsets land back on the pixel.
// Separable, so one factor per axis.
std::vector<double> self_weights(const SpatialKernel& spatial, int extent) {
  const int r = spatial.half_width();
  std::vector<double> out(static_cast<std::size_t>(extent), 0.0);
  for (int i = 0; i < extent; ++i) {
    if (i >= r && i + r < extent) {
      out[static_cast<std::size_t>(i)] = spatial.center();
      continue;
    }
    double s = 0.0;
    for (int t = -r; t <= r; ++t) {
      if (mirror_index(i + t, extent) == i) s += spatial.tap(t);
    }
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

FilterOutput finish(const ImageF& numer, const ImageF& denom, const ImageF& numer_slope,
                    const ImageF& denom_slope, double chain, const SpatialKernel& spatial) {
  const int w = numer.width();
  const int h = numer.height();
  FilterOutput out{ImageF(w, h), ImageF(w, h)};
  const std::vector<double> self_x = self_weights(spatial, w);
  const std::vector<double> self_y = self_weights(spatial, h);
  parallel_rows(h, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        const double q = denom(x, y);
        if (!(std::abs(q) >= kMinDenominator)) {
          throw NumericalError("shiftable denominator vanished", x, y);
        }
        const double est = numer(x, y) / q;
        const double center_tap = self_x[static_cast<std::size_t>(x)] * self_y[static_cast<std::size_t>(y)];
        const double dp = center_tap + chain * numer_slope(x, y);
        const double dq = chain * denom_slope(x, y);
        out.estimate(x, y) = est;
        out.self_derivative(x, y) = (dp - est * dq) / q;
      }
    }
  });
  return out;
}

struct Term {
  double omega;
  double weight;
  bool anchor;
};

// Folds one filtered output row into the sums; h_n = (c, -s), so
// B = h_n F-bar and C = h_n G-bar.
void accumulate_row(const double* __restrict c, const double* __restrict s, const double* __restrict gbr,
                    const double* __restrict gbi, const double* __restrict fbr, const double* __restrict fbi,
                    double weight, double slope_weight, double* __restrict pn, double* __restrict qn,
                    double* __restrict dp, double* __restrict dq, int n) {
  for (int x = 0; x < n; ++x) {
    const double b_re = c[x] * fbr[x] + s[x] * fbi[x];
    const double b_im = c[x] * fbi[x] - s[x] * fbr[x];
    const double c_re = c[x] * gbr[x] + s[x] * gbi[x];
    const double c_im = c[x] * gbi[x] - s[x] * gbr[x];
    pn[x] += weight * b_re;
    qn[x] += weight * c_re;
    dp[x] += slope_weight * b_im;
    dq[x] += slope_weight * c_im;
  }
}

// Accumulators written by the tile sweeps; tiles own disjoint pixels.
struct Sums {
  ImageF numer, denom, numer_slope, denom_slope;
};

// Output tiles are this many pixels on a side; with a W-pixel halo the trig
// state, the accumulators and the row ring of one tile stay cache resident
// across all terms.
constexpr int kTileWidth = 128;
constexpr int kTileHeight = 128;

struct Tile {
  int x0, x1, y0, y1;
};

// Runs every term over one output tile. Within a term, rows stream top to
// bottom: each input row of the halo'd tile is row-filtered once into a ring
// of slots, and small groups of output rows are column-filtered from the ring
// and folded into the sums straight away. The trig state covers the tile plus
// its halo and is advanced the same way in every tile, so the result does
// not depend on the tiling.
void sweep_tile(const ImageF& f, const ImageF& guide, const std::vector<Term>& terms, double nu,
                std::span<const double> taps, const Tile& tile, Sums& sums) {
  const int w = f.width();
  const int h = f.height();
  const int r = static_cast<int>(taps.size() / 2);
  const int span = 2 * r + 1;
  // The column pass emits up to kMaxRows output rows from 2W + kMaxRows inputs.
  const int slots = span + detail::kMaxRows - 1;

  // Local state window; mirrored neighbors of tile pixels always fall inside.
  const int lx0 = std::max(0, tile.x0 - r);
  const int lx1 = std::min(w, tile.x1 + r);
  const int ly0 = std::max(0, tile.y0 - r);
  const int ly1 = std::min(h, tile.y1 + r);
  const auto lw = static_cast<std::size_t>(lx1 - lx0);
  const auto lh = static_cast<std::size_t>(ly1 - ly0);
  const int tw = tile.x1 - tile.x0;
  const int padded_w = tw + 2 * r;

  std::vector<double> cos_a(lw * lh), sin_a(lw * lh), cos_step(lw * lh), sin_step(lw * lh);
  auto local = [&](std::vector<double>& v, int y) { return v.data() + lw * static_cast<std::size_t>(y - ly0); };
  for (int y = ly0; y < ly1; ++y) {
    const double* g = guide.row(y).data() + lx0;
    double* cs = local(cos_step, y);
    double* ss = local(sin_step, y);
    for (std::size_t x = 0; x < lw; ++x) {
      cs[x] = std::cos(2.0 * nu * g[x]);
      ss[x] = std::sin(2.0 * nu * g[x]);
    }
  }

  // Channels: G re, G im, F re, F im, with G = conj(h_n) = (cos, sin), F = G f.
  constexpr int kChannels = 4;
  // Slot stride is kept off multiples of 4 KiB so the 2W + 1 rows read by the
  // column pass spread over the L1 sets.
  const std::size_t stride = (static_cast<std::size_t>(tw) + 7) / 8 * 8 + 8;
  std::vector<double> ring(static_cast<std::size_t>(kChannels) * slots * stride);
  auto slot = [&](int ch, int row) {
    return ring.data() + stride * (static_cast<std::size_t>(ch) * slots + static_cast<std::size_t>(row % slots));
  };
  const auto pw = static_cast<std::size_t>(padded_w);
  std::vector<double> padded(kChannels * pw);
  std::vector<double> filtered(static_cast<std::size_t>(kChannels) * detail::kMaxRows * stride);
  std::vector<const double*> row_src(static_cast<std::size_t>(kChannels) * span);
  std::vector<const double*> col_src(static_cast<std::size_t>(kChannels) * slots);
  std::vector<double*> col_out(static_cast<std::size_t>(kChannels) * detail::kMaxRows);
  for (int ch = 0; ch < kChannels; ++ch) {
    for (int j = 0; j < detail::kMaxRows; ++j) {
      col_out[static_cast<std::size_t>(ch * detail::kMaxRows + j)] =
          filtered.data() + stride * static_cast<std::size_t>(ch * detail::kMaxRows + j);
    }
  }
  std::vector<int> mirror_col(pw);
  for (int i = 0; i < padded_w; ++i) mirror_col[static_cast<std::size_t>(i)] = mirror_index(tile.x0 - r + i, w) - lx0;
  // Columns whose mirror is the identity map to a contiguous run.
  int run0 = 0;
  while (run0 < padded_w && mirror_col[static_cast<std::size_t>(run0)] != tile.x0 - r + run0 - lx0) ++run0;
  int run1 = run0;
  while (run1 < padded_w && mirror_col[static_cast<std::size_t>(run1)] == tile.x0 - r + run1 - lx0) ++run1;

  auto row_filter = [&](int row) {
    const double* c = local(cos_a, row);
    const double* s = local(sin_a, row);
    const double* fr = f.row(row).data() + lx0;
    double* pc = padded.data();
    double* ps = pc + pw;
    double* pfc = ps + pw;
    double* pfs = pfc + pw;
    auto put = [&](int i, int x) {
      pc[i] = c[x];
      ps[i] = s[x];
      pfc[i] = c[x] * fr[x];
      pfs[i] = s[x] * fr[x];
    };
    for (int i = 0; i < run0; ++i) put(i, mirror_col[static_cast<std::size_t>(i)]);
    const int shift = tile.x0 - r - lx0;
    for (int i = run0; i < run1; ++i) put(i, i + shift);
    for (int i = run1; i < padded_w; ++i) put(i, mirror_col[static_cast<std::size_t>(i)]);
    for (int ch = 0; ch < kChannels; ++ch) {
      const double* line = padded.data() + ch * pw;
      const double** ptrs = row_src.data() + ch * span;
      for (int t = 0; t < span; ++t) ptrs[t] = line + t;
      detail::convolve_line(ptrs, taps, r, slot(ch, row), tw);
    }
  };

  for (const Term& term : terms) {
    if (term.anchor) {
      for (int y = ly0; y < ly1; ++y) {
        const double* g = guide.row(y).data() + lx0;
        double* c = local(cos_a, y);
        double* s = local(sin_a, y);
        for (std::size_t x = 0; x < lw; ++x) {
          c[x] = std::cos(term.omega * g[x]);
          s[x] = std::sin(term.omega * g[x]);
        }
      }
    }

    const double weight = term.weight;
    const double slope_weight = term.weight * term.omega;
    int next = ly0;
    for (int y = tile.y0; y < tile.y1; y += detail::kMaxRows) {
      const int rows = std::min(detail::kMaxRows, tile.y1 - y);
      for (const int need = std::min(ly1 - 1, y + rows - 1 + r); next <= need; ++next) row_filter(next);

      const int inputs = 2 * r + rows;
      for (int i = 0; i < inputs; ++i) {
        const double* base = slot(0, mirror_index(y - r + i, h));
        for (int ch = 0; ch < kChannels; ++ch) {
          col_src[static_cast<std::size_t>(ch * slots + i)] = base + static_cast<std::size_t>(ch) * slots * stride;
        }
      }
      for (int ch = 0; ch < kChannels; ++ch) {
        detail::convolve_rows(col_src.data() + ch * slots, taps, r, col_out.data() + ch * detail::kMaxRows, rows,
                              tw);
      }

      for (int j = 0; j < rows; ++j) {
        const double* gbr = col_out[static_cast<std::size_t>(j)];
        const double* gbi = col_out[static_cast<std::size_t>(detail::kMaxRows + j)];
        const double* fbr = col_out[static_cast<std::size_t>(2 * detail::kMaxRows + j)];
        const double* fbi = col_out[static_cast<std::size_t>(3 * detail::kMaxRows + j)];
        accumulate_row(local(cos_a, y + j) + (tile.x0 - lx0), local(sin_a, y + j) + (tile.x0 - lx0), gbr, gbi, fbr,
                       fbi, weight, slope_weight, sums.numer.row(y + j).data() + tile.x0,
                       sums.denom.row(y + j).data() + tile.x0, sums.numer_slope.row(y + j).data() + tile.x0,
                       sums.denom_slope.row(y + j).data() + tile.x0, tw);
      }
    }

    // Advance every local angle to omega_{n+1} guide.
    double* c = cos_a.data();
    double* s = sin_a.data();
    const double* cs = cos_step.data();
    const double* ss = sin_step.data();
    for (std::size_t i = 0; i < lw * lh; ++i) {
      const double nc = c[i] * cs[i] - s[i] * ss[i];
      const double ns = s[i] * cs[i] + c[i] * ss[i];
      c[i] = nc;
      s[i] = ns;
    }
  }
}

}  // namespace

ShiftableKernel kernel_for(const ImageF& f, double sigma_r, std::optional<int> order) {
  const auto [lo, hi] = min_max(f);
  return ShiftableKernel::build(sigma_r, std::max(1.0, hi - lo), order);
}

FilterOutput fast_guided(const ImageF& f, const ImageF& guide, double chain, const BilateralParams& p,
                         const ShiftableKernel& kernel) {
  p.validate();
  require_same_shape(f, guide, "fast bilateral");
  check_lobe(guide, kernel);

  const int w = f.width();
  const int h = f.height();
  const int order = kernel.order();
  const auto coeffs = kernel.coefficients();
  const auto freqs = kernel.frequencies();
  const double nu = 1.0 / (kernel.sigma_r() * std::sqrt(static_cast<double>(order)));
  const SpatialKernel spatial(p.sigma_s, p.window());

  // Terms n and N - n are conjugate, so n runs to N/2 with doubled weights.
  // The angle is re-evaluated directly every few steps and at omega = 0.
  std::vector<Term> terms;
  const int first = kernel.first_term();
  for (int n = first; 2 * n <= order; ++n) {
    const bool middle = 2 * n == order;
    const double weight = (middle ? 1.0 : 2.0) * kernel.active_scale() * coeffs[static_cast<std::size_t>(n)];
    terms.push_back({freqs[static_cast<std::size_t>(n)], weight, middle || (n - first) % kReanchorInterval == 0});
  }

  Sums sums{ImageF(w, h), ImageF(w, h), ImageF(w, h), ImageF(w, h)};
  std::vector<Tile> tiles;
  for (int y0 = 0; y0 < h; y0 += kTileHeight) {
    for (int x0 = 0; x0 < w; x0 += kTileWidth) {
      tiles.push_back({x0, std::min(w, x0 + kTileWidth), y0, std::min(h, y0 + kTileHeight)});
    }
  }
  parallel_tasks(static_cast<int>(tiles.size()), [&](int i) {
    sweep_tile(f, guide, terms, nu, spatial.taps(), tiles[static_cast<std::size_t>(i)], sums);
  });

  return finish(sums.numer, sums.denom, sums.numer_slope, sums.denom_slope, chain, spatial);
}

FilterOutput fast_sbf(const ImageF& f, const BilateralParams& p, const ShiftableKernel& kernel) {
  return fast_guided(f, f, 1.0, p, kernel);
}

FilterOutput fast_rbf(const ImageF& f, const BilateralParams& p, const ShiftableKernel& kernel) {
  p.validate();
  const double span = 2.0 * p.box_radius + 1.0;
  return fast_guided(f, box_filter(f, p.box_radius), 1.0 / (span * span), p, kernel);
}

ShiftableSums shiftable_sums(const ImageF& f, const ImageF& guide, const BilateralParams& p,
                             const ShiftableKernel& kernel) {
  p.validate();
  require_same_shape(f, guide, "shiftable_sums");
  const int w = f.width();
  const int h = f.height();
  const auto coeffs = kernel.coefficients();
  const auto freqs = kernel.frequencies();
  const SpatialKernel spatial(p.sigma_s, p.window());

  ShiftableSums sums{ComplexImage(w, h), ComplexImage(w, h), ComplexImage(w, h), ComplexImage(w, h)};
  ComplexImage hn(w, h), gn(w, h), fn(w, h);
  for (int n = kernel.first_term(); n <= kernel.last_term(); ++n) {
    const double c = kernel.active_scale() * coeffs[static_cast<std::size_t>(n)];
    const double omega = freqs[static_cast<std::size_t>(n)];
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double angle = omega * guide(x, y);
        hn.re(x, y) = std::cos(angle);
        hn.im(x, y) = -std::sin(angle);
        gn.re(x, y) = hn.re(x, y);
        gn.im(x, y) = -hn.im(x, y);
        fn.re(x, y) = gn.re(x, y) * f(x, y);
        fn.im(x, y) = gn.im(x, y) * f(x, y);
      }
    }
    const ComplexImage fbar = gaussian_filter(fn, spatial);
    const ComplexImage gbar = gaussian_filter(gn, spatial);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double hr = hn.re(x, y);
        const double hi = hn.im(x, y);
        const double b_re = c * (hr * fbar.re(x, y) - hi * fbar.im(x, y));
        const double b_im = c * (hr * fbar.im(x, y) + hi * fbar.re(x, y));
        const double c_re = c * (hr * gbar.re(x, y) - hi * gbar.im(x, y));
        const double c_im = c * (hr * gbar.im(x, y) + hi * gbar.re(x, y));
        sums.numer.re(x, y) += b_re;
        sums.numer.im(x, y) += b_im;
        sums.denom.re(x, y) += c_re;
        sums.denom.im(x, y) += c_im;
        sums.numer_slope.re(x, y) += omega * b_re;
        sums.numer_slope.im(x, y) += omega * b_im;
        sums.denom_slope.re(x, y) += omega * c_re;
        sums.denom_slope.im(x, y) += omega * c_im;
      }
    }
  }
  return sums;
}

namespace probes {

ProbeFilter fast_sbf(const BilateralParams& p, const ShiftableKernel& kernel) {
  return {[p, kernel](const ImageF& f) { return owbf::fast_sbf(f, p, kernel).estimate; }, p.window()};
}

ProbeFilter fast_rbf(const BilateralParams& p, const ShiftableKernel& kernel) {
  return {[p, kernel](const ImageF& f) { return owbf::fast_rbf(f, p, kernel).estimate; },
          p.window() + p.box_radius};
}

}  // namespace probes

}  // namespace owbf
