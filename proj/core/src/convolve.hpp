#pragma once

#include <span>

namespace owbf::detail {

// out[x] = taps[r] src[r][x] + sum_{t<r} taps[t] (src[t][x] + src[2r-t][x]),
// where src[t] points at the input aligned with tap t (2r + 1 pointers).
void convolve_line(const double* const* src, std::span<const double> taps, int r, double* out, int w);

// Filters `rows` consecutive output lines at once (1 <= rows <= kMaxRows).
// src holds 2r + rows input lines; out[j] = sum_{t=0}^{2r} taps[t] src[j + t],
// accumulated in increasing t. Each input line is loaded once for all rows.
inline constexpr int kMaxRows = 4;
void convolve_rows(const double* const* src, std::span<const double> taps, int r, double* const* out,
                   int rows, int w);

}  // namespace owbf::detail
