#include "grid.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "owbf/errors.hpp"

namespace owbf::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

double number(std::string_view token, std::string_view whole) {
  token = trim(token);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || ec != std::errc() || end != token.data() + token.size() || !std::isfinite(v)) {
    throw ParameterError("bad number '" + std::string(token) + "' in '" + std::string(whole) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<double> parse_values(std::string_view text) {
  std::vector<double> out;
  for (std::string_view item : split(text, ',')) {
    const auto bounds = split(item, ':');
    if (bounds.size() == 1) {
      out.push_back(number(bounds[0], text));
      continue;
    }
    if (bounds.size() > 3) throw ParameterError("bad range '" + std::string(item) + "'");
    const double lo = number(bounds[0], text);
    const double hi = number(bounds[1], text);
    const double step = bounds.size() == 3 ? number(bounds[2], text) : 1.0;
    if (!(step > 0.0) || hi < lo) throw ParameterError("bad range '" + std::string(item) + "'");
    // Counted rather than accumulated so 10:100:10 ends exactly at 100.
    const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (count > 100000) throw ParameterError("range '" + std::string(item) + "' is too long");
    for (long k = 0; k < count; ++k) out.push_back(lo + static_cast<double>(k) * step);
  }
  return out;
}

std::pair<double, double> parse_pair(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ParameterError("expected 'sigma_s,sigma_r', got '" + std::string(text) + "'");
  return {number(parts[0], text), number(parts[1], text)};
}

}  // namespace owbf::cli
