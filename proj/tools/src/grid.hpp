#pragma once

#include <string_view>
#include <utility>
#include <vector>

namespace owbf::cli {

// "2,3,4" lists values; "lo:hi" and "lo:hi:step" expand inclusive ranges
// (step defaults to 1). Both forms can be mixed: "1,5:7" -> 1 5 6 7.
// Throws ParameterError on malformed input.
std::vector<double> parse_values(std::string_view text);

// "sigma_s,sigma_r", e.g. "5,30".
std::pair<double, double> parse_pair(std::string_view text);

}  // namespace owbf::cli
