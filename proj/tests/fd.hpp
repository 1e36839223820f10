#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace groktest {

// Central difference of f along coordinate i of x.
inline double central_diff(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                           std::size_t i, double h = 1e-5) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double fp = f(x);
  x[i] = x0 - h;
  const double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

// |a - b| / max(|a|, |b|, floor); the floor keeps near-zero entries from
// turning rounding noise into a large ratio.
inline double rel_err(double a, double b, double floor = 1e-4) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace groktest
