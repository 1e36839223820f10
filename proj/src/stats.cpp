#include "groklab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "groklab/errors.hpp"

namespace grok {

RegressionFit log_space_fit(const std::vector<std::pair<double, double>>& pairs) {
  for (const auto& [l, d] : pairs)
    if (!(d > 0.0)) throw NonPositiveDelta("log_space_fit: every delta must be positive");
  const double n = static_cast<double>(pairs.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [l, d] : pairs) {
    sx += l;
    sy += std::log(d);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [l, d] : pairs) {
    sxx += (l - mx) * (l - mx);
    sxy += (l - mx) * (std::log(d) - my);
  }
  if (pairs.size() < 2 || !(sxx > 0.0)) throw DegenerateDesign("log_space_fit: need at least two distinct l values");
  RegressionFit f;
  f.a = sxy / sxx;
  f.b = my - f.a * mx;
  return f;
}

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("incomplete_beta: a and b must be positive");
  if (x < 0.0 || x > 1.0) throw InvalidArgument("incomplete_beta: x must lie in [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(lbt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double dof) {
  if (!(dof > 0.0)) throw InvalidArgument("student_t_two_sided: dof must be positive");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

CorrelationResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionMismatch("pearson: samples differ in length");
  if (x.size() < 3) throw TooFewSamples("pearson: need at least 3 samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw ZeroVariance("pearson: a sample has zero variance");
  CorrelationResult out;
  out.n = x.size();
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double dof = n - 2.0;
  const double one_minus = 1.0 - out.r * out.r;
  out.p = one_minus <= 0.0 ? 0.0 : student_t_two_sided(out.r * std::sqrt(dof / one_minus), dof);
  return out;
}

}  // namespace grok
