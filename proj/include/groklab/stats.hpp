#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace grok {

// delta = exp(a * l + b), fitted by least squares of ln delta on l.
struct RegressionFit {
  double a = 0.0;
  double b = 0.0;
};

RegressionFit log_space_fit(const std::vector<std::pair<double, double>>& pairs);

struct CorrelationResult {
  double r = 0.0;
  double p = 1.0;  // two-sided, Student-t with n - 2 degrees of freedom
  std::size_t n = 0;
};

CorrelationResult pearson(const std::vector<double>& x, const std::vector<double>& y);

// Regularised incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);
// Two-sided tail probability P(|T| >= |t|) for Student-t with `dof` degrees.
double student_t_two_sided(double t, double dof);

}  // namespace grok
