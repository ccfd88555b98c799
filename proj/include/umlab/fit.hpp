#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace umlab {

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double p = std::nan("");
  int n = 0;
};

/// Ordinary least squares of log(value) on log(t) without preconditions on
/// the number of points or the span (at least two points, all positive).
ExponentFit loglog_least_squares(const std::vector<std::pair<double, double>>& pairs);

/// Growth-exponent fit: at least 4 pairs spanning a decade in t, all values
/// positive (DomainError listing the offending t otherwise).
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& pairs,
                         double p = std::nan(""));

struct DualExponent {
  double p;
  double p_prime;    // p / (p - 1)
  double p_star;     // max(p, p')
  double measured;   // the member of {p, p'} in (1, 2]
};

/// Throws DomainError for p <= 1 (or non-finite p).
DualExponent dual_exponent(double p);

/// d |1/2 - 1/p|, the growth exponent shared by p and p'.
double target_slope(int d, double p);

}  // namespace umlab
