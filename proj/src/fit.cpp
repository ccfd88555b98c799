#include "umlab/fit.hpp"

#include <algorithm>
#include <sstream>

#include "umlab/errors.hpp"

namespace umlab {

ExponentFit loglog_least_squares(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 2) throw InvalidArgument("log-log fit needs at least two points");
  const double n = static_cast<double>(pairs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [t, v] : pairs) {
    if (!(t > 0.0) || !(v > 0.0)) throw DomainError("log-log fit needs positive t and values");
    mx += std::log(t);
    my += std::log(v);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [t, v] : pairs) {
    const double dx = std::log(t) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("log-log fit needs distinct t values");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (const auto& [t, v] : pairs) {
    const double r = std::log(v) - (fit.intercept + fit.slope * std::log(t));
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  fit.n = static_cast<int>(pairs.size());
  fit.t_min = std::min_element(pairs.begin(), pairs.end())->first;
  fit.t_max = std::max_element(pairs.begin(), pairs.end())->first;
  return fit;
}

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& pairs, double p) {
  if (pairs.size() < 4) throw InvalidArgument("exponent fit needs at least 4 pairs");
  std::ostringstream bad;
  for (const auto& [t, v] : pairs)
    if (!(v > 0.0)) bad << ' ' << t;
  if (!bad.str().empty()) throw DomainError("nonpositive values at t =" + bad.str());
  double lo = pairs.front().first, hi = lo;
  for (const auto& [t, v] : pairs) {
    if (!(t > 0.0)) throw DomainError("exponent fit needs positive t");
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  if (hi < 10.0 * lo) throw InvalidArgument("t values must span at least one decade");
  ExponentFit fit = loglog_least_squares(pairs);
  fit.p = p;
  return fit;
}

DualExponent dual_exponent(double p) {
  if (!std::isfinite(p) || !(p > 1.0)) throw DomainError("exponent p must lie in (1, inf)");
  const double q = p / (p - 1.0);
  return {p, q, std::max(p, q), p <= 2.0 ? p : q};
}

double target_slope(int d, double p) { return d * std::abs(0.5 - 1.0 / p); }

}  // namespace umlab
