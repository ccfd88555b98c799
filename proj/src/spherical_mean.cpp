#include <cmath>
#include <numbers>

#include "umlab/errors.hpp"
#include "umlab/quadrature.hpp"
#include "umlab/symbols.hpp"

namespace umlab {

namespace {

// Product rule in hyperspherical angles: Gauss-Legendre in each polar angle
// (integrand weighted by sin^k), trapezoid in the azimuth. Returns the
// average of exp(i t Phi) normalized by the rule's own total weight, so the
// result is a convex combination of unit complex numbers.
Complex product_rule_mean(const Symbol& sym, double t, int n) {
  const int d = sym.dimension();
  const int polar = d - 2;
  const int azimuth = 2 * n;
  const auto rule = gauss_legendre(n);

  Complex sum = 0.0;
  double total = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(polar), 0);
  Vec w(d);
  while (true) {
    double weight = 1.0;
    double sin_prod = 1.0;
    for (int j = 0; j < polar; ++j) {
      const double theta = 0.5 * std::numbers::pi * (rule->nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])] + 1.0);
      const double s = std::sin(theta);
      weight *= rule->weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])] * std::pow(s, d - 2 - j);
      w(j) = sin_prod * std::cos(theta);
      sin_prod *= s;
    }
    for (int a = 0; a < azimuth; ++a) {
      const double phi = 2.0 * std::numbers::pi * a / azimuth;
      w(d - 2) = sin_prod * std::cos(phi);
      w(d - 1) = sin_prod * std::sin(phi);
      const double v = sym.eval(w);
      sum += weight * Complex(std::cos(t * v), std::sin(t * v));
      total += weight;
    }
    int j = polar - 1;
    while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == n) idx[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) break;
  }
  return sum / total;
}

long node_count(int d, int n) {
  long c = 2L * n;
  for (int j = 0; j < d - 2; ++j) c *= n;
  return c;
}

}  // namespace

SphericalMeanResult spherical_mean(const Symbol& sym, double t, double tol, long max_nodes) {
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (!std::isfinite(t)) throw InvalidArgument("t must be finite");
  const int d = sym.dimension();
  int n = 16;
  Complex prev = product_rule_mean(sym, t, n);
  while (true) {
    const int next = 2 * n;
    if (next > 4096 || node_count(d, next) > max_nodes) {
      throw BudgetError("spherical mean refinement budget exhausted", prev, std::nan(""));
    }
    const Complex cur = product_rule_mean(sym, t, next);
    const double gap = std::abs(cur - prev);
    if (gap < tol) return {cur, gap, node_count(d, next)};
    if (node_count(d, 2 * next) > max_nodes || 2 * next > 4096)
      throw BudgetError("spherical mean refinement budget exhausted", cur, gap);
    prev = cur;
    n = next;
  }
}

}  // namespace umlab
