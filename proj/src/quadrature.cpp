#include "umlab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "umlab/errors.hpp"

namespace umlab {

namespace {

GaussRule compute_rule(int n) {
  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

}  // namespace

std::shared_ptr<const GaussRule> gauss_legendre(int n) {
  if (n < 1 || n > 4096) throw InvalidArgument("Gauss-Legendre order out of range");
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const GaussRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const GaussRule>(compute_rule(n));
  return slot;
}

GaussRule composite_gauss(double a, double b, int panels, int m) {
  if (panels < 1) throw InvalidArgument("composite rule needs at least one panel");
  const auto base = gauss_legendre(m);
  GaussRule out;
  out.nodes.reserve(static_cast<std::size_t>(panels * m));
  out.weights.reserve(static_cast<std::size_t>(panels * m));
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int k = 0; k < m; ++k) {
      out.nodes.push_back(lo + 0.5 * h * (base->nodes[static_cast<std::size_t>(k)] + 1.0));
      out.weights.push_back(0.5 * h * base->weights[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

}  // namespace umlab
