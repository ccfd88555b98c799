#pragma once

#include <memory>
#include <vector>

namespace umlab {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule, computed once per n by Newton iteration on the Legendre
/// recurrence and cached (thread-safe).
std::shared_ptr<const GaussRule> gauss_legendre(int n);

/// Composite rule: `panels` equal panels on [a, b], each with an m-point
/// Gauss-Legendre rule. Nodes are returned in increasing order.
GaussRule composite_gauss(double a, double b, int panels, int m);

}  // namespace umlab
