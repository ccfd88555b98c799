#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "random.hpp"
#include "umlab/errors.hpp"
#include "umlab/symbols.hpp"

namespace umlab {

const char* to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::Minimum: return "min";
    case CriticalKind::Maximum: return "max";
    case CriticalKind::Saddle: return "saddle";
    case CriticalKind::Degenerate: return "degenerate";
  }
  return "?";
}

bool CriticalPointSearch::morse() const {
  if (search_failed || points.empty()) return false;
  for (const auto& p : points)
    if (p.kind == CriticalKind::Degenerate) return false;
  return true;
}

CriticalKind classify_eigenvalues(const Vec& eigenvalues) {
  const double scale = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double threshold = kDegeneracyThreshold * (1.0 + scale);
  int pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (std::abs(eigenvalues(i)) < threshold) return CriticalKind::Degenerate;
    (eigenvalues(i) > 0 ? pos : neg)++;
  }
  if (neg == 0) return CriticalKind::Minimum;
  if (pos == 0) return CriticalKind::Maximum;
  return CriticalKind::Saddle;
}

namespace {

struct Cap {
  int axis;
  int sign;
};

Cap best_cap(const Vec& w) {
  Eigen::Index k = 0;
  w.cwiseAbs().maxCoeff(&k);
  return {static_cast<int>(k), w(k) >= 0 ? 1 : -1};
}

Vec to_cap_coordinates(const Vec& w, Cap cap) {
  const double s = std::abs(w(cap.axis));
  Vec u(w.size() - 1);
  for (Eigen::Index i = 0, k = 0; i < w.size(); ++i)
    if (i != cap.axis) u(k++) = w(i) / s;
  return u;
}

double geodesic_distance(const Vec& a, const Vec& b) {
  return 2.0 * std::asin(std::min(1.0, 0.5 * (a - b).norm()));
}

}  // namespace

CriticalPointSearch sphere_critical_points(const Symbol& sym, int n_starts, double tol) {
  const int d = sym.dimension();
  if (n_starts < 2 * d) throw InvalidArgument("sphere search needs at least 2d starts");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");

  std::vector<ChartPhase> charts;
  for (int k = 0; k < d; ++k)
    for (int s : {+1, -1}) charts.push_back(cap_chart(sym, k, s));
  auto chart_of = [&](Cap c) -> const ChartPhase& {
    return charts[static_cast<std::size_t>(2 * c.axis + (c.sign > 0 ? 0 : 1))];
  };

  std::vector<Vec> starts;
  for (int k = 0; k < d; ++k)
    for (int s : {+1, -1}) {
      Vec e = Vec::Zero(d);
      e(k) = s;
      starts.push_back(e);
    }
  std::mt19937_64 rng(0x5eed5eedULL);
  while (static_cast<int>(starts.size()) < n_starts) {
    Vec g(d);
    for (int i = 0; i < d; ++i) g(i) = detail::gaussian(rng);
    if (g.norm() > 1e-3) starts.push_back(g / g.norm());
  }

  CriticalPointSearch out;
  out.starts = n_starts;
  constexpr int kMaxIter = 100;
  constexpr double kMaxStep = 0.5;

  for (const Vec& start : starts) {
    Vec w = start;
    bool converged = false;
    for (int it = 0; it < kMaxIter; ++it) {
      const Cap cap = best_cap(w);
      const ChartPhase& chart = chart_of(cap);
      Vec u = to_cap_coordinates(w, cap);
      const Vec g = chart.gradient(u);
      if (g.norm() <= tol) {
        converged = true;
        break;
      }
      const Mat h = chart.hessian(u);
      Eigen::FullPivLU<Mat> lu(h);
      if (!lu.isInvertible()) break;
      Vec step = -lu.solve(g);
      if (!step.allFinite()) break;
      if (step.norm() > kMaxStep) step *= kMaxStep / step.norm();
      u += step;
      w = normalize_direction(cap_embed(u, cap.axis, cap.sign));
    }
    if (!converged) continue;
    ++out.converged_starts;

    const Cap cap = best_cap(w);
    const ChartPhase& chart = chart_of(cap);
    const Vec u = to_cap_coordinates(w, cap);
    Eigen::SelfAdjointEigenSolver<Mat> eig(chart.hessian(u), Eigen::EigenvaluesOnly);
    SphereCriticalPoint p;
    p.location = w;
    p.hessian_eigenvalues = eig.eigenvalues();
    p.kind = classify_eigenvalues(p.hessian_eigenvalues);
    p.value = sym.eval_unit(w);
    p.gradient_norm = chart.gradient(u).norm();

    bool duplicate = false;
    for (auto& q : out.points) {
      if (geodesic_distance(q.location, p.location) < 1e-6) {
        if (p.gradient_norm < q.gradient_norm) q = p;
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out.points.push_back(std::move(p));
  }
  out.search_failed = out.converged_starts == 0;
  return out;
}

}  // namespace umlab
