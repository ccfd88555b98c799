#include "umlab/phase_geometry.hpp"

#include <cmath>

#include "umlab/errors.hpp"
#include "umlab/oscillatory.hpp"

namespace umlab {

namespace {

constexpr double kBandLo = 0.25;
constexpr double kBandHi = 4.0;

void check_sizes(const ChartPhase& phi, const Vec& xi, const Vec& x) {
  const Eigen::Index d = phi.dimension() + 1;
  if (xi.size() != d || x.size() != d) throw InvalidArgument("dimension mismatch between chart, xi and x");
}

}  // namespace

ModifiedPhase::ModifiedPhase(ChartPhase phi, Vec x) : phi_(std::move(phi)), x_(std::move(x)) {
  if (x_.size() != phi_.dimension() + 1) throw InvalidArgument("x must have dimension d");
}

double ModifiedPhase::value(const Vec& xi) const {
  const Eigen::Index n = xi.size() - 1;
  return phi_.value(xi.head(n)) + xi(n) * (xi.head(n).dot(x_.head(n)) + x_(n));
}

Vec ModifiedPhase::gradient(const Vec& xi) const { return grad_F(phi_, xi, x_); }

Mat ModifiedPhase::hessian(const Vec& xi) const { return jacobian_F(phi_, xi, x_); }

Vec grad_F(const ChartPhase& phi, const Vec& xi, const Vec& x) {
  check_sizes(phi, xi, x);
  const Eigen::Index n = xi.size() - 1;
  Vec f(n + 1);
  f.head(n) = phi.gradient(xi.head(n)) + xi(n) * x.head(n);
  f(n) = xi.head(n).dot(x.head(n)) + x(n);
  return f;
}

Mat jacobian_F(const ChartPhase& phi, const Vec& xi, const Vec& x) {
  check_sizes(phi, xi, x);
  const Eigen::Index n = xi.size() - 1;
  Mat j = Mat::Zero(n + 1, n + 1);
  j.topLeftCorner(n, n) = phi.hessian(xi.head(n));
  j.topRightCorner(n, 1) = x.head(n);
  j.bottomLeftCorner(1, n) = x.head(n).transpose();
  return j;
}

double schur_det(const Mat& h_phi, const Vec& x_minus) {
  if (h_phi.rows() != h_phi.cols() || h_phi.rows() != x_minus.size())
    throw InvalidArgument("schur_det: size mismatch");
  Eigen::PartialPivLU<Mat> lu(h_phi);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-12)) throw DegenerateError("schur_det: Hessian numerically singular");
  return -x_minus.dot(lu.solve(x_minus)) * lu.determinant();
}

CriticalPointResult solve_critical(const ChartPhase& phi, const Vec& x, const Vec& xi_init,
                                   double tol, int max_iter) {
  check_sizes(phi, xi_init, x);
  if (!(tol > 0.0) || max_iter < 1) throw InvalidArgument("solve_critical: bad tolerance or iteration limit");
  const Eigen::Index n = x.size() - 1;
  if (x.head(n).norm() == 0.0) throw DomainError("solve_critical: x_- = 0 is excluded");

  Vec xi = xi_init;
  Vec f = grad_F(phi, xi, x);
  double r = f.norm();
  double damping = 1.0;
  int it = 0;
  for (; r > tol; ++it) {
    if (it >= max_iter) throw NonConvergenceError("solve_critical: iteration limit reached", xi, r);
    const Mat j = jacobian_F(phi, xi, x);
    Eigen::FullPivLU<Mat> lu(j);
    Vec step;
    if (lu.isInvertible()) {
      step = -lu.solve(f);
    } else {
      step = -j.completeOrthogonalDecomposition().solve(f);
      damping *= 0.5;
    }
    while (true) {
      if (damping < 1e-12) throw NonConvergenceError("solve_critical: damping underflow", xi, r);
      const Vec trial = xi + damping * step;
      const Vec ft = grad_F(phi, trial, x);
      const double rt = ft.norm();
      if (std::isfinite(rt) && rt < r) {
        xi = trial;
        f = ft;
        r = rt;
        damping = std::min(1.0, 2.0 * damping);
        break;
      }
      damping *= 0.5;
    }
  }

  CriticalPointResult out;
  out.xi = xi;
  out.hessian = jacobian_F(phi, xi, x);
  if (n >= 2) {
    try {
      out.det = schur_det(out.hessian.topLeftCorner(n, n), x.head(n));
    } catch (const DegenerateError&) {
      out.det = out.hessian.determinant();
    }
  } else {
    out.det = out.hessian.determinant();
  }
  out.signature = signature(out.hessian);
  out.iterations = it;
  out.residual = r;
  out.in_band = xi(n) > kBandLo && xi(n) < kBandHi;
  return out;
}

Vec critical_closed_form_2d(const ChartPhase& phi, const Vec& x) {
  if (phi.dimension() != 1 || x.size() != 2) throw InvalidArgument("closed form requires d = 2");
  if (x(0) == 0.0) throw DomainError("closed form requires x1 != 0");
  const double u = -x(1) / x(0);
  Vec uu(1);
  uu(0) = u;
  Vec g(2);
  g(0) = u;
  g(1) = -phi.gradient(uu)(0) / x(0);
  return g;
}

Vec inverse_critical_map(const ChartPhase& phi, const Vec& xi) {
  const Eigen::Index n = xi.size() - 1;
  if (n != phi.dimension()) throw InvalidArgument("dimension mismatch");
  if (xi(n) == 0.0) throw DomainError("inverse critical map requires xi_d != 0");
  Vec x(n + 1);
  x.head(n) = -phi.gradient(xi.head(n)) / xi(n);
  x(n) = -xi.head(n).dot(x.head(n));
  return x;
}

Mat critical_map_jacobian(const ChartPhase& phi, const Vec& xi, const Vec& x) {
  const Eigen::Index n = xi.size() - 1;
  const Mat j = jacobian_F(phi, xi, x);
  Mat b = Mat::Zero(n + 1, n + 1);
  b.topLeftCorner(n, n) = xi(n) * Mat::Identity(n, n);
  b.bottomLeftCorner(1, n) = xi.head(n).transpose();
  b(n, n) = 1.0;
  Eigen::FullPivLU<Mat> lu(j);
  if (!lu.isInvertible()) throw DegenerateError("critical map Jacobian: singular grad_xi F");
  return -lu.solve(b);
}

Vec lambda_map(const Vec& xi) {
  const Eigen::Index n = xi.size() - 1;
  if (!(xi(n) > 0.0)) throw DomainError("Lambda requires a positive last coordinate");
  Vec eta(n + 1);
  eta.head(n) = xi(n) * xi.head(n);
  eta(n) = xi(n);
  return eta;
}

Vec lambda_inv(const Vec& eta) {
  const Eigen::Index n = eta.size() - 1;
  if (!(eta(n) > 0.0)) throw DomainError("Lambda^{-1} requires a positive last coordinate");
  Vec xi(n + 1);
  xi.head(n) = eta.head(n) / eta(n);
  xi(n) = eta(n);
  return xi;
}

const char* to_string(WitnessBranch b) {
  return b == WitnessBranch::NonzeroSlope2d ? "nonzero-slope-2d" : "definite-hessian";
}

double slope_band_halfwidth(const ChartPhase& phi, double cap) {
  if (phi.dimension() != 1) throw InvalidArgument("slope band requires d = 2");
  auto deriv = [&](double u) {
    Vec v(1);
    v(0) = u;
    return phi.gradient(v)(0);
  };
  const double c = deriv(0.0);
  if (c == 0.0) throw DegenerateError("slope band requires phi'(0) != 0");
  auto ok = [&](double u) {
    const double q = deriv(u) / c;
    return q > 0.5 && q < 2.0;
  };
  constexpr int kSteps = 2000;
  const double h = cap / kSteps;
  double delta = cap;
  for (int side : {+1, -1}) {
    for (int k = 1; k <= kSteps; ++k) {
      const double u = side * k * h;
      if (ok(u)) continue;
      double lo = (k - 1) * h, hi = k * h;
      for (int b = 0; b < 60; ++b) {
        const double mid = 0.5 * (lo + hi);
        (ok(side * mid) ? lo : hi) = mid;
      }
      delta = std::min(delta, lo);
      break;
    }
  }
  return delta;
}

Witness witness_point(const ChartPhase& phi) {
  Vec seed = Vec::Zero(phi.dimension());
  seed(0) = 0.1;
  return witness_point(phi, seed);
}

Witness witness_point(const ChartPhase& phi, const Vec& seed_offset) {
  const int n = phi.dimension();
  if (seed_offset.size() != n) throw InvalidArgument("seed offset must have dimension d-1");
  const Vec zero = Vec::Zero(n);

  if (n == 1) {
    const double c = phi.gradient(zero)(0);
    if (std::abs(c) > 1e-8) {
      Witness w;
      w.branch = WitnessBranch::NonzeroSlope2d;
      w.slope = c;
      w.delta = slope_band_halfwidth(phi);
      w.xi0 = Vec::Zero(2);
      w.xi0(1) = 1.0;
      w.x0 = Vec::Zero(2);
      w.x0(0) = -c;
      return w;
    }
  }

  Eigen::SelfAdjointEigenSolver<Mat> eig(phi.hessian(zero), Eigen::EigenvaluesOnly);
  const Vec ev = eig.eigenvalues();
  if (!(ev.minCoeff() > kDegeneracyThreshold * (1.0 + ev.cwiseAbs().maxCoeff())))
    throw HypothesisError(
        "witness requires a positive definite chart Hessian at the pole (or d = 2 with phi'(0) != 0)");
  if (seed_offset.norm() == 0.0) throw InvalidArgument("seed offset must be nonzero");

  std::vector<Vec> seeds;
  for (double scale : {1.0, 2.0, 0.5, 4.0, 0.25}) {
    seeds.push_back(scale * seed_offset);
    seeds.push_back(-scale * seed_offset);
    for (int k = 0; k < n; ++k) {
      Vec s = Vec::Zero(n);
      s(k) = scale * seed_offset.norm();
      seeds.push_back(s);
    }
  }
  for (const Vec& s : seeds) {
    const Vec grad = phi.gradient(s);
    if (!(grad.norm() > 1e-10)) continue;
    Witness w;
    w.branch = WitnessBranch::DefiniteHessian;
    w.xi0 = append(s, 1.0);
    w.x0 = append(-grad, s.dot(grad));
    if (grad_F(phi, w.xi0, w.x0).norm() > 1e-12 * (1.0 + w.x0.norm())) continue;
    return w;
  }
  throw DegenerateError("witness: chart gradient vanishes at every seed (symbol too flat near the pole)");
}

}  // namespace umlab
