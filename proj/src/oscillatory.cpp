#include "umlab/oscillatory.hpp"

#include <cmath>
#include <limits>
#include <cstdio>
#include <numbers>

#include "umlab/errors.hpp"
#include "umlab/fit.hpp"
#include "umlab/quadrature.hpp"
#include "umlab/symbols.hpp"

namespace umlab {

bool Box::contains(const Vec& x) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (x(k) < lower(k) || x(k) > upper(k)) return false;
  return true;
}

namespace {

Vec phase_gradient(const PhaseFn& phase, const Vec& xi) {
  if (phase.gradient) return phase.gradient(xi);
  return fd_gradient(phase.value, xi);
}

Mat phase_hessian(const PhaseFn& phase, const Vec& xi) {
  if (phase.hessian) return phase.hessian(xi);
  return fd_hessian(phase.value, xi);
}

double max_gradient(const PhaseFn& phase, const Box& box) {
  const int dim = static_cast<int>(box.lower.size());
  constexpr int kPer = 9;
  int total = 1;
  for (int k = 0; k < dim; ++k) total *= kPer;
  double g = 0.0;
  Vec xi(dim);
  for (int flat = 0; flat < total; ++flat) {
    int rem = flat;
    for (int k = 0; k < dim; ++k) {
      const int i = rem % kPer;
      rem /= kPer;
      xi(k) = box.lower(k) + (box.upper(k) - box.lower(k)) * i / (kPer - 1);
    }
    g = std::max(g, phase_gradient(phase, xi).norm());
  }
  return g;
}

Complex tensor_sum(const PhaseFn& phase, const AmplitudeFn& amp, double t,
                   const std::vector<GaussRule>& rules) {
  const int dim = static_cast<int>(rules.size());
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  Vec xi(dim);
  Complex sum = 0.0;
  while (true) {
    double w = 1.0;
    for (int k = 0; k < dim; ++k) {
      const auto& r = rules[static_cast<std::size_t>(k)];
      const std::size_t i = idx[static_cast<std::size_t>(k)];
      xi(k) = r.nodes[i];
      w *= r.weights[i];
    }
    const Complex a = amp.eval(xi);
    if (a != 0.0) {
      const double ph = t * phase.value(xi);
      sum += w * a * Complex(std::cos(ph), std::sin(ph));
    }
    int k = dim - 1;
    while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == rules[static_cast<std::size_t>(k)].nodes.size())
      idx[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) break;
  }
  return sum;
}

}  // namespace

OscIntegralResult oscillatory_integral(const PhaseFn& phase, const AmplitudeFn& amp, double t,
                                       double tol, const OscOptions& opts) {
  const int dim = amp.dim;
  if (dim < 1 || dim > 3) throw InvalidArgument("oscillatory integral supports 1 <= dim <= 3");
  if (phase.dim != dim || amp.support.lower.size() != dim || amp.support.upper.size() != dim)
    throw InvalidArgument("phase, amplitude and support dimensions differ");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("t must be finite and nonnegative");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (!(amp.support.upper.array() > amp.support.lower.array()).all())
    throw InvalidArgument("support box must have positive extent");
  const int m = opts.gauss_order;

  const double g = t > 0.0 ? max_gradient(phase, amp.support) : 0.0;
  std::vector<long> panels(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    const double len = amp.support.upper(k) - amp.support.lower(k);
    const double want = std::ceil(opts.kappa * t * len * g / (2.0 * std::numbers::pi * m));
    panels[static_cast<std::size_t>(k)] = std::max<long>(opts.min_panels, static_cast<long>(want));
  }
  auto node_count = [&](int level) {
    long c = 1;
    for (long p : panels) c *= (p << level) * m;
    return c;
  };
  auto evaluate = [&](int level) {
    std::vector<GaussRule> rules;
    for (int k = 0; k < dim; ++k)
      rules.push_back(composite_gauss(amp.support.lower(k), amp.support.upper(k),
                                      static_cast<int>(panels[static_cast<std::size_t>(k)] << level), m));
    return tensor_sum(phase, amp, t, rules);
  };

  if (node_count(0) > opts.max_nodes)
    throw BudgetError("oscillatory integral: initial level exceeds the node budget", Complex{}, std::numeric_limits<double>::infinity());
  Complex prev = evaluate(0);
  double gap = std::numeric_limits<double>::infinity();
  for (int level = 1;; ++level) {
    if (node_count(level) > opts.max_nodes)
      throw BudgetError("oscillatory integral: node budget exhausted", prev, gap);
    const Complex cur = evaluate(level);
    gap = std::abs(cur - prev);
    if (gap <= tol) return {cur, gap, node_count(level), level};
    prev = cur;
  }
}

int signature(const Mat& h, double tol) {
  if (h.rows() != h.cols()) throw InvalidArgument("signature requires a square matrix");
  const double norm = h.norm();
  if ((h - h.transpose()).norm() > std::max(tol, 1e-8) * (1.0 + norm))
    throw InvalidArgument("signature requires a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Mat> eig(h, Eigen::EigenvaluesOnly);
  const double threshold = tol * (1.0 + norm);
  int s = 0;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const double ev = eig.eigenvalues()(i);
    if (std::abs(ev) < threshold) throw DegenerateError("degenerate Hessian: eigenvalue below threshold");
    s += ev > 0 ? 1 : -1;
  }
  return s;
}

Complex stationary_phase_approx(const PhaseFn& phase, const AmplitudeFn& amp, const Vec& xi_star,
                                double t) {
  const int d = amp.dim;
  if (xi_star.size() != d || phase.dim != d) throw InvalidArgument("dimension mismatch");
  if (!(t > 0.0)) throw InvalidArgument("stationary phase requires t > 0");
  if (phase_gradient(phase, xi_star).norm() > 1e-8)
    throw InvalidArgument("stationary phase requires a critical point (|grad| <= 1e-8)");
  const Mat h = phase_hessian(phase, xi_star);
  const int sgn = signature(h);
  const double det = h.determinant();
  const Complex c = amp(xi_star) * std::pow(2.0 * std::numbers::pi, 0.5 * d) *
                    std::polar(1.0, 0.25 * std::numbers::pi * sgn) / std::sqrt(std::abs(det));
  return c * std::polar(1.0, t * phase.value(xi_star)) * std::pow(t, -0.5 * d);
}

std::string DecayReport::to_csv() const {
  std::string out = "t,direct_re,direct_im,approx_re,approx_im,abs_err\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.direct.real(),
                  r.direct.imag(), r.approx.real(), r.approx.imag(), r.abs_err);
    out += buf;
  }
  return out;
}

DecayReport decay_check(const PhaseFn& phase, const AmplitudeFn& amp, const Vec& xi_star,
                        const std::vector<double>& t_list, double tol, const OscOptions& opts) {
  if (t_list.size() < 3) throw InvalidArgument("decay check needs at least 3 values of t");
  for (std::size_t i = 1; i < t_list.size(); ++i)
    if (!(t_list[i] > t_list[i - 1])) throw InvalidArgument("t values must be strictly increasing");
  DecayReport rep;
  rep.dim = amp.dim;
  rep.bound = -(0.5 * amp.dim + 1.0) + 0.3;
  std::vector<std::pair<double, double>> pairs;
  for (double t : t_list) {
    const Complex direct = oscillatory_integral(phase, amp, t, tol, opts).value;
    const Complex approx = stationary_phase_approx(phase, amp, xi_star, t);
    rep.rows.push_back({t, direct, approx, std::abs(direct - approx)});
    pairs.emplace_back(t, rep.rows.back().abs_err);
  }
  rep.slope = loglog_least_squares(pairs).slope;
  rep.pass = rep.slope <= rep.bound;
  return rep;
}

AmplitudeFn standard_bump(int dim) {
  AmplitudeFn a;
  a.dim = dim;
  a.support = {Vec::Constant(dim, -1.0), Vec::Constant(dim, 1.0)};
  a.eval = [](const Vec& xi) -> Complex {
    const double r2 = xi.squaredNorm();
    if (r2 >= 1.0) return 0.0;
    return std::numbers::e * std::exp(-1.0 / (1.0 - r2));
  };
  return a;
}

namespace {

PhaseFn quadratic_phase(const Vec& diag) {
  PhaseFn p;
  p.dim = static_cast<int>(diag.size());
  p.value = [diag](const Vec& xi) { return 0.5 * xi.dot(diag.cwiseProduct(xi)); };
  p.gradient = [diag](const Vec& xi) -> Vec { return diag.cwiseProduct(xi); };
  p.hessian = [diag](const Vec&) -> Mat { return diag.asDiagonal(); };
  return p;
}

AmplitudeFn vanishing_bump(int dim) {
  AmplitudeFn a = standard_bump(dim);
  auto base = a.eval;
  a.eval = [base](const Vec& xi) { return xi.squaredNorm() * base(xi); };
  return a;
}

}  // namespace

DecayFixtureData decay_fixture(DecayFixture kind) {
  switch (kind) {
    case DecayFixture::Quadratic1d:
      return {"quadratic1d", quadratic_phase(Vec::Ones(1)), standard_bump(1), Vec::Zero(1)};
    case DecayFixture::Quadratic2d:
      return {"quadratic2d", quadratic_phase(Vec::Ones(2)), standard_bump(2), Vec::Zero(2)};
    case DecayFixture::Saddle2d: {
      Vec diag(2);
      diag << 1.0, -1.0;
      return {"saddle2d", quadratic_phase(diag), standard_bump(2), Vec::Zero(2)};
    }
    case DecayFixture::Vanishing1d:
      return {"vanishing1d", quadratic_phase(Vec::Ones(1)), vanishing_bump(1), Vec::Zero(1)};
    case DecayFixture::Vanishing2d:
      return {"vanishing2d", quadratic_phase(Vec::Ones(2)), vanishing_bump(2), Vec::Zero(2)};
  }
  throw InvalidArgument("unknown decay fixture");
}

DecayFixture decay_fixture_from_name(const std::string& name) {
  for (auto k : {DecayFixture::Quadratic1d, DecayFixture::Quadratic2d, DecayFixture::Saddle2d,
                 DecayFixture::Vanishing1d, DecayFixture::Vanishing2d})
    if (decay_fixture(k).name == name) return k;
  throw InvalidArgument("unknown decay fixture: " + name);
}

}  // namespace umlab
