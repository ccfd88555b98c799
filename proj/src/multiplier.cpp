#include "umlab/multiplier.hpp"

#include <array>
#include <cmath>
#include <random>

#include "parallel.hpp"
#include "random.hpp"
#include "umlab/errors.hpp"

namespace umlab {

namespace {

double smooth_step(double r) { return r > 0.0 ? std::exp(-1.0 / r) : 0.0; }

}  // namespace

double bump_profile(double r) {
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  const double a = smooth_step(2.0 - 2.0 * r);
  const double b = smooth_step(2.0 * r - 1.0);
  return a / (a + b);
}

BumpAmplitude::BumpAmplitude(Vec center, double eps) : center_(std::move(center)), eps_(eps) {
  if (!(eps_ > 0.0) || !std::isfinite(eps_)) throw InvalidArgument("bump radius must be positive");
  if (center_.size() < 1 || center_.size() > kMaxDim) throw InvalidArgument("bump dimension out of range");
}

double BumpAmplitude::operator()(const Vec& xi) const { return bump_profile((xi - center_).norm() / eps_); }

Box BumpAmplitude::support_box() const {
  return {(center_.array() - eps_).matrix(), (center_.array() + eps_).matrix()};
}

AmplitudeFn BumpAmplitude::as_amplitude() const {
  AmplitudeFn a;
  a.dim = dimension();
  a.support = support_box();
  a.eval = [b = *this](const Vec& xi) -> Complex { return b(xi); };
  return a;
}

TransformedAmplitude::TransformedAmplitude(BumpAmplitude bump) : bump_(std::move(bump)) {
  const int n = bump_.dimension() - 1;
  if (n < 1) throw InvalidArgument("transformed amplitude needs d >= 2");
  const double lo = bump_.center()(n) - bump_.eps();
  const double hi = bump_.center()(n) + bump_.eps();
  if (!(lo >= 0.25 && hi <= 4.0))
    throw InvalidArgument("bump outer ball must lie in Lambda(R^{d-1} x (1/4, 4))");
}

double TransformedAmplitude::operator()(const Vec& xi) const {
  const Eigen::Index n = xi.size() - 1;
  if (!(xi(n) > 0.0)) return 0.0;
  const double f = bump_(lambda_map(xi));
  return f == 0.0 ? 0.0 : f * std::pow(xi(n), static_cast<double>(n));
}

Box TransformedAmplitude::support_box() const {
  const Vec& c = bump_.center();
  const double e = bump_.eps();
  const Eigen::Index n = c.size() - 1;
  const double lo_d = c(n) - e, hi_d = c(n) + e;
  Box box{Vec(n + 1), Vec(n + 1)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::array<double, 4> q{(c(k) - e) / lo_d, (c(k) - e) / hi_d, (c(k) + e) / lo_d,
                                  (c(k) + e) / hi_d};
    box.lower(k) = *std::min_element(q.begin(), q.end());
    box.upper(k) = *std::max_element(q.begin(), q.end());
  }
  box.lower(n) = lo_d;
  box.upper(n) = hi_d;
  return box;
}

AmplitudeFn TransformedAmplitude::as_amplitude() const {
  AmplitudeFn a;
  a.dim = bump_.dimension();
  a.support = support_box();
  a.eval = [f = *this](const Vec& xi) -> Complex { return f(xi); };
  return a;
}

PhaseFn modified_phase_fn(const ChartPhase& phi, const Vec& x) {
  const ModifiedPhase m(phi, x);
  PhaseFn p;
  p.dim = m.dimension();
  p.value = [m](const Vec& xi) { return m.value(xi); };
  p.gradient = [m](const Vec& xi) { return m.gradient(xi); };
  p.hessian = [m](const Vec& xi) { return m.hessian(xi); };
  return p;
}

OscIntegralResult apply_pointwise(const Symbol& sym, const BumpAmplitude& bump, double t,
                                  const Vec& x, double tol, const OscOptions& opts) {
  const int d = sym.dimension();
  if (bump.dimension() != d || x.size() != d) throw InvalidArgument("dimension mismatch");
  if (!(t >= 0.0)) throw InvalidArgument("t must be nonnegative");
  const TransformedAmplitude amp(bump);
  return oscillatory_integral(modified_phase_fn(chart_phase(sym), x), amp.as_amplitude(), t, tol, opts);
}

std::vector<Vec> halton_points(int dim, int n, std::uint64_t seed) {
  static constexpr std::array<int, kMaxDim> kPrimes{2, 3, 5, 7, 11, 13, 17, 19};
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("Halton dimension out of range");
  if (n < 0) throw InvalidArgument("negative sample count");
  Vec shift = Vec::Zero(dim);
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    for (int k = 0; k < dim; ++k) shift(k) = detail::unit_uniform(rng);
  }
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    Vec v(dim);
    for (int k = 0; k < dim; ++k) {
      const int b = kPrimes[static_cast<std::size_t>(k)];
      double f = 1.0, r = 0.0;
      for (int m = i; m > 0; m /= b) {
        f /= b;
        r += f * (m % b);
      }
      r += shift(k);
      v(k) = r - std::floor(r);
    }
    pts.push_back(v);
  }
  return pts;
}

U1Sample sample_u1(const ChartPhase& phi, const WitnessDomains& domains, int n_samples,
                   std::uint64_t seed, int threads) {
  const int d = domains.dimension();
  const auto unit = halton_points(d, n_samples, seed);
  std::vector<Vec> xs;
  xs.reserve(unit.size());
  for (const Vec& u : unit)
    xs.push_back(domains.u_lower + (domains.u_upper - domains.u_lower).cwiseProduct(u));
  std::vector<char> inside(xs.size(), 0);
  detail::parallel_for(xs.size(), threads, [&](std::size_t i) { inside[i] = in_u1(phi, domains, xs[i]); });
  U1Sample s;
  s.n_samples = n_samples;
  s.box_volume = domains.box_volume();
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (inside[i]) s.hits.push_back(xs[i]);
  return s;
}

LowerBoundEstimate lower_bound_norm(const Symbol& sym, const WitnessDomains& domains,
                                    const BumpAmplitude& bump, double t, double p,
                                    const LowerBoundOptions& opts) {
  if (opts.n_samples < 32) throw InvalidArgument("lower bound needs at least 32 samples");
  const auto sample = sample_u1(chart_phase(sym), domains, opts.n_samples, opts.seed, opts.threads);
  return lower_bound_norm(sym, sample, bump, t, p, opts);
}

LowerBoundEstimate lower_bound_norm(const Symbol& sym, const U1Sample& sample,
                                    const BumpAmplitude& bump, double t, double p,
                                    const LowerBoundOptions& opts) {
  if (!(p > 1.0 && p <= 2.0)) throw InvalidArgument("lower bound requires p in (1, 2]");
  if (!(t > 0.0)) throw InvalidArgument("lower bound requires t > 0");
  if (sample.n_samples < 32) throw InvalidArgument("lower bound needs at least 32 samples");
  if (sample.hits.empty()) throw DomainError("no sample of U fell in U1");

  const std::size_t h = sample.hits.size();
  std::vector<double> values(h, 0.0);
  std::vector<char> failed(h, 0);
  detail::parallel_for(h, opts.threads, [&](std::size_t i) {
    Complex v;
    try {
      v = apply_pointwise(sym, bump, t, sample.hits[i], opts.quad_tol, opts.osc).value;
    } catch (const BudgetError& e) {
      v = e.estimate;
      failed[i] = 1;
    }
    values[i] = std::pow(std::abs(v), p);
  });
  int failures = 0;
  for (char f : failed) failures += f;
  if (failures * 10 > static_cast<int>(h))
    throw BudgetError("quadrature budget exhausted at more than 10% of the U1 samples", Complex{},
                      static_cast<double>(failures));

  const double n = sample.n_samples;
  double s1 = 0.0, s2 = 0.0;
  for (double v : values) {
    s1 += v;
    s2 += v * v;
  }
  const double mean = s1 / n;
  const double var = std::max(0.0, (s2 / n - mean * mean) * n / (n - 1.0));

  LowerBoundEstimate est;
  est.t = t;
  est.p = p;
  est.n_samples = sample.n_samples;
  est.hits = static_cast<int>(h);
  est.quad_failures = failures;
  est.integral = sample.box_volume * mean;
  est.std_error = sample.box_volume * std::sqrt(var / n);
  est.surrogate = std::pow(t, bump.dimension() / p) * std::pow(est.integral, 1.0 / p);
  return est;
}

}  // namespace umlab
