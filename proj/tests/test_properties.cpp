// Randomized property checks across modules. Every generator is seeded, so
// failures reproduce.
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "umlab/growth.hpp"
#include "umlab/multiplier.hpp"
#include "umlab/oscillatory.hpp"
#include "umlab/symbols.hpp"

using namespace umlab;

namespace {

Symbol random_polynomial_symbol(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> deg(0, 3);
  std::vector<MonomialTerm> terms;
  for (int i = 0; i < 5; ++i) {
    MonomialTerm m;
    m.coefficient = g(rng);
    m.powers.assign(static_cast<std::size_t>(d), 0);
    int left = deg(rng);
    std::uniform_int_distribution<int> axis(0, d - 1);
    while (left-- > 0) ++m.powers[static_cast<std::size_t>(axis(rng))];
    terms.push_back(m);
  }
  return spherical_polynomial(d, terms, "random");
}

Vec random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  Vec v(d);
  for (int k = 0; k < d; ++k) v(k) = g(rng);
  return v / v.norm();
}

AmplitudeFn scaled(const AmplitudeFn& a, Complex c) {
  AmplitudeFn out = a;
  out.eval = [a, c](const Vec& x) { return c * a.eval(x); };
  return out;
}

AmplitudeFn shifted_bump(int d, double shift) {
  AmplitudeFn a = standard_bump(d);
  AmplitudeFn out = a;
  out.eval = [a, shift](const Vec& x) {
    Vec y = x;
    y(0) -= shift;
    return a(y) * (1.0 + 0.5 * x(0));
  };
  return out;
}

}  // namespace

TEST_CASE("spherical means are bounded by one") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ut(0.0, 100.0);
  for (int i = 0; i < 20; ++i) {
    const int d = 2 + i % 2;
    const Symbol s = random_polynomial_symbol(rng, d);
    const double tol = 1e-8;
    const auto m = spherical_mean(s, ut(rng), tol);
    CHECK(std::abs(m.value) <= 1.0 + tol);
  }
}

TEST_CASE("sphere critical points are equivariant under rotation to a pole") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 4; ++i) {
    const Symbol s = quadratic_symbol({1.0, 2.2, 3.7});
    const Vec p = random_unit(rng, 3);
    const Mat r = pole_rotation(p);
    const auto base = sphere_critical_points(s, 48);
    const auto rot = sphere_critical_points(rotate_to_pole(s, p), 48);
    REQUIRE(base.points.size() == rot.points.size());
    for (const auto& q : rot.points) {
      const Vec back = r * q.location;
      double best = 1e9;
      for (const auto& b : base.points) best = std::min(best, (b.location - back).norm());
      CHECK(best <= 1e-6);
    }
  }
}

TEST_CASE("generic quadratic symbols are Morse with the expected count") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  for (int i = 0; i < 6; ++i) {
    const int d = 2 + i % 2;
    std::vector<double> a;
    for (int k = 0; k < d; ++k) a.push_back(w(rng) + 3.0 * k);
    const auto s = sphere_critical_points(quadratic_symbol(a), 24 * d);
    CHECK(s.morse());
    CHECK(s.points.size() == static_cast<std::size_t>(2 * d));
  }
}

TEST_CASE("oscillatory integrals are linear, contractive and conjugation symmetric") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ut(1.0, 80.0), uc(-2.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    const int d = 1 + i % 2;
    const auto fx = decay_fixture(d == 1 ? DecayFixture::Quadratic1d : DecayFixture::Saddle2d);
    const double t = ut(rng);
    const double tol = 1e-9;
    const AmplitudeFn a1 = fx.amp;
    const AmplitudeFn a2 = shifted_bump(d, 0.0);
    const Complex c(uc(rng), uc(rng));
    AmplitudeFn sum = a1;
    sum.eval = [a1, a2, c](const Vec& x) { return c * a1(x) + a2(x); };
    const Complex i1 = oscillatory_integral(fx.phase, a1, t, tol).value;
    const Complex i2 = oscillatory_integral(fx.phase, a2, t, tol).value;
    const Complex is = oscillatory_integral(fx.phase, sum, t, tol).value;
    CHECK(std::abs(is - (c * i1 + i2)) <= 4 * tol * (1 + std::abs(c)));

    const double mass = oscillatory_integral(fx.phase, a2, 0.0, tol).value.real();
    CHECK(std::abs(i2) <= mass + tol);

    PhaseFn neg = fx.phase;
    neg.value = [p = fx.phase](const Vec& x) { return -p.value(x); };
    neg.gradient = [p = fx.phase](const Vec& x) { return Vec(-p.gradient(x)); };
    neg.hessian = [p = fx.phase](const Vec& x) { return Mat(-p.hessian(x)); };
    const Complex in = oscillatory_integral(neg, a2, t, tol).value;
    CHECK(std::abs(in - std::conj(i2)) <= 2 * tol);

    const Complex ic = oscillatory_integral(fx.phase, scaled(a1, c), t, tol).value;
    CHECK(std::abs(ic - c * i1) <= 2 * tol * (1 + std::abs(c)));
  }
}

TEST_CASE("apply_grid preserves the discrete L2 norm") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> ut(0.0, 100.0);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    const int d = 2 + i % 2;
    const int n = d == 2 ? 128 : 32;
    GridField f(std::vector<double>(static_cast<std::size_t>(d), 12.0), std::vector<int>(static_cast<std::size_t>(d), n));
    for (auto& v : f.samples) v = Complex(g(rng), g(rng));
    const Symbol s = random_polynomial_symbol(rng, d);
    const double l0 = discrete_l2(apply_grid(s, f, 0.0));
    const double lt = discrete_l2(apply_grid(s, f, ut(rng)));
    CHECK(std::abs(lt - l0) <= 1e-8 * l0);
  }
}

TEST_CASE("stationary-phase deviation shrinks along t on U1 probes") {
  const GrowthSetup s = prepare_growth(riesz(2, 1));
  const auto sample = sample_u1(s.chart, s.domains, 32, 0, 1);
  REQUIRE(sample.hits.size() >= 4);
  const TransformedAmplitude f(s.bump);
  double dev_first = 0, dev_last = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec& x = sample.hits[i];
    const auto g = solve_in_domain(s.chart, s.domains, x);
    REQUIRE(g);
    const double lead = 2 * std::numbers::pi * f(g->xi) / std::sqrt(std::abs(g->det));
    std::vector<double> dev;
    for (double t : {100.0, 200.0, 400.0}) {
      const double got = std::abs(apply_pointwise(s.working, s.bump, t, x, 1e-9).value) * t;
      dev.push_back(std::abs(got - lead) / lead);
      CHECK(dev.back() <= 0.10);
    }
    dev_first += dev.front();
    dev_last += dev.back();
  }
  CHECK(dev_last < dev_first);
}

TEST_CASE("more samples never lower the U1 integral beyond the error bar") {
  const GrowthSetup s = prepare_growth(riesz(2, 1));
  LowerBoundOptions o;
  o.threads = 1;
  o.n_samples = 32;
  const auto a = lower_bound_norm(s.working, s.domains, s.bump, 32.0, 1.5, o);
  o.n_samples = 64;
  const auto b = lower_bound_norm(s.working, s.domains, s.bump, 32.0, 1.5, o);
  CHECK(b.integral >= a.integral - (a.std_error + b.std_error));
  CHECK(b.hits >= a.hits);
}
