#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "umlab/errors.hpp"
#include "umlab/oscillatory.hpp"
#include "umlab/quadrature.hpp"

using namespace umlab;

namespace {

constexpr double kPi = std::numbers::pi;

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

double bump1(double x) { return std::abs(x) < 1 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0; }

// Dense trapezoid of exp(i t xi^2/2) bump(xi) on [-1, 1]; the integrand and
// all its derivatives vanish at the ends, so the rule converges spectrally.
Complex trapezoid_oracle(double t, int n = 1000000) {
  const double h = 2.0 / n;
  Complex s{};
  for (int j = 1; j < n; ++j) {
    const double x = -1.0 + j * h;
    s += std::exp(Complex(0.0, 0.5 * t * x * x)) * bump1(x);
  }
  return s * h;
}

PhaseFn quadratic_phase(int d, std::vector<double> signs) {
  PhaseFn p;
  p.dim = d;
  p.value = [signs](const Vec& x) {
    double s = 0;
    for (Eigen::Index k = 0; k < x.size(); ++k) s += 0.5 * signs[static_cast<std::size_t>(k)] * x(k) * x(k);
    return s;
  };
  p.gradient = [signs](const Vec& x) {
    Vec g(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) g(k) = signs[static_cast<std::size_t>(k)] * x(k);
    return g;
  };
  p.hessian = [signs, d](const Vec&) {
    Mat h = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k) h(k, k) = signs[static_cast<std::size_t>(k)];
    return h;
  };
  return p;
}

AmplitudeFn product_bump(int d) {
  AmplitudeFn a;
  a.dim = d;
  a.support = {Vec::Constant(d, -1.0), Vec::Constant(d, 1.0)};
  a.eval = [](const Vec& x) {
    double v = 1;
    for (Eigen::Index k = 0; k < x.size(); ++k) v *= bump1(x(k));
    return Complex(v, 0.0);
  };
  return a;
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 2, 5, 8, 16}) {
    const auto r = gauss_legendre(n);
    for (int deg = 0; deg < 2 * n; ++deg) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += r->weights[static_cast<std::size_t>(i)] * std::pow(r->nodes[static_cast<std::size_t>(i)], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
  const auto c = composite_gauss(0.0, 3.0, 4, 5);
  double s = 0;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) s += c.weights[i] * std::exp(c.nodes[i]);
  CHECK(s == doctest::Approx(std::exp(3.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("1-d quadratic phase at t = 100 against the dense trapezoid") {
  const auto fx = decay_fixture(DecayFixture::Quadratic1d);
  const auto r = oscillatory_integral(fx.phase, fx.amp, 100.0, 1e-11);
  const Complex oracle = trapezoid_oracle(100.0);
  CHECK(std::abs(r.value - oracle) < 1e-9);
  CHECK(std::abs(r.value) == doctest::Approx(0.25066).epsilon(1e-2));
  CHECK(r.error <= 1e-11);
  CHECK(r.nodes > 0);
}

TEST_CASE("t = 0 gives the plain integral of the standard bump") {
  const auto fx = decay_fixture(DecayFixture::Quadratic1d);
  const auto r = oscillatory_integral(fx.phase, fx.amp, 0.0, 1e-12);
  CHECK(std::abs(r.value - trapezoid_oracle(0.0)) < 1e-10);
  CHECK(r.value.real() == doctest::Approx(1.2069003224378787).epsilon(1e-12));
  CHECK(r.value.imag() == 0.0);
}

TEST_CASE("zero amplitude integrates to zero exactly") {
  AmplitudeFn zero = product_bump(2);
  zero.eval = [](const Vec&) { return Complex{}; };
  const auto r = oscillatory_integral(quadratic_phase(2, {1, 1}), zero, 37.0, 1e-8);
  CHECK(r.value == Complex{});
}

TEST_CASE("separable 2-d and 3-d integrals factor into 1-d ones") {
  const double t = 20.0;
  const Complex one = trapezoid_oracle(t, 200000);
  const auto r2 = oscillatory_integral(quadratic_phase(2, {1, 1}), product_bump(2), t, 1e-10);
  CHECK(std::abs(r2.value - one * one) < 1e-8);
  const auto r3 = oscillatory_integral(quadratic_phase(3, {1, -1, 1}), product_bump(3), t, 1e-7);
  CHECK(std::abs(r3.value - one * std::conj(one) * one) < 1e-6);
}

TEST_CASE("budget exhaustion carries the best estimate") {
  const auto fx = decay_fixture(DecayFixture::Quadratic2d);
  OscOptions o;
  o.max_nodes = 5000;
  try {
    oscillatory_integral(fx.phase, fx.amp, 400.0, 1e-14, o);
    FAIL("expected BudgetError");
  } catch (const BudgetError& e) {
    CHECK(e.gap > 0.0);
    CHECK(std::isfinite(std::abs(e.estimate)));
  }
  CHECK_THROWS_AS(oscillatory_integral(fx.phase, fx.amp, -1.0, 1e-8), InvalidArgument);
}

TEST_CASE("signature") {
  CHECK(signature(Mat(vec({1, 1}).asDiagonal())) == 2);
  CHECK(signature(Mat(vec({1, -1}).asDiagonal())) == 0);
  CHECK(signature(Mat(vec({-3, -5, -1}).asDiagonal())) == -3);
  CHECK_THROWS_AS(signature(Mat(vec({1, 0}).asDiagonal())), DegenerateError);
}

TEST_CASE("stationary-phase leading term") {
  const auto q1 = decay_fixture(DecayFixture::Quadratic1d);
  const Complex a1 = stationary_phase_approx(q1.phase, q1.amp, q1.xi_star, 100.0);
  CHECK(std::abs(a1 - std::sqrt(2 * kPi / 100.0) * std::exp(Complex(0, kPi / 4))) < 1e-15);
  CHECK(std::abs(a1) == doctest::Approx(0.25066).epsilon(1e-4));

  const auto q2 = decay_fixture(DecayFixture::Quadratic2d);
  const Complex a2 = stationary_phase_approx(q2.phase, q2.amp, q2.xi_star, 50.0);
  CHECK(std::abs(a2 - Complex(0, 2 * kPi / 50.0)) < 1e-15);
  CHECK(a2.imag() == doctest::Approx(0.12566).epsilon(1e-4));

  const auto s = decay_fixture(DecayFixture::Saddle2d);
  const Complex as = stationary_phase_approx(s.phase, s.amp, s.xi_star, 1.0);
  CHECK(std::abs(as - Complex(2 * kPi, 0)) < 1e-14);

  const auto v = decay_fixture(DecayFixture::Vanishing2d);
  CHECK(stationary_phase_approx(v.phase, v.amp, v.xi_star, 10.0) == Complex{});

  CHECK_THROWS_AS(stationary_phase_approx(q1.phase, q1.amp, vec({0.1}), 10.0), InvalidArgument);
  PhaseFn flat = quadratic_phase(2, {1, 0});
  CHECK_THROWS_AS(stationary_phase_approx(flat, product_bump(2), vec({0, 0}), 10.0), DegenerateError);
}

TEST_CASE("stationary-phase magnitude formula") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(1.0, 500.0);
  const auto q = decay_fixture(DecayFixture::Saddle2d);
  for (int i = 0; i < 20; ++i) {
    const double t = u(rng);
    CHECK(std::abs(stationary_phase_approx(q.phase, q.amp, q.xi_star, t)) ==
          doctest::Approx(2 * kPi / t).epsilon(1e-14));
  }
}

TEST_CASE("decay checks on the fixtures") {
  const std::vector<double> ts{50, 100, 200, 400};
  for (auto kind : {DecayFixture::Quadratic1d, DecayFixture::Quadratic2d}) {
    const auto fx = decay_fixture(kind);
    const auto rep = decay_check(fx.phase, fx.amp, fx.xi_star, ts);
    CHECK(rep.pass);
    CHECK(rep.slope <= rep.bound);
    CHECK(rep.slope == doctest::Approx(-(fx.phase.dim / 2.0 + 1.0)).epsilon(0.1));
    CHECK(rep.rows.size() == 4);
  }
  const auto q1 = decay_fixture(DecayFixture::Quadratic1d);
  const auto rep = decay_check(q1.phase, q1.amp, q1.xi_star, ts);
  CHECK(rep.rows[1].abs_err / rep.rows[0].abs_err == doctest::Approx(std::pow(2.0, -1.5)).epsilon(0.05));

  const auto v = decay_fixture(DecayFixture::Vanishing1d);
  const auto rv = decay_check(v.phase, v.amp, v.xi_star, ts);
  for (const auto& r : rv.rows) CHECK(r.approx == Complex{});
  CHECK(rv.slope <= -1.5 + 0.3);

  CHECK_THROWS_AS(decay_check(q1.phase, q1.amp, q1.xi_star, {50, 100}), InvalidArgument);
  CHECK_THROWS_AS(decay_check(q1.phase, q1.amp, q1.xi_star, {50, 40, 100}), InvalidArgument);
  CHECK(rep.to_csv().rfind("t,direct_re,direct_im,approx_re,approx_im,abs_err\n", 0) == 0);
}

TEST_CASE("fixture names") {
  CHECK(decay_fixture_from_name("saddle2d") == DecayFixture::Saddle2d);
  CHECK(decay_fixture(DecayFixture::Vanishing2d).name == "vanishing2d");
  CHECK_THROWS_AS(decay_fixture_from_name("cubic"), InvalidArgument);
}
