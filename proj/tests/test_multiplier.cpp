#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "umlab/errors.hpp"
#include "umlab/fit.hpp"
#include "umlab/growth.hpp"
#include "umlab/multiplier.hpp"

using namespace umlab;

namespace {

constexpr double kPi = std::numbers::pi;

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// int_0^1 chi(r)^q r^{d-1} dr by a dense midpoint rule.
double radial_moment(int d, int q, int n = 200000) {
  double s = 0;
  for (int j = 0; j < n; ++j) {
    const double r = (j + 0.5) / n;
    s += std::pow(bump_profile(r), q) * std::pow(r, d - 1);
  }
  return s / n;
}

double sphere_area(int d) { return d == 2 ? 2 * kPi : 4 * kPi; }

// Direct sum f(x_j) = sum_k exp(i xi_k . x_j) f_hat(xi_k) dxi^d on a centered grid.
std::vector<Complex> naive_inverse(const GridField& g) {
  const int n0 = g.counts[0], n1 = g.counts[1];
  const double h0 = g.spacing(0), h1 = g.spacing(1);
  const double y0 = 2 * kPi / g.extents[0], y1 = 2 * kPi / g.extents[1];
  std::vector<Complex> out(g.size());
  for (int a = 0; a < n0; ++a)
    for (int b = 0; b < n1; ++b) {
      const double x0 = (a - n0 / 2) * y0, x1 = (b - n1 / 2) * y1;
      Complex s{};
      for (int k = 0; k < n0; ++k)
        for (int l = 0; l < n1; ++l)
          s += std::exp(Complex(0, (k - n0 / 2) * h0 * x0 + (l - n1 / 2) * h1 * x1)) *
               g.samples[static_cast<std::size_t>(k * n1 + l)];
      out[static_cast<std::size_t>(a * n1 + b)] = s * g.cell_volume();
    }
  return out;
}

GridField random_grid(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  GridField f({10.0, 10.0}, {n, n});
  for (auto& v : f.samples) v = Complex(g(rng), g(rng));
  return f;
}

const GrowthSetup& riesz_setup() {
  static const GrowthSetup s = prepare_growth(riesz(2, 1));
  return s;
}

}  // namespace

TEST_CASE("bump profile") {
  CHECK(bump_profile(0.0) == 1.0);
  CHECK(bump_profile(0.5) == 1.0);
  CHECK(bump_profile(0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(bump_profile(1.0) == 0.0);
  CHECK(bump_profile(3.0) == 0.0);
  double prev = 1.0;
  for (int j = 0; j <= 1000; ++j) {
    const double v = bump_profile(0.5 + 0.5 * j / 1000.0);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("bump amplitude invariants") {
  const BumpAmplitude b(vec({0.2, 1.0}), 0.4);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int i = 0; i < 500; ++i) {
    const Vec xi = vec({0.2, 1.0}) + 0.5 * vec({g(rng), g(rng)});
    const double r = (xi - b.center()).norm();
    const double v = b(xi);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    if (r <= 0.2) CHECK(v == 1.0);
    if (r >= 0.4) CHECK(v == 0.0);
    if (v > 0) CHECK(b.support_box().contains(xi));
  }
  CHECK_THROWS_AS(BumpAmplitude(vec({0, 1}), 0.0), InvalidArgument);
}

TEST_CASE("transformed amplitude") {
  const BumpAmplitude b(vec({0.3, -0.2, 1.0}), 0.5);
  const TransformedAmplitude f(b);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1), band(0.3, 3.0);
  for (int i = 0; i < 500; ++i) {
    const Vec xi = vec({u(rng), u(rng), band(rng)});
    CHECK(f(xi) == doctest::Approx(b(lambda_map(xi)) * xi(2) * xi(2)).epsilon(1e-14));
    if (f(xi) > 0) CHECK(f.support_box().contains(xi));
  }
  const Box box = f.support_box();
  CHECK(box.lower(2) > 0.25);
  CHECK(box.upper(2) < 4.0);
  CHECK_THROWS_AS(TransformedAmplitude(BumpAmplitude(vec({0, 0.3}), 0.2)), InvalidArgument);
}

TEST_CASE("apply_pointwise at t = 0 is the mass of f_hat") {
  const BumpAmplitude b(vec({0.0, 1.0}), 0.5);
  const auto r = apply_pointwise(riesz(2, 1), b, 0.0, vec({-1.0, 0.0}), 1e-10);
  const double mass = std::pow(0.5, 2) * sphere_area(2) * radial_moment(2, 1);
  CHECK(r.value.real() == doctest::Approx(mass).epsilon(1e-8));
  CHECK(std::abs(r.value.imag()) < 1e-12);
}

TEST_CASE("pointwise magnitude follows the stationary-phase law on U1") {
  const GrowthSetup& s = riesz_setup();
  const auto sample = sample_u1(s.chart, s.domains, 64, 0, 1);
  REQUIRE(sample.hits.size() >= 10);
  const TransformedAmplitude f(s.bump);
  const double t = 200.0;
  double u1_min = 1e300;
  for (std::size_t i = 0; i < 10; ++i) {
    const Vec& x = sample.hits[i];
    const auto g = solve_in_domain(s.chart, s.domains, x);
    REQUIRE(g);
    const double predicted = 2 * kPi * f(g->xi) / std::sqrt(std::abs(g->det));
    const double got = std::abs(apply_pointwise(s.working, s.bump, t, x, 1e-9).value) * t;
    CHECK(got == doctest::Approx(predicted).epsilon(0.10));
    u1_min = std::min(u1_min, got / t);
  }
  // far outside U: no stationary point in the support, rapid decay
  const double far = std::abs(apply_pointwise(s.working, s.bump, t, vec({3.0, 4.0}), 1e-9).value);
  CHECK(far * 10 < u1_min);
}

TEST_CASE("apply_grid at t = 0 matches a direct inverse DFT") {
  std::mt19937_64 rng(12);
  const GridField f = random_grid(rng, 8);
  const GridField out = apply_grid(riesz(2, 1), f, 0.0);
  const auto ref = naive_inverse(f);
  CHECK(out.extents[0] == doctest::Approx(2 * kPi * 8 / 10.0));
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(out.samples[i] - ref[i]) < 1e-12);
}

TEST_CASE("apply_grid is unitary and commutes with constant phases") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ut(0.0, 100.0);
  for (int i = 0; i < 5; ++i) {
    const GridField f = random_grid(rng, 64);
    const double t = ut(rng);
    const double l0 = discrete_l2(apply_grid(riesz(2, 1), f, 0.0));
    const double lt = discrete_l2(apply_grid(riesz(2, 2, -1), f, t));
    CHECK(std::abs(lt - l0) <= 1e-10 * l0);
  }
  // the zero mode carries Phi(0) := 0, so keep it empty
  GridField f = random_grid(rng, 32);
  f.samples[16 * 32 + 16] = 0.0;
  const GridField a = apply_grid(constant_symbol(2, 0.7), f, 3.0);
  const GridField b = apply_grid(constant_symbol(2, 0.7), f, 0.0);
  const Complex phase = std::exp(Complex(0, 3.0 * 0.7));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a.samples[i] - phase * b.samples[i]) < 1e-12);

  CHECK_THROWS_AS(GridField({1.0, 1.0}, {6, 8}), InvalidArgument);
  CHECK_THROWS_AS(interpolate(a, vec({1e6, 0.0})), DomainError);
}

TEST_CASE("grid interpolation is exact at nodes and accurate between them") {
  GridField g({8.0, 8.0}, {64, 64});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec y = g.coordinate(i);
    g.samples[i] = Complex(std::sin(y(0)) * std::cos(0.5 * y(1)), y(0) * 0.1);
  }
  CHECK(interpolate(g, g.coordinate(64 * 30 + 17)) == g.samples[64 * 30 + 17]);
  const Vec y = vec({0.3141, -1.2718});
  const Complex expect(std::sin(y(0)) * std::cos(0.5 * y(1)), y(0) * 0.1);
  CHECK(std::abs(interpolate(g, y) - expect) < 1e-5);
}

TEST_CASE("grid and pointwise application agree") {
  const BumpAmplitude b(vec({0.0, 1.0}), 0.5);
  const double t = 20.0;
  const GridField f_hat = sample_frequency(b, {64.0, 64.0}, {1024, 1024});
  const GridField out = apply_grid(riesz(2, 1), f_hat, t);
  for (const Vec& x : {vec({-1.0, 0.0}), vec({-0.8, 0.1}), vec({-1.2, -0.05})}) {
    const Complex grid = interpolate(out, t * x);
    const Complex point = apply_pointwise(riesz(2, 1), b, t, x, 1e-10).value;
    CHECK(std::abs(grid - point) <= 0.01 * std::abs(point));
  }
}

TEST_CASE("grid files round trip") {
  std::mt19937_64 rng(3);
  const GridField f = random_grid(rng, 16);
  const auto path = (std::filesystem::temp_directory_path() / "umlab_test_grid.bin").string();
  write_grid(f, path);
  const GridField back = read_grid(path);
  CHECK(back.counts == f.counts);
  CHECK(back.extents == f.extents);
  CHECK(back.samples == f.samples);
  const std::string side = grid_sidecar_json(f, "umlab_test_grid.bin");
  CHECK(side.find("\"counts\"") != std::string::npos);
  std::filesystem::remove(path);
  {
    std::ofstream junk(path, std::ios::binary);
    junk << "nope";
  }
  CHECK_THROWS_AS(read_grid(path), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("bump L2 norm obeys Plancherel") {
  const BumpAmplitude b(vec({0.0, 1.0}), 0.5);
  const double fhat2 = std::pow(0.5, 2) * sphere_area(2) * radial_moment(2, 2);
  CHECK(bump_lp_norm(b, 2.0) == doctest::Approx(std::sqrt(std::pow(2 * kPi, 2) * fhat2)).epsilon(1e-6));
  CHECK(bump_lp_norm(b, 4.0 / 3.0) > bump_lp_norm(b, 2.0) * 0.1);
}

TEST_CASE("Halton points") {
  const auto h = halton_points(2, 4, 0);
  CHECK(h[0](0) == 0.5);
  CHECK(h[1](0) == 0.25);
  CHECK(h[2](0) == 0.75);
  CHECK(h[0](1) == doctest::Approx(1.0 / 3));
  CHECK(h[1](1) == doctest::Approx(2.0 / 3));
  const auto a = halton_points(3, 100, 42), b = halton_points(3, 100, 42), c = halton_points(3, 100, 43);
  bool differ = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    differ |= a[i] != c[i];
    CHECK(a[i].minCoeff() >= 0.0);
    CHECK(a[i].maxCoeff() < 1.0);
  }
  CHECK(differ);
}

TEST_CASE("U1 sampling does not depend on the thread count") {
  const GrowthSetup& s = riesz_setup();
  const auto one = sample_u1(s.chart, s.domains, 48, 5, 1);
  const auto four = sample_u1(s.chart, s.domains, 48, 5, 4);
  REQUIRE(one.hits.size() == four.hits.size());
  for (std::size_t i = 0; i < one.hits.size(); ++i) CHECK(one.hits[i] == four.hits[i]);
  for (const Vec& x : one.hits) CHECK(in_u1(s.chart, s.domains, x));
}

TEST_CASE("lower bound preconditions and the p = 2 plateau") {
  const GrowthSetup& s = riesz_setup();
  LowerBoundOptions o;
  o.n_samples = 32;
  o.threads = 1;
  CHECK_THROWS_AS(lower_bound_norm(s.working, s.domains, s.bump, 0.0, 1.5, o), InvalidArgument);
  CHECK_THROWS_AS(lower_bound_norm(s.working, s.domains, s.bump, 10.0, 2.5, o), InvalidArgument);
  o.n_samples = 16;
  CHECK_THROWS_AS(lower_bound_norm(s.working, s.domains, s.bump, 10.0, 1.5, o), InvalidArgument);
  o.n_samples = 32;

  const auto sample = sample_u1(s.chart, s.domains, 32, 0, 1);
  const auto a = lower_bound_norm(s.working, sample, s.bump, 128.0, 2.0, o);
  const auto b = lower_bound_norm(s.working, sample, s.bump, 512.0, 2.0, o);
  const double slope = std::log(b.surrogate / a.surrogate) / std::log(4.0);
  CHECK(std::abs(slope) < 0.05);
  CHECK(a.hits == static_cast<int>(sample.hits.size()));
  CHECK(a.std_error >= 0.0);
}

TEST_CASE("exponent fits") {
  std::vector<std::pair<double, double>> exact, wobble, flat;
  for (double t = 1; t <= 1000; t *= 2) {
    exact.emplace_back(t, 3 * std::sqrt(t));
    wobble.emplace_back(t, std::sqrt(t) * (1 + 0.1 * std::sin(std::log(t))));
    flat.emplace_back(t, 7.0);
  }
  const auto e = fit_exponent(exact, 1.5);
  CHECK(std::abs(e.slope - 0.5) <= 1e-12);
  CHECK(e.intercept == doctest::Approx(std::log(3.0)));
  CHECK(e.residual_rms < 1e-12);
  CHECK(e.p == 1.5);
  const auto w = fit_exponent(wobble);
  CHECK(std::abs(w.slope - 0.5) <= 0.05);
  CHECK(w.residual_rms > 0.0);
  CHECK(std::abs(fit_exponent(flat).slope) < 1e-14);

  std::vector<std::pair<double, double>> bad = exact;
  bad[3].second = -1.0;
  try {
    fit_exponent(bad);
    FAIL("expected DomainError");
  } catch (const DomainError& err) {
    CHECK(std::string(err.what()).find("8") != std::string::npos);
  }
  CHECK_THROWS_AS(fit_exponent({{1, 1}, {2, 2}, {100, 3}}), InvalidArgument);
  CHECK_THROWS_AS(fit_exponent({{16, 1}, {32, 2}, {64, 3}, {128, 4}}), InvalidArgument);
  CHECK(loglog_least_squares({{16, 1}, {32, 2}}).slope == doctest::Approx(1.0));
}

TEST_CASE("dual exponents") {
  const auto a = dual_exponent(4.0 / 3.0);
  CHECK(a.p_prime == doctest::Approx(4.0));
  CHECK(a.p_star == doctest::Approx(4.0));
  CHECK(a.measured == doctest::Approx(4.0 / 3.0));
  CHECK(dual_exponent(2.0).p_prime == 2.0);
  const auto c = dual_exponent(3.0);
  CHECK(c.p_prime == doctest::Approx(1.5));
  CHECK(c.p_star == 3.0);
  CHECK(c.measured == doctest::Approx(1.5));
  CHECK_THROWS_AS(dual_exponent(1.0), DomainError);
  CHECK(target_slope(2, 4.0 / 3.0) == doctest::Approx(0.5));
  CHECK(target_slope(2, 4.0) == doctest::Approx(0.5));
  CHECK(target_slope(3, 1.5) == doctest::Approx(0.5));
}

TEST_CASE("growth setup") {
  const GrowthSetup& s = riesz_setup();
  CHECK(s.domains.witness.branch == WitnessBranch::NonzeroSlope2d);
  CHECK(s.working.eval(vec({0, 1})) == doctest::Approx(riesz(2, 1).eval(s.pole)));
  CHECK_THROWS_AS(prepare_growth(constant_symbol(2, 1.0)), HypothesisError);
  CHECK_THROWS_AS(prepare_growth(constant_symbol(3, 1.0)), HypothesisError);
  CHECK(growth_setup_json(s).find("\"schema_version\"") != std::string::npos);
}
