#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "umlab/umlab.h"

namespace {

std::string take(char* s) {
  std::string out(s);
  umlab_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and errors") {
  CHECK(std::string(umlab_version()).size() > 0);
  umlab_symbol* s = nullptr;
  CHECK(umlab_symbol_from_id("bogus", 2, &s) == UMLAB_ERR_INVALID_ARGUMENT);
  CHECK(s == nullptr);
  CHECK(std::string(umlab_last_error()).size() > 0);
  CHECK(umlab_symbol_from_id(nullptr, 2, &s) == UMLAB_ERR_INVALID_ARGUMENT);
  umlab_symbol_free(nullptr);
}

TEST_CASE("symbol handles") {
  umlab_symbol* s = nullptr;
  REQUIRE(umlab_symbol_from_id("riesz:1", 2, &s) == UMLAB_OK);
  CHECK(umlab_symbol_dimension(s) == 2);
  char* name = nullptr;
  REQUIRE(umlab_symbol_name(s, &name) == UMLAB_OK);
  CHECK(take(name) == "riesz:1");

  const double xi[2] = {3, 4};
  double v = 0;
  REQUIRE(umlab_symbol_eval(s, xi, &v) == UMLAB_OK);
  CHECK(v == doctest::Approx(0.6));
  const double zero[2] = {0, 0};
  CHECK(umlab_symbol_eval(s, zero, &v) == UMLAB_ERR_DOMAIN);

  const double u[1] = {0.0};
  double val = 1, grad = 0, hess = 1;
  REQUIRE(umlab_chart_phase_eval(s, u, &val, &grad, &hess) == UMLAB_OK);
  CHECK(val == 0.0);
  CHECK(grad == doctest::Approx(1.0));
  CHECK(hess == doctest::Approx(0.0));

  const double pole[2] = {1, 0};
  umlab_symbol* r = nullptr;
  REQUIRE(umlab_symbol_rotate_to_pole(s, pole, &r) == UMLAB_OK);
  const double ed[2] = {0, 1};
  REQUIRE(umlab_symbol_eval(r, ed, &v) == UMLAB_OK);
  CHECK(v == doctest::Approx(1.0));
  umlab_symbol_free(r);

  char* js = nullptr;
  REQUIRE(umlab_symbol_critical_points_json(s, 16, 1e-10, &js) == UMLAB_OK);
  const auto j = nlohmann::json::parse(take(js));
  CHECK(j["points"].size() == 2);
  CHECK(j["morse"] == true);
  CHECK(j["schema_version"] == 1);

  double re = 0, im = 0;
  REQUIRE(umlab_spherical_mean(s, 1.0, 1e-12, &re, &im) == UMLAB_OK);
  CHECK(re == doctest::Approx(0.7651976865579666).epsilon(1e-9));
  umlab_symbol_free(s);

  umlab_symbol* fromjs = nullptr;
  REQUIRE(umlab_symbol_from_json(R"({"d": 2, "terms": [{"coef": 1, "powers": [1, 0]}]})", &fromjs) == UMLAB_OK);
  REQUIRE(umlab_symbol_eval(fromjs, xi, &v) == UMLAB_OK);
  CHECK(v == doctest::Approx(0.6));
  umlab_symbol_free(fromjs);
}

TEST_CASE("phase geometry through the C interface") {
  const double h[4] = {2, 0, 0, 3};
  const double xm[2] = {1, 1};
  double det = 0;
  REQUIRE(umlab_schur_det(2, h, xm, &det) == UMLAB_OK);
  CHECK(det == doctest::Approx(-5.0));
  const double sing[4] = {0, 0, 0, 0};
  CHECK(umlab_schur_det(2, sing, xm, &det) == UMLAB_ERR_DEGENERATE);

  umlab_symbol* s = nullptr;
  REQUIRE(umlab_symbol_from_id("riesz:1", 2, &s) == UMLAB_OK);
  const double x[2] = {-0.9, 0.1};
  const double init[2] = {0, 1};
  double xi[2], closed[2], residual = 1;
  int sig = 9, iters = -1;
  REQUIRE(umlab_solve_critical(s, x, init, 1e-12, 100, xi, &det, &sig, &iters, &residual) == UMLAB_OK);
  REQUIRE(umlab_critical_closed_form_2d(s, x, closed) == UMLAB_OK);
  CHECK(std::abs(xi[0] - closed[0]) < 1e-10);
  CHECK(std::abs(xi[1] - closed[1]) < 1e-10);
  CHECK(residual <= 1e-12);
  const double bad[2] = {0, 1};
  CHECK(umlab_solve_critical(s, bad, init, 1e-12, 100, xi, &det, &sig, &iters, &residual) == UMLAB_ERR_DOMAIN);

  umlab_domains* dom = nullptr;
  REQUIRE(umlab_domains_build(s, nullptr, 1.0, &dom) == UMLAB_OK);
  char* js = nullptr;
  REQUIRE(umlab_domains_to_json(dom, &js) == UMLAB_OK);
  const std::string text = take(js);
  umlab_domains* again = nullptr;
  REQUIRE(umlab_domains_from_json(text.c_str(), &again) == UMLAB_OK);
  const auto j = nlohmann::json::parse(text);
  const double x0[2] = {j["x0"][0].get<double>(), j["x0"][1].get<double>()};
  int inside = 0;
  REQUIRE(umlab_domains_in_u1(s, again, x0, &inside) == UMLAB_OK);
  CHECK(inside == 1);
  const double outside[2] = {5, 5};
  REQUIRE(umlab_domains_in_u1(s, again, outside, &inside) == UMLAB_OK);
  CHECK(inside == 0);
  umlab_domains_free(dom);
  umlab_domains_free(again);
  umlab_symbol_free(s);
}

TEST_CASE("decay, pointwise and grids through the C interface") {
  const double ts[4] = {50, 100, 200, 400};
  umlab_decay_row rows[4];
  double slope = 0, bound = 0;
  int pass = 0;
  REQUIRE(umlab_decay_check("quadratic1d", ts, 4, 1e-10, rows, &slope, &bound, &pass) == UMLAB_OK);
  CHECK(pass == 1);
  CHECK(slope <= bound);
  umlab_decay_row one{};
  REQUIRE(umlab_decay_row_eval("quadratic1d", 100, 1e-10, &one) == UMLAB_OK);
  CHECK(one.abs_err == doctest::Approx(rows[1].abs_err).epsilon(1e-6));
  int dim = 0;
  REQUIRE(umlab_decay_fixture_dim("saddle2d", &dim) == UMLAB_OK);
  CHECK(dim == 2);
  CHECK(umlab_decay_check("nope", ts, 4, 1e-10, rows, &slope, &bound, &pass) == UMLAB_ERR_INVALID_ARGUMENT);

  umlab_symbol* s = nullptr;
  REQUIRE(umlab_symbol_from_id("riesz:1", 2, &s) == UMLAB_OK);
  const double center[2] = {0, 1};
  const double x[2] = {-1, 0};
  double re = 0, im = 0;
  REQUIRE(umlab_apply_pointwise(s, center, 0.5, 50, x, 1e-9, &re, &im) == UMLAB_OK);
  CHECK(std::hypot(re, im) > 0);

  const double ext[2] = {16, 16};
  const int counts[2] = {128, 128};
  umlab_grid* g = nullptr;
  REQUIRE(umlab_grid_from_bump(2, center, 0.5, ext, counts, &g) == UMLAB_OK);
  umlab_grid *a0 = nullptr, *a1 = nullptr;
  REQUIRE(umlab_grid_apply(s, g, 0.0, &a0) == UMLAB_OK);
  REQUIRE(umlab_grid_apply(s, g, 37.0, &a1) == UMLAB_OK);
  double l0 = 0, l1 = 0;
  REQUIRE(umlab_grid_l2(a0, &l0) == UMLAB_OK);
  REQUIRE(umlab_grid_l2(a1, &l1) == UMLAB_OK);
  CHECK(std::abs(l1 - l0) <= 1e-10 * l0);
  const auto path = (std::filesystem::temp_directory_path() / "umlab_capi_grid.bin").string();
  REQUIRE(umlab_grid_write(a1, path.c_str()) == UMLAB_OK);
  CHECK(std::filesystem::file_size(path) == 4 + 4 + 4 + 2 * 8 + 2 * 4 + 128 * 128 * 16);
  CHECK(std::filesystem::exists(path + ".json"));
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".json");
  const int bad_counts[2] = {100, 128};
  umlab_grid* bad = nullptr;
  CHECK(umlab_grid_from_bump(2, center, 0.5, ext, bad_counts, &bad) == UMLAB_ERR_INVALID_ARGUMENT);
  umlab_grid_free(g);
  umlab_grid_free(a0);
  umlab_grid_free(a1);
  umlab_symbol_free(s);
}

TEST_CASE("fits and exponents through the C interface") {
  double t[6], v[6];
  for (int i = 0; i < 6; ++i) {
    t[i] = 16.0 * std::pow(2.0, i);
    v[i] = 2.0 * std::pow(t[i], 0.25);
  }
  double slope = 0, icpt = 0, res = 1;
  REQUIRE(umlab_fit_exponent(t, v, 6, &slope, &icpt, &res) == UMLAB_OK);
  CHECK(slope == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(umlab_fit_exponent(t, v, 3, &slope, &icpt, &res) == UMLAB_ERR_INVALID_ARGUMENT);
  REQUIRE(umlab_loglog_fit(t, v, 3, &slope, &icpt, &res) == UMLAB_OK);
  CHECK(slope == doctest::Approx(0.25).epsilon(1e-12));
  double pp = 0, ps = 0, m = 0;
  REQUIRE(umlab_dual_exponent(4.0, &pp, &ps, &m) == UMLAB_OK);
  CHECK(pp == doctest::Approx(4.0 / 3.0));
  CHECK(m == doctest::Approx(4.0 / 3.0));
  CHECK(ps == 4.0);
  CHECK(umlab_dual_exponent(0.5, &pp, &ps, &m) == UMLAB_ERR_DOMAIN);
}

TEST_CASE("growth pipeline through the C interface") {
  umlab_symbol* s = nullptr;
  REQUIRE(umlab_symbol_from_id("riesz:1", 2, &s) == UMLAB_OK);
  umlab_growth* g = nullptr;
  REQUIRE(umlab_growth_prepare(s, 1.0, &g) == UMLAB_OK);
  umlab_lower_bound lb{};
  CHECK(umlab_growth_evaluate(g, 16, 1.5, 1e-7, 1, &lb) == UMLAB_ERR_INVALID_ARGUMENT);
  int hits = 0;
  REQUIRE(umlab_growth_sample(g, 32, 0, 1, &hits) == UMLAB_OK);
  CHECK(hits > 0);
  REQUIRE(umlab_growth_evaluate(g, 16, 1.5, 1e-7, 1, &lb) == UMLAB_OK);
  CHECK(lb.surrogate > 0);
  CHECK(lb.hits == hits);
  CHECK(lb.n_samples == 32);
  double norm = 0;
  REQUIRE(umlab_growth_bump_lp_norm(g, 1.5, &norm) == UMLAB_OK);
  CHECK(norm > 0);
  char* js = nullptr;
  REQUIRE(umlab_growth_setup_json(g, &js) == UMLAB_OK);
  CHECK(nlohmann::json::parse(take(js))["d"] == 2);
  umlab_growth_free(g);
  umlab_symbol_free(s);

  umlab_symbol* c = nullptr;
  REQUIRE(umlab_symbol_from_id("constant", 3, &c) == UMLAB_OK);
  CHECK(umlab_growth_prepare(c, 1.0, &g) == UMLAB_ERR_HYPOTHESIS);
  umlab_symbol_free(c);
}
