#include "umlab/umlab.h"

#include <cstring>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "umlab/errors.hpp"
#include "umlab/fit.hpp"
#include "umlab/growth.hpp"
#include "umlab/multiplier.hpp"
#include "umlab/oscillatory.hpp"

using namespace umlab;

struct umlab_symbol {
  Symbol sym;
};
struct umlab_domains {
  WitnessDomains dom;
};
struct umlab_growth {
  GrowthSetup setup;
  std::optional<U1Sample> sample;
};
struct umlab_grid {
  GridField field;
};

namespace {

thread_local std::string g_last_error;

umlab_status fail(umlab_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
umlab_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return UMLAB_OK;
  } catch (const Error& e) {
    return fail(static_cast<umlab_status>(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(UMLAB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(UMLAB_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* what) {
  if (!p) throw InvalidArgument(std::string("null pointer: ") + what);
}

Vec vec_of(const double* p, int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = p[i];
  return v;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<double> arr(const Vec& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

extern "C" {

const char* umlab_version(void) { return "1.0.0"; }

const char* umlab_last_error(void) { return g_last_error.c_str(); }

void umlab_string_free(char* s) { std::free(s); }

umlab_status umlab_symbol_from_id(const char* id, int d, umlab_symbol** out) {
  return guarded([&] {
    need(id, "id");
    need(out, "out");
    *out = new umlab_symbol{symbol_from_id(id, d)};
  });
}

umlab_status umlab_symbol_from_json(const char* json, umlab_symbol** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new umlab_symbol{symbol_from_json(json)};
  });
}

void umlab_symbol_free(umlab_symbol* s) { delete s; }

int umlab_symbol_dimension(const umlab_symbol* s) { return s ? s->sym.dimension() : 0; }

umlab_status umlab_symbol_name(const umlab_symbol* s, char** out) {
  return guarded([&] {
    need(s, "symbol");
    need(out, "out");
    *out = dup_string(s->sym.name());
  });
}

umlab_status umlab_symbol_eval(const umlab_symbol* s, const double* xi, double* out) {
  return guarded([&] {
    need(s, "symbol");
    need(xi, "xi");
    need(out, "out");
    *out = s->sym.eval(vec_of(xi, s->sym.dimension()));
  });
}

umlab_status umlab_symbol_rotate_to_pole(const umlab_symbol* s, const double* p, umlab_symbol** out) {
  return guarded([&] {
    need(s, "symbol");
    need(p, "p");
    need(out, "out");
    *out = new umlab_symbol{rotate_to_pole(s->sym, vec_of(p, s->sym.dimension()))};
  });
}

umlab_status umlab_chart_phase_eval(const umlab_symbol* s, const double* u, double* value, double* grad,
                                    double* hess) {
  return guarded([&] {
    need(s, "symbol");
    need(u, "u");
    const int n = s->sym.dimension() - 1;
    const ChartPhase phi = chart_phase(s->sym);
    const Vec uu = vec_of(u, n);
    if (value) *value = phi.value(uu);
    if (grad) {
      const Vec g = phi.gradient(uu);
      for (int i = 0; i < n; ++i) grad[i] = g(i);
    }
    if (hess) {
      const Mat h = phi.hessian(uu);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) hess[i * n + j] = h(i, j);
    }
  });
}

umlab_status umlab_symbol_critical_points_json(const umlab_symbol* s, int n_starts, double tol, char** json_out) {
  return guarded([&] {
    need(s, "symbol");
    need(json_out, "json_out");
    const auto res = sphere_critical_points(s->sym, n_starts, tol);
    nlohmann::json j;
    j["schema_version"] = 1;
    j["symbol"] = s->sym.name();
    j["d"] = s->sym.dimension();
    j["starts"] = res.starts;
    j["converged_starts"] = res.converged_starts;
    j["search_failed"] = res.search_failed;
    j["morse"] = res.morse();
    j["points"] = nlohmann::json::array();
    for (const auto& p : res.points)
      j["points"].push_back({{"location", arr(p.location)},
                             {"kind", to_string(p.kind)},
                             {"value", p.value},
                             {"eigenvalues", arr(p.hessian_eigenvalues)},
                             {"gradient_norm", p.gradient_norm}});
    *json_out = dup_string(j.dump(2));
  });
}

umlab_status umlab_spherical_mean(const umlab_symbol* s, double t, double tol, double* re, double* im) {
  return guarded([&] {
    need(s, "symbol");
    need(re, "re");
    need(im, "im");
    const auto r = spherical_mean(s->sym, t, tol);
    *re = r.value.real();
    *im = r.value.imag();
  });
}

umlab_status umlab_schur_det(int n, const double* h, const double* x_minus, double* out) {
  return guarded([&] {
    need(h, "h");
    need(x_minus, "x_minus");
    need(out, "out");
    if (n < 1 || n >= kMaxDim) throw InvalidArgument("matrix size out of range");
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = h[i * n + j];
    *out = schur_det(m, vec_of(x_minus, n));
  });
}

umlab_status umlab_solve_critical(const umlab_symbol* s, const double* x, const double* xi_init, double tol,
                                  int max_iter, double* xi_out, double* det, int* signature, int* iterations,
                                  double* residual) {
  return guarded([&] {
    need(s, "symbol");
    need(x, "x");
    need(xi_init, "xi_init");
    const int d = s->sym.dimension();
    const auto r = solve_critical(chart_phase(s->sym), vec_of(x, d), vec_of(xi_init, d), tol, max_iter);
    if (xi_out)
      for (int i = 0; i < d; ++i) xi_out[i] = r.xi(i);
    if (det) *det = r.det;
    if (signature) *signature = r.signature;
    if (iterations) *iterations = r.iterations;
    if (residual) *residual = r.residual;
  });
}

umlab_status umlab_critical_closed_form_2d(const umlab_symbol* s, const double* x, double* xi_out) {
  return guarded([&] {
    need(s, "symbol");
    need(x, "x");
    need(xi_out, "xi_out");
    const Vec g = critical_closed_form_2d(chart_phase(s->sym), vec_of(x, 2));
    xi_out[0] = g(0);
    xi_out[1] = g(1);
  });
}

umlab_status umlab_domains_build(const umlab_symbol* s, const double* seed_offset, double shrink,
                                 umlab_domains** out) {
  return guarded([&] {
    need(s, "symbol");
    need(out, "out");
    const ChartPhase phi = chart_phase(s->sym);
    const Witness w = seed_offset ? witness_point(phi, vec_of(seed_offset, phi.dimension())) : witness_point(phi);
    *out = new umlab_domains{build_domains(phi, w, shrink)};
  });
}

umlab_status umlab_domains_from_json(const char* json, umlab_domains** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new umlab_domains{WitnessDomains::from_json(json)};
  });
}

umlab_status umlab_domains_to_json(const umlab_domains* dom, char** out) {
  return guarded([&] {
    need(dom, "domains");
    need(out, "out");
    *out = dup_string(dom->dom.to_json());
  });
}

umlab_status umlab_domains_in_u1(const umlab_symbol* s, const umlab_domains* dom, const double* x, int* inside) {
  return guarded([&] {
    need(s, "symbol");
    need(dom, "domains");
    need(x, "x");
    need(inside, "inside");
    if (dom->dom.dimension() != s->sym.dimension()) throw InvalidArgument("domains and symbol dimensions differ");
    *inside = in_u1(chart_phase(s->sym), dom->dom, vec_of(x, s->sym.dimension())) ? 1 : 0;
  });
}

void umlab_domains_free(umlab_domains* dom) { delete dom; }

umlab_status umlab_decay_check(const char* fixture, const double* t_list, int n_t, double tol, umlab_decay_row* rows,
                               double* slope, double* bound, int* pass) {
  return guarded([&] {
    need(fixture, "fixture");
    need(t_list, "t_list");
    need(rows, "rows");
    if (n_t < 0) throw InvalidArgument("negative t count");
    const auto fx = decay_fixture(decay_fixture_from_name(fixture));
    const auto rep = decay_check(fx.phase, fx.amp, fx.xi_star, std::vector<double>(t_list, t_list + n_t), tol);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& r = rep.rows[i];
      rows[i] = {r.t, r.direct.real(), r.direct.imag(), r.approx.real(), r.approx.imag(), r.abs_err};
    }
    if (slope) *slope = rep.slope;
    if (bound) *bound = rep.bound;
    if (pass) *pass = rep.pass ? 1 : 0;
  });
}

umlab_status umlab_decay_row_eval(const char* fixture, double t, double tol, umlab_decay_row* row) {
  return guarded([&] {
    need(fixture, "fixture");
    need(row, "row");
    if (!(t > 0.0)) throw InvalidArgument("t must be positive");
    const auto fx = decay_fixture(decay_fixture_from_name(fixture));
    const Complex direct = oscillatory_integral(fx.phase, fx.amp, t, tol).value;
    const Complex approx = stationary_phase_approx(fx.phase, fx.amp, fx.xi_star, t);
    *row = {t, direct.real(), direct.imag(), approx.real(), approx.imag(), std::abs(direct - approx)};
  });
}

umlab_status umlab_decay_fixture_dim(const char* fixture, int* dim) {
  return guarded([&] {
    need(fixture, "fixture");
    need(dim, "dim");
    *dim = decay_fixture(decay_fixture_from_name(fixture)).phase.dim;
  });
}

umlab_status umlab_apply_pointwise(const umlab_symbol* s, const double* center, double eps, double t,
                                   const double* x, double tol, double* re, double* im) {
  return guarded([&] {
    need(s, "symbol");
    need(center, "center");
    need(x, "x");
    need(re, "re");
    need(im, "im");
    const int d = s->sym.dimension();
    const auto r = apply_pointwise(s->sym, BumpAmplitude(vec_of(center, d), eps), t, vec_of(x, d), tol);
    *re = r.value.real();
    *im = r.value.imag();
  });
}

umlab_status umlab_grid_from_bump(int d, const double* center, double eps, const double* extents, const int* counts,
                                  umlab_grid** out) {
  return guarded([&] {
    need(center, "center");
    need(extents, "extents");
    need(counts, "counts");
    need(out, "out");
    if (d < 1 || d > 3) throw InvalidArgument("grid dimension must be 1, 2 or 3");
    *out = new umlab_grid{sample_frequency(BumpAmplitude(vec_of(center, d), eps),
                                           std::vector<double>(extents, extents + d),
                                           std::vector<int>(counts, counts + d))};
  });
}

umlab_status umlab_grid_apply(const umlab_symbol* s, const umlab_grid* f_hat, double t, umlab_grid** out) {
  return guarded([&] {
    need(s, "symbol");
    need(f_hat, "grid");
    need(out, "out");
    *out = new umlab_grid{apply_grid(s->sym, f_hat->field, t)};
  });
}

umlab_status umlab_grid_l2(const umlab_grid* g, double* out) {
  return guarded([&] {
    need(g, "grid");
    need(out, "out");
    *out = discrete_l2(g->field);
  });
}

umlab_status umlab_grid_write(const umlab_grid* g, const char* path) {
  return guarded([&] {
    need(g, "grid");
    need(path, "path");
    write_grid(g->field, path);
    std::ofstream js(std::string(path) + ".json");
    if (!js) throw IoError(std::string("cannot open sidecar for ") + path);
    js << grid_sidecar_json(g->field, path) << '\n';
  });
}

void umlab_grid_free(umlab_grid* g) { delete g; }

umlab_status umlab_fit_exponent(const double* t, const double* values, int n, double* slope, double* intercept,
                                double* residual_rms) {
  return guarded([&] {
    need(t, "t");
    need(values, "values");
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < n; ++i) pairs.emplace_back(t[i], values[i]);
    const auto fit = fit_exponent(pairs);
    if (slope) *slope = fit.slope;
    if (intercept) *intercept = fit.intercept;
    if (residual_rms) *residual_rms = fit.residual_rms;
  });
}

umlab_status umlab_loglog_fit(const double* t, const double* values, int n, double* slope, double* intercept,
                             double* residual_rms) {
  return guarded([&] {
    need(t, "t");
    need(values, "values");
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < n; ++i) pairs.emplace_back(t[i], values[i]);
    const auto fit = loglog_least_squares(pairs);
    if (slope) *slope = fit.slope;
    if (intercept) *intercept = fit.intercept;
    if (residual_rms) *residual_rms = fit.residual_rms;
  });
}

umlab_status umlab_dual_exponent(double p, double* p_prime, double* p_star, double* measured) {
  return guarded([&] {
    const auto dual = dual_exponent(p);
    if (p_prime) *p_prime = dual.p_prime;
    if (p_star) *p_star = dual.p_star;
    if (measured) *measured = dual.measured;
  });
}

umlab_status umlab_growth_prepare(const umlab_symbol* s, double shrink, umlab_growth** out) {
  return guarded([&] {
    need(s, "symbol");
    need(out, "out");
    GrowthOptions opts;
    opts.shrink = shrink;
    *out = new umlab_growth{prepare_growth(s->sym, opts), std::nullopt};
  });
}

umlab_status umlab_growth_setup_json(const umlab_growth* g, char** out) {
  return guarded([&] {
    need(g, "growth");
    need(out, "out");
    *out = dup_string(growth_setup_json(g->setup));
  });
}

umlab_status umlab_growth_sample(umlab_growth* g, int n_samples, uint64_t seed, int threads, int* hits) {
  return guarded([&] {
    need(g, "growth");
    if (n_samples < 32) throw InvalidArgument("lower bound needs at least 32 samples");
    g->sample = sample_u1(g->setup.chart, g->setup.domains, n_samples, seed, threads);
    if (hits) *hits = static_cast<int>(g->sample->hits.size());
  });
}

umlab_status umlab_growth_evaluate(const umlab_growth* g, double t, double p, double quad_tol, int threads,
                                   umlab_lower_bound* out) {
  return guarded([&] {
    need(g, "growth");
    need(out, "out");
    if (!g->sample) throw InvalidArgument("call umlab_growth_sample first");
    LowerBoundOptions opts;
    opts.quad_tol = quad_tol;
    opts.threads = threads;
    const auto e = lower_bound_norm(g->setup.working, *g->sample, g->setup.bump, t, p, opts);
    *out = {e.t, e.p, e.surrogate, e.integral, e.std_error, e.n_samples, e.hits, e.quad_failures};
  });
}

umlab_status umlab_growth_bump_lp_norm(const umlab_growth* g, double p, double* out) {
  return guarded([&] {
    need(g, "growth");
    need(out, "out");
    *out = bump_lp_norm(g->setup.bump, p);
  });
}

void umlab_growth_free(umlab_growth* g) { delete g; }

}  // extern "C"
