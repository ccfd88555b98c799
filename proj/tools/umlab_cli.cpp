// umlab_cli: experiment runner over the umlab C interface.
//
// Exit codes: 0 success, 1 check failed (statphase slope outside the band),
// 2 usage, 3 numerical budget or nonconvergence, 4 hypothesis violation.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "umlab/umlab.h"

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kBudget = 3, kHypothesis = 4 };

struct Failure {
  int code;
  std::string message;
};

int exit_code(umlab_status s) {
  switch (s) {
    case UMLAB_OK:
      return kOk;
    case UMLAB_ERR_INVALID_ARGUMENT:
    case UMLAB_ERR_DOMAIN:
    case UMLAB_ERR_IO:
      return kUsage;
    case UMLAB_ERR_BUDGET:
    case UMLAB_ERR_NONCONVERGENCE:
      return kBudget;
    case UMLAB_ERR_HYPOTHESIS:
    case UMLAB_ERR_DEGENERATE:
      return kHypothesis;
    default:
      return kCheckFailed;
  }
}

void check(umlab_status s, const std::string& context) {
  if (s != UMLAB_OK) throw Failure{exit_code(s), context + ": " + umlab_last_error()};
}

struct SymbolDeleter {
  void operator()(umlab_symbol* s) const { umlab_symbol_free(s); }
};
struct GrowthDeleter {
  void operator()(umlab_growth* g) const { umlab_growth_free(g); }
};
struct DomainsDeleter {
  void operator()(umlab_domains* d) const { umlab_domains_free(d); }
};
using SymbolPtr = std::unique_ptr<umlab_symbol, SymbolDeleter>;

std::string take_string(char* s) {
  std::string out(s ? s : "");
  umlab_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kUsage, "cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kUsage, "cannot write " + path};
  out << text;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Config {
  std::string symbol = "riesz:1";
  int d = 2;
  double p = 4.0 / 3.0;
  double t_min = 16.0;
  double t_max = 512.0;
  int count = 6;
  double tol = 1e-7;
  int samples = 64;
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
  int threads = 0;
  std::string fixture = "quadratic1d";
  double shrink = 1.0;
  std::vector<double> x;
  std::vector<double> xi_init;
  std::vector<double> seed_offset;
  bool no_rotate = false;
  int starts = 0;

  json to_json() const {
    return {{"symbol", symbol}, {"d", d},         {"p", p},           {"t_min", t_min},
            {"t_max", t_max},   {"count", count}, {"tol", tol},       {"samples", samples},
            {"seed", seed},     {"threads", threads}, {"shrink", shrink}};
  }
};

// Options registered on a subcommand, kept so the JSON config can fill the
// ones the user left unset.
struct Bindings {
  std::vector<std::pair<std::string, std::function<void(const json&)>>> setters;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  template <class T>
  void add(CLI::App* app, const std::string& flag, const std::string& key, T& target, const std::string& help) {
    options.emplace_back(key, app->add_option(flag, target, help)->capture_default_str());
    setters.emplace_back(key, [&target](const json& j) { target = j.get<T>(); });
  }

  void apply(const std::string& path) const {
    if (path.empty()) return;
    json j;
    try {
      j = json::parse(read_file(path));
    } catch (const json::exception& e) {
      throw Failure{kUsage, "config " + path + ": " + e.what()};
    }
    for (std::size_t i = 0; i < setters.size(); ++i) {
      const auto& [key, opt] = options[i];
      if (opt->count() > 0 || !j.contains(key)) continue;
      try {
        setters[i].second(j.at(key));
      } catch (const json::exception& e) {
        throw Failure{kUsage, "config key " + key + ": " + e.what()};
      }
    }
  }
};

SymbolPtr load_symbol(const Config& cfg) {
  umlab_symbol* s = nullptr;
  const bool is_file = cfg.symbol.size() > 5 && cfg.symbol.substr(cfg.symbol.size() - 5) == ".json";
  if (is_file)
    check(umlab_symbol_from_json(read_file(cfg.symbol).c_str(), &s), "symbol");
  else
    check(umlab_symbol_from_id(cfg.symbol.c_str(), cfg.d, &s), "symbol");
  if (s && umlab_symbol_dimension(s) != cfg.d && !is_file) {
    umlab_symbol_free(s);
    throw Failure{kUsage, "symbol dimension mismatch"};
  }
  return SymbolPtr(s);
}

std::vector<double> schedule(const Config& cfg, int min_count) {
  if (cfg.count < min_count) throw Failure{kUsage, "--count must be at least " + std::to_string(min_count)};
  if (!(cfg.t_min > 0.0 && cfg.t_max > cfg.t_min)) throw Failure{kUsage, "need 0 < t-min < t-max"};
  std::vector<double> ts;
  const double ratio = cfg.t_max / cfg.t_min;
  for (int k = 0; k < cfg.count; ++k) {
    double t = cfg.t_min * std::pow(ratio, static_cast<double>(k) / (cfg.count - 1));
    if (std::abs(t - std::round(t)) < 1e-9 * t) t = std::round(t);
    ts.push_back(t);
  }
  return ts;
}

void emit(const Config& cfg, const std::string& text, const std::string& summary) {
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    write_file(cfg.out, text);
    if (!summary.empty()) std::cout << summary;
  }
}

// ---------------------------------------------------------------------------

int cmd_symbol_inspect(const Config& cfg) {
  auto sym = load_symbol(cfg);
  const int starts = cfg.starts > 0 ? cfg.starts : 16 * umlab_symbol_dimension(sym.get());
  char* raw = nullptr;
  check(umlab_symbol_critical_points_json(sym.get(), starts, 1e-10, &raw), "critical points");
  json crit = json::parse(take_string(raw));

  json means = json::array();
  for (double t : {0.0, 1.0, 10.0, 100.0}) {
    double re = 0, im = 0;
    check(umlab_spherical_mean(sym.get(), t, 1e-10, &re, &im), "spherical mean");
    means.push_back({{"t", t}, {"re", re}, {"im", im}, {"abs", std::hypot(re, im)}});
  }
  json report = {{"schema_version", kSchemaVersion},
                 {"command", "symbol inspect"},
                 {"symbol", crit["symbol"]},
                 {"d", crit["d"]},
                 {"morse", crit["morse"]},
                 {"critical_points", crit},
                 {"spherical_mean", means}};

  std::ostringstream summary;
  int nondegenerate = 0;
  for (const auto& p : crit["points"]) nondegenerate += p["kind"] != "degenerate";
  summary << crit["symbol"].get<std::string>() << ": " << crit["points"].size() << " critical points, "
          << nondegenerate << " nondegenerate, Morse: " << (crit["morse"].get<bool>() ? "yes" : "no") << '\n';
  if (crit["search_failed"].get<bool>()) summary << "warning: no Newton start converged\n";
  emit(cfg, report.dump(2) + "\n", summary.str());
  if (!cfg.out.empty()) return kOk;
  std::cerr << summary.str();
  return kOk;
}

int cmd_statphase(const Config& cfg) {
  int dim = 0;
  check(umlab_decay_fixture_dim(cfg.fixture.c_str(), &dim), "fixture");
  const auto ts = schedule(cfg, 3);
  std::string csv = "t,direct_re,direct_im,approx_re,approx_im,abs_err\n";
  std::vector<double> errs;
  for (double t : ts) {
    umlab_decay_row row{};
    const auto s = umlab_decay_row_eval(cfg.fixture.c_str(), t, cfg.tol, &row);
    if (s != UMLAB_OK) {
      emit(cfg, csv, "");
      throw Failure{exit_code(s), "t = " + fmt(t) + ": " + umlab_last_error()};
    }
    csv += fmt(row.t) + "," + fmt(row.direct_re) + "," + fmt(row.direct_im) + "," + fmt(row.approx_re) + "," +
           fmt(row.approx_im) + "," + fmt(row.abs_err) + "\n";
    errs.push_back(row.abs_err);
  }
  double slope = 0.0;
  check(umlab_loglog_fit(ts.data(), errs.data(), static_cast<int>(ts.size()), &slope, nullptr, nullptr),
        "decay fit");
  const double bound = -(dim / 2.0 + 1.0) + 0.3;
  const bool pass = slope <= bound;
  std::ostringstream summary;
  summary << cfg.fixture << ": decay slope " << fmt(slope) << ", bound " << fmt(bound) << ", "
          << (pass ? "PASS" : "FAIL") << '\n';
  emit(cfg, csv, summary.str());
  if (cfg.out.empty()) std::cerr << summary.str();
  if (!cfg.out.empty()) {
    json j = {{"schema_version", kSchemaVersion}, {"command", "statphase"}, {"fixture", cfg.fixture},
              {"d", dim}, {"t", ts}, {"tol", cfg.tol}, {"slope", slope}, {"bound", bound}, {"pass", pass}};
    write_file(cfg.out + ".json", j.dump(2) + "\n");
  }
  return pass ? kOk : kCheckFailed;
}

std::string stem(const std::string& out) {
  if (out.size() > 4 && out.substr(out.size() - 4) == ".csv") return out.substr(0, out.size() - 4);
  return out;
}

int cmd_growth(const Config& cfg) {
  if (!(cfg.p > 1.0)) throw Failure{kUsage, "--p must exceed 1"};
  if (cfg.samples < 32) throw Failure{kUsage, "--samples must be at least 32"};
  const auto ts = schedule(cfg, 2);
  double p_prime = 0, p_star = 0, measured = 0;
  check(umlab_dual_exponent(cfg.p, &p_prime, &p_star, &measured), "p");

  auto sym = load_symbol(cfg);
  const int d = umlab_symbol_dimension(sym.get());
  const auto clock0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count(); };

  umlab_growth* raw = nullptr;
  check(umlab_growth_prepare(sym.get(), cfg.shrink, &raw), "growth setup");
  std::unique_ptr<umlab_growth, GrowthDeleter> growth(raw);
  char* setup_raw = nullptr;
  check(umlab_growth_setup_json(growth.get(), &setup_raw), "growth setup");
  const json setup = json::parse(take_string(setup_raw));
  int hits = 0;
  check(umlab_growth_sample(growth.get(), cfg.samples, cfg.seed, cfg.threads, &hits), "U1 sample");
  std::cerr << "setup: eps " << setup["domains"]["eps"] << ", U1 hits " << hits << "/" << cfg.samples << " ("
            << elapsed() << " s)\n";

  std::string csv = "t,p,surrogate,n_samples,quad_tol,integral,std_error,hits,quad_failures\n";
  std::string dat = "# t surrogate\n";
  std::vector<double> values;
  json rows = json::array();
  for (double t : ts) {
    umlab_lower_bound lb{};
    const auto s = umlab_growth_evaluate(growth.get(), t, measured, cfg.tol, cfg.threads, &lb);
    if (s != UMLAB_OK) {
      if (!cfg.out.empty()) write_file(cfg.out, csv);
      else std::cout << csv;
      throw Failure{exit_code(s), "t = " + fmt(t) + ": " + umlab_last_error()};
    }
    csv += fmt(t) + "," + fmt(measured) + "," + fmt(lb.surrogate) + "," + std::to_string(lb.n_samples) + "," +
           fmt(cfg.tol) + "," + fmt(lb.integral) + "," + fmt(lb.std_error) + "," + std::to_string(lb.hits) + "," +
           std::to_string(lb.quad_failures) + "\n";
    dat += fmt(t) + " " + fmt(lb.surrogate) + "\n";
    values.push_back(lb.surrogate);
    rows.push_back({{"t", t}, {"surrogate", lb.surrogate}, {"std_error", lb.std_error},
                    {"quad_failures", lb.quad_failures}});
    std::cerr << "t " << t << ": surrogate " << lb.surrogate << " (" << elapsed() << " s)\n";
  }

  double slope = 0, intercept = 0, resid = 0;
  std::string method = "fit_exponent";
  const auto fs = umlab_fit_exponent(ts.data(), values.data(), static_cast<int>(ts.size()), &slope, &intercept, &resid);
  if (fs == UMLAB_ERR_INVALID_ARGUMENT) {
    // schedule too short for a decade-spanning fit: plain regression, flagged
    method = "loglog_short_span";
    check(umlab_loglog_fit(ts.data(), values.data(), static_cast<int>(ts.size()), &slope, &intercept, &resid),
          "fit");
    std::cerr << "warning: t schedule spans less than a decade or has fewer than 4 points; unqualified fit\n";
  } else {
    check(fs, "fit");
  }
  const double target = d * (1.0 / measured - 0.5);
  double f_norm = 0.0;
  check(umlab_growth_bump_lp_norm(growth.get(), measured, &f_norm), "bump norm");

  Config resolved = cfg;
  json summary = {{"schema_version", kSchemaVersion},
                  {"command", "growth"},
                  {"config", resolved.to_json()},
                  {"dual", {{"p_requested", cfg.p}, {"p_prime", p_prime}, {"p_star", p_star}, {"p_measured", measured},
                            {"mapped", measured != cfg.p}}},
                  {"target_slope", target},
                  {"fit", {{"slope", slope}, {"intercept", intercept}, {"residual_rms", resid},
                           {"t_min", ts.front()}, {"t_max", ts.back()}, {"n", ts.size()}, {"method", method}}},
                  {"bump_lp_norm", f_norm},
                  {"u1_hits", hits},
                  {"setup", setup},
                  {"rows", rows},
                  {"csv_columns", "t,p,surrogate,n_samples,quad_tol,integral,std_error,hits,quad_failures"}};
  std::ostringstream line;
  line << "slope " << fmt(slope) << " (target " << fmt(target) << ", residual " << fmt(resid) << ")\n";
  if (cfg.out.empty()) {
    std::cout << csv;
    std::cerr << summary.dump(2) << '\n' << line.str();
  } else {
    const std::string base = stem(cfg.out);
    write_file(cfg.out, csv);
    write_file(base + ".json", summary.dump(2) + "\n");
    write_file(base + ".dat", dat);
    std::cout << line.str();
  }
  return kOk;
}

int cmd_critical_solve(const Config& cfg) {
  auto sym = load_symbol(cfg);
  const int d = umlab_symbol_dimension(sym.get());
  if (static_cast<int>(cfg.x.size()) != d) throw Failure{kUsage, "--x needs " + std::to_string(d) + " entries"};
  std::vector<double> init = cfg.xi_init;
  if (init.empty()) {
    init.assign(static_cast<std::size_t>(d), 0.0);
    init.back() = 1.0;
  }
  if (static_cast<int>(init.size()) != d) throw Failure{kUsage, "--xi-init needs " + std::to_string(d) + " entries"};
  std::vector<double> xi(static_cast<std::size_t>(d));
  double det = 0, residual = 0;
  int sig = 0, iters = 0;
  const double tol = cfg.tol > 0 ? cfg.tol : 1e-12;
  check(umlab_solve_critical(sym.get(), cfg.x.data(), init.data(), tol, 100, xi.data(), &det, &sig, &iters, &residual),
        "solve");
  json j = {{"schema_version", kSchemaVersion},
            {"command", "critical solve"},
            {"symbol", cfg.symbol},
            {"d", d},
            {"x", cfg.x},
            {"xi_init", init},
            {"xi", xi},
            {"det", det},
            {"signature", sig},
            {"iterations", iters},
            {"residual", residual}};
  if (d == 2) {
    std::vector<double> closed(2);
    if (umlab_critical_closed_form_2d(sym.get(), cfg.x.data(), closed.data()) == UMLAB_OK)
      j["closed_form"] = closed;
  }
  emit(cfg, j.dump(2) + "\n", "xi = [" + fmt(xi.front()) + (d > 1 ? ", ...]" : "]") + "\n");
  return kOk;
}

int cmd_domains_build(const Config& cfg) {
  auto sym = load_symbol(cfg);
  std::string text;
  if (cfg.no_rotate) {
    const int d = umlab_symbol_dimension(sym.get());
    if (!cfg.seed_offset.empty() && static_cast<int>(cfg.seed_offset.size()) != d - 1)
      throw Failure{kUsage, "--seed-offset needs " + std::to_string(d - 1) + " entries"};
    umlab_domains* raw = nullptr;
    check(umlab_domains_build(sym.get(), cfg.seed_offset.empty() ? nullptr : cfg.seed_offset.data(), cfg.shrink, &raw),
          "domains");
    std::unique_ptr<umlab_domains, DomainsDeleter> dom(raw);
    char* js = nullptr;
    check(umlab_domains_to_json(dom.get(), &js), "domains");
    text = take_string(js);
  } else {
    umlab_growth* raw = nullptr;
    check(umlab_growth_prepare(sym.get(), cfg.shrink, &raw), "domains");
    std::unique_ptr<umlab_growth, GrowthDeleter> g(raw);
    char* js = nullptr;
    check(umlab_growth_setup_json(g.get(), &js), "domains");
    text = take_string(js);
  }
  emit(cfg, text + "\n", "wrote " + cfg.out + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unimodular Fourier multiplier laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", umlab_version());

  Config cfg;
  std::vector<Bindings> all;
  all.reserve(8);
  const Bindings* active = nullptr;
  std::function<int()> run;

  auto common = [&](CLI::App* sub, Bindings& b) {
    b.add(sub, "--symbol", "symbol", cfg.symbol, "catalog id (riesz:k, riesz:-k, constant[:c], quadratic:a1,..) or a .json file");
    b.add(sub, "--d", "d", cfg.d, "dimension");
    b.add(sub, "--threads", "threads", cfg.threads, "worker threads (0: all cores)");
    sub->add_option("--out", cfg.out, "output path (stdout when omitted)");
    sub->add_option("--config", cfg.config, "JSON file with option defaults; flags win");
  };
  auto schedule_opts = [&](CLI::App* sub, Bindings& b) {
    b.add(sub, "--t-min", "t_min", cfg.t_min, "first t of the geometric schedule");
    b.add(sub, "--t-max", "t_max", cfg.t_max, "last t of the geometric schedule");
    b.add(sub, "--count", "count", cfg.count, "number of t values");
  };

  auto* symbol = app.add_subcommand("symbol", "symbol analysis");
  symbol->require_subcommand(1);
  auto* inspect = symbol->add_subcommand("inspect", "critical points on the sphere, Morse verdict, spherical means");
  all.emplace_back();
  common(inspect, all.back());
  inspect->add_option("--starts", cfg.starts, "Newton starts (default 16 d)");
  inspect->callback([&, b = &all.back()] {
    active = b; run = [&] { return cmd_symbol_inspect(cfg); }; });

  auto* statphase = app.add_subcommand(
      "statphase",
      "stationary-phase decay check. CSV columns: t,direct_re,direct_im,approx_re,approx_im,abs_err. "
      "Exits 0 iff the fitted slope of log abs_err is at most -(d/2+1)+0.3");
  all.emplace_back();
  {
    Bindings& b = all.back();
    cfg.tol = 1e-10;
    b.add(statphase, "--fixture", "fixture", cfg.fixture, "quadratic1d, quadratic2d, saddle2d, vanishing1d, vanishing2d");
    b.add(statphase, "--tol", "tol", cfg.tol, "quadrature tolerance");
    b.add(statphase, "--t-min", "t_min", cfg.t_min, "first t");
    b.add(statphase, "--t-max", "t_max", cfg.t_max, "last t");
    b.add(statphase, "--count", "count", cfg.count, "number of t values");
    statphase->add_option("--out", cfg.out, "CSV path (stdout when omitted); a .json summary is written next to it");
    statphase->add_option("--config", cfg.config, "JSON file with option defaults; flags win");
  }
  statphase->preparse_callback([&](std::size_t) {
    cfg.t_min = 50;
    cfg.t_max = 400;
    cfg.count = 4;
    cfg.tol = 1e-10;
  });
  statphase->callback([&, b = &all[1]] {
    active = b; run = [&] { return cmd_statphase(cfg); }; });

  auto* growth = app.add_subcommand(
      "growth",
      "lower-bound growth sweep. CSV columns: t,p,surrogate,n_samples,quad_tol,integral,std_error,hits,quad_failures; "
      "--out x.csv also writes x.json (fit summary) and x.dat (gnuplot columns t surrogate)");
  all.emplace_back();
  {
    Bindings& b = all.back();
    common(growth, b);
    schedule_opts(growth, b);
    b.add(growth, "--p", "p", cfg.p, "Lebesgue exponent (p > 2 is measured through p')");
    b.add(growth, "--tol", "tol", cfg.tol, "quadrature tolerance per sample");
    b.add(growth, "--samples", "samples", cfg.samples, "quasi-random samples of U");
    b.add(growth, "--seed", "seed", cfg.seed, "sample shift seed (0: plain Halton)");
    b.add(growth, "--shrink", "shrink", cfg.shrink, "scale factor in (0, 1] for the certified box U");
  }
  growth->preparse_callback([&](std::size_t) { cfg.tol = 1e-7; });
  growth->callback([&, b = &all[2]] {
    active = b; run = [&] { return cmd_growth(cfg); }; });

  auto* critical = app.add_subcommand("critical", "critical points of the modified phase");
  critical->require_subcommand(1);
  auto* solve = critical->add_subcommand("solve", "Newton solve of grad Phi_x = 0 on the chart phase");
  all.emplace_back();
  {
    Bindings& b = all.back();
    common(solve, b);
    solve->add_option("--x", cfg.x, "spatial point, comma separated")->delimiter(',')->required();
    solve->add_option("--xi-init", cfg.xi_init, "initial frequency (default e_d)")->delimiter(',');
    b.add(solve, "--tol", "tol", cfg.tol, "residual tolerance");
  }
  solve->preparse_callback([&](std::size_t) { cfg.tol = 1e-12; });
  solve->callback([&, b = &all[3]] {
    active = b; run = [&] { return cmd_critical_solve(cfg); }; });

  auto* domains = app.add_subcommand("domains", "witness domains");
  domains->require_subcommand(1);
  auto* build = domains->add_subcommand("build", "certify the witness box U and radius eps");
  all.emplace_back();
  {
    Bindings& b = all.back();
    common(build, b);
    b.add(build, "--shrink", "shrink", cfg.shrink, "scale factor in (0, 1]");
    build->add_flag("--no-rotate", cfg.no_rotate, "use the chart at e_d as given instead of the growth pole");
    build->add_option("--seed-offset", cfg.seed_offset, "witness seed (with --no-rotate)")->delimiter(',');
  }
  build->callback([&, b = &all[4]] {
    active = b; run = [&] { return cmd_domains_build(cfg); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (active) active->apply(cfg.config);
    return run ? run() : kUsage;
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
}
