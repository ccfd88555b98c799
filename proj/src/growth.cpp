#include "umlab/growth.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "umlab/errors.hpp"

namespace umlab {

namespace {

struct Candidate {
  WitnessDomains domains;
  double score;
};

Vec circle_point(double theta) {
  Vec w(2);
  w << std::cos(theta), std::sin(theta);
  return w;
}

Vec pole_2d(const Symbol& sym) {
  constexpr int kSamples = 3600;
  constexpr double kH = 1e-5;
  auto tangential = [&](double theta) {
    return (sym.eval_unit(circle_point(theta + kH)) - sym.eval_unit(circle_point(theta - kH))) / (2.0 * kH);
  };
  double best = 0.0, best_theta = 0.0;
  for (int k = 0; k < kSamples; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / kSamples;
    const double v = std::abs(tangential(theta));
    if (v > best) {
      best = v;
      best_theta = theta;
    }
  }
  if (!(best > 1e-8)) throw HypothesisError("symbol is constant on the circle; the growth theorem needs a nonconstant symbol");
  Vec e2 = Vec::Zero(2);
  e2(1) = 1.0;
  if (std::abs(tangential(0.5 * std::numbers::pi)) >= 0.999 * best) return e2;
  return circle_point(best_theta);
}

}  // namespace

GrowthSetup prepare_growth(const Symbol& sym, const GrowthOptions& opts) {
  const int d = sym.dimension();
  if (d < 2 || d > 3) throw InvalidArgument("growth experiments support d = 2 and d = 3");
  if (!(opts.shrink > 0.0 && opts.shrink <= 1.0)) throw InvalidArgument("shrink must lie in (0, 1]");

  Symbol base = sym;
  bool negated = false;
  Vec pole;
  if (d == 2) {
    pole = pole_2d(sym);
  } else {
    const int starts = opts.sphere_starts > 0 ? opts.sphere_starts : 16 * d;
    const auto search = sphere_critical_points(sym, starts);
    const SphereCriticalPoint* best_min = nullptr;
    const SphereCriticalPoint* best_max = nullptr;
    for (const auto& p : search.points) {
      if (p.kind == CriticalKind::Minimum && (!best_min || p.value < best_min->value)) best_min = &p;
      if (p.kind == CriticalKind::Maximum && (!best_max || p.value > best_max->value)) best_max = &p;
    }
    if (best_min) {
      pole = best_min->location;
    } else if (best_max) {
      pole = best_max->location;
      base = sym.negated();
      negated = true;
    } else {
      throw HypothesisError(
          "no nondegenerate local minimum or maximum found on the sphere; the growth theorem does not apply");
    }
  }

  const Symbol working = rotate_to_pole(base, pole);
  const ChartPhase chart = chart_phase(working);

  std::vector<Vec> seeds;
  if (opts.seed_offset.size() > 0) {
    seeds.push_back(opts.seed_offset);
  } else if (d == 2) {
    seeds.push_back(Vec::Constant(1, 0.1));
  } else {
    for (double s : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}) {
      Vec v = Vec::Zero(d - 1);
      v(0) = s;
      seeds.push_back(v);
    }
  }

  std::optional<Candidate> best;
  std::string last_error = "no seed produced a certified domain";
  for (const Vec& seed : seeds) {
    try {
      const Witness w = witness_point(chart, seed);
      WitnessDomains dom = build_domains(chart, w, opts.shrink);
      // Oscillation count t |x0_-| eps governs the onset of the stationary regime.
      const double score = dom.eps * w.x0.head(d - 1).norm();
      if (!best || score > best->score) best = Candidate{std::move(dom), score};
    } catch (const HypothesisError&) {
      throw;
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  if (!best) throw DegenerateError(last_error);

  BumpAmplitude bump(best->domains.frequency_center(), best->domains.eps);
  return GrowthSetup{sym, working, pole, negated, chart, std::move(best->domains), std::move(bump)};
}

std::string growth_setup_json(const GrowthSetup& s) {
  auto arr = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json j;
  j["schema_version"] = 1;
  j["symbol"] = s.original.name();
  j["d"] = s.original.dimension();
  j["pole"] = arr(s.pole);
  j["negated"] = s.negated;
  j["domains"] = nlohmann::json::parse(s.domains.to_json());
  j["bump"] = {{"center", arr(s.bump.center())}, {"eps", s.bump.eps()}};
  return j.dump(2);
}

}  // namespace umlab
