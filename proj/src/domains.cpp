#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "random.hpp"
#include "umlab/errors.hpp"
#include "umlab/phase_geometry.hpp"

namespace umlab {

namespace {

constexpr double kBandLo = 0.25;
constexpr double kBandHi = 4.0;
constexpr double kDetRatio = 1e-2;
constexpr int kSchemaVersion = 1;

bool in_band(double v) { return v > kBandLo && v < kBandHi; }

double solve_tol(const ChartPhase& phi) { return phi.analytic() ? 1e-12 : 1e-8; }

std::vector<Vec> probe_directions(int d) {
  std::vector<Vec> dirs;
  for (int k = 0; k < d; ++k)
    for (int s : {+1, -1}) {
      Vec e = Vec::Zero(d);
      e(k) = s;
      dirs.push_back(e);
    }
  for (int mask = 0; mask < (1 << d); ++mask) {
    Vec v(d);
    for (int k = 0; k < d; ++k) v(k) = (mask >> k) & 1 ? -1.0 : 1.0;
    dirs.push_back(v / v.norm());
  }
  std::mt19937_64 rng(0xd0a1d0a1ULL);
  for (int i = 0; i < 16; ++i) {
    Vec v(d);
    for (int k = 0; k < d; ++k) v(k) = detail::gaussian(rng);
    dirs.push_back(v / v.norm());
  }
  return dirs;
}

// Straight-line continuation in x from the witness, reusing each root as the
// next initial guess.
std::optional<CriticalPointResult> continuation(const ChartPhase& phi, const Witness& w,
                                                const Vec& x, int steps) {
  Vec xi = w.xi0;
  std::optional<CriticalPointResult> r;
  for (int k = 1; k <= steps; ++k) {
    const Vec xk = w.x0 + (static_cast<double>(k) / steps) * (x - w.x0);
    try {
      r = solve_critical(phi, xk, xi, solve_tol(phi), 60);
    } catch (const Error&) {
      return std::nullopt;
    }
    xi = r->xi;
  }
  return r;
}

}  // namespace

bool WitnessDomains::in_box(const Vec& x) const {
  if (x.size() != u_lower.size()) return false;
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (!(x(k) > u_lower(k) && x(k) < u_upper(k))) return false;
  return true;
}

double WitnessDomains::box_volume() const { return (u_upper - u_lower).prod(); }

std::string WitnessDomains::to_json() const {
  auto arr = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["branch"] = to_string(witness.branch);
  j["xi0"] = arr(witness.xi0);
  j["x0"] = arr(witness.x0);
  j["slope"] = witness.slope;
  j["delta"] = witness.delta;
  j["eps"] = eps;
  j["u_lower"] = arr(u_lower);
  j["u_upper"] = arr(u_upper);
  j["shrink"] = shrink;
  return j.dump(2);
}

WitnessDomains WitnessDomains::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("schema_version").get<int>() != kSchemaVersion)
      throw InvalidArgument("domains JSON: unsupported schema_version");
    auto vec = [&](const char* key) { return to_vec(j.at(key).get<std::vector<double>>()); };
    WitnessDomains d;
    const auto branch = j.at("branch").get<std::string>();
    if (branch == "nonzero-slope-2d")
      d.witness.branch = WitnessBranch::NonzeroSlope2d;
    else if (branch == "definite-hessian")
      d.witness.branch = WitnessBranch::DefiniteHessian;
    else
      throw InvalidArgument("domains JSON: unknown branch " + branch);
    d.witness.xi0 = vec("xi0");
    d.witness.x0 = vec("x0");
    d.witness.slope = j.at("slope").get<double>();
    d.witness.delta = j.at("delta").get<double>();
    d.eps = j.at("eps").get<double>();
    d.u_lower = vec("u_lower");
    d.u_upper = vec("u_upper");
    d.shrink = j.at("shrink").get<double>();
    const auto n = d.witness.x0.size();
    if (n < 2 || n > kMaxDim || d.witness.xi0.size() != n || d.u_lower.size() != n ||
        d.u_upper.size() != n || !(d.eps > 0.0))
      throw InvalidArgument("domains JSON: inconsistent sizes or radius");
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("domains JSON: ") + e.what());
  }
}

std::optional<CriticalPointResult> solve_in_domain(const ChartPhase& phi,
                                                   const WitnessDomains& domains, const Vec& x) {
  const Witness& w = domains.witness;
  const Eigen::Index n = x.size() - 1;
  if (x.size() != w.x0.size() || x.head(n).norm() == 0.0) return std::nullopt;
  const Vec center = domains.frequency_center();
  auto accept = [&](const CriticalPointResult& r, double radius) {
    return r.in_band && (lambda_map(r.xi) - center).norm() < radius;
  };
  try {
    const Vec guess = w.xi0 + critical_map_jacobian(phi, w.xi0, w.x0) * (x - w.x0);
    auto r = solve_critical(phi, x, guess, solve_tol(phi), 60);
    if (accept(r, domains.eps)) return r;
  } catch (const Error&) {
  }
  auto r = continuation(phi, w, x, 16);
  if (r && r->in_band) return r;
  return std::nullopt;
}

bool in_u1(const ChartPhase& phi, const WitnessDomains& domains, const Vec& x) {
  if (!domains.in_box(x)) return false;
  const auto r = solve_in_domain(phi, domains, x);
  return r && (lambda_map(r->xi) - domains.frequency_center()).norm() < 0.5 * domains.eps;
}

WitnessDomains build_domains(const ChartPhase& phi, const Witness& witness, double shrink) {
  if (!(shrink > 0.0 && shrink <= 1.0)) throw InvalidArgument("shrink must lie in (0, 1]");
  const int d = phi.dimension() + 1;
  if (witness.xi0.size() != d || witness.x0.size() != d) throw InvalidArgument("witness dimension mismatch");
  if (grad_F(phi, witness.xi0, witness.x0).norm() > 1e-9 * (1.0 + witness.x0.norm()))
    throw InvalidArgument("witness is not a root of grad_F");
  const Eigen::Index n = d - 1;
  if (witness.x0.head(n).norm() == 0.0) throw InvalidArgument("witness has x0_- = 0");
  const bool slope_branch = witness.branch == WitnessBranch::NonzeroSlope2d;
  const double det0 = jacobian_F(phi, witness.xi0, witness.x0).determinant();
  if (!(std::abs(det0) > 0.0)) throw DegenerateError("singular Jacobian at the witness");

  WitnessDomains out;
  out.witness = witness;
  out.shrink = shrink;
  const Vec center = out.frequency_center();
  const auto dirs = probe_directions(d);

  // Membership of xi in the region V where g^{-1} is a regular, consistent
  // parametrization of the stationary points.
  auto v_ok = [&](const Vec& xi) {
    if (!in_band(xi(n))) return false;
    const Vec x = inverse_critical_map(phi, xi);
    if (!(x.head(n).norm() > 0.0) || !x.allFinite()) return false;
    if (slope_branch) return true;
    if (std::abs(jacobian_F(phi, xi, x).determinant()) < kDetRatio * std::abs(det0)) return false;
    const auto r = continuation(phi, witness, x, 8);
    return r && (r->xi - xi).norm() <= 1e-8;
  };

  out.eps = 0.0;
  for (double e = 0.5; e >= 0x1.0p-20; e *= 0.5) {
    bool ok = true;
    for (const Vec& dir : dirs) {
      for (double frac : {0.25, 0.5, 0.75, 0.999}) {
        if (!v_ok(lambda_inv(center + frac * e * dir))) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) {
      out.eps = e;
      break;
    }
  }
  if (out.eps == 0.0) throw DegenerateError("no frequency ball around the witness lies in V");

  // Initial U: bounding box of the inner-ball preimage, enlarged by 1.25.
  Vec h = Vec::Constant(d, 1e-9);
  for (const Vec& dir : dirs) {
    const Vec x = inverse_critical_map(phi, lambda_inv(center + 0.5 * out.eps * dir));
    h = h.cwiseMax(1.25 * (x - witness.x0).cwiseAbs());
  }
  if (slope_branch) {
    h(0) = std::min(h(0), 0.5 * std::abs(witness.slope));
    h(1) = std::min(h(1), 0.5 * std::abs(witness.slope) * witness.delta);
  }

  auto certify = [&](const Vec& half) {
    double m2 = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double m = std::max(0.0, std::abs(witness.x0(k)) - half(k));
      m2 += m * m;
    }
    if (std::sqrt(m2) < 0.25 * witness.x0.head(n).norm()) return false;

    std::vector<Vec> probes{witness.x0};
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vec x = witness.x0;
      for (int k = 0; k < d; ++k) x(k) += ((mask >> k) & 1 ? -1.0 : 1.0) * half(k);
      probes.push_back(x);
    }
    for (int k = 0; k < d; ++k)
      for (int s : {+1, -1}) {
        Vec x = witness.x0;
        x(k) += s * half(k);
        probes.push_back(x);
      }
    for (const Vec& x : probes) {
      const auto r = continuation(phi, witness, x, 16);
      if (!r || !r->in_band) return false;
      if (std::abs(r->det) < kDetRatio * std::abs(det0)) return false;
      if (!((lambda_map(r->xi) - center).norm() < out.eps)) return false;
    }
    return true;
  };

  // Largest certified multiple of a candidate half-width vector.
  auto certified = [&](const Vec& half) -> std::optional<Vec> {
    if (certify(half)) return half;
    double lo = 0.0, hi = 1.0;
    for (int b = 0; b < 30; ++b) {
      const double mid = 0.5 * (lo + hi);
      (certify(mid * half) ? lo : hi) = mid;
    }
    if (lo == 0.0) return std::nullopt;
    return Vec(lo * half);
  };

  std::vector<Vec> candidates{h};
  if (!slope_branch) {
    // Volume-maximizing box for the linearization of Lambda o g at the
    // witness: sum_k |D(Lambda o g) e_k| h_k <= eps gives h_k = eps / (d a_k).
    const Mat dg = critical_map_jacobian(phi, witness.xi0, witness.x0);
    Mat dlam = Mat::Identity(d, d) * witness.xi0(n);
    dlam.col(n).head(n) = witness.xi0.head(n);
    dlam(n, n) = 1.0;
    const Mat a = dlam * dg;
    Vec lin(d);
    for (int k = 0; k < d; ++k) lin(k) = out.eps / (d * std::max(a.col(k).norm(), 1e-300));
    candidates.push_back(lin);
  }
  std::optional<Vec> best;
  for (const Vec& c : candidates) {
    const auto r = certified(c);
    if (r && (!best || r->prod() > best->prod())) best = r;
  }
  if (!best) throw DegenerateError("no spatial box around the witness could be certified");
  h = *best;
  h *= shrink;
  out.u_lower = witness.x0 - h;
  out.u_upper = witness.x0 + h;
  return out;
}

}  // namespace umlab
