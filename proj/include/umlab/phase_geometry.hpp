#pragma once

#include <optional>
#include <string>

#include "umlab/symbols.hpp"
#include "umlab/types.hpp"

namespace umlab {

/// Phi_x(xi) = phi(xi_-) + xi_d (<xi_-, x_-> + x_d), the phase of the
/// transformed integral representation at the spatial point x.
class ModifiedPhase {
 public:
  ModifiedPhase(ChartPhase phi, Vec x);

  int dimension() const { return static_cast<int>(x_.size()); }
  const Vec& x() const { return x_; }
  const ChartPhase& chart() const { return phi_; }

  double value(const Vec& xi) const;
  Vec gradient(const Vec& xi) const;
  Mat hessian(const Vec& xi) const;

 private:
  ChartPhase phi_;
  Vec x_;
};

/// F(xi, x) = grad_xi Phi_x(xi) = [grad phi(xi_-) + xi_d x_-, <xi_-, x_-> + x_d].
Vec grad_F(const ChartPhase& phi, const Vec& xi, const Vec& x);

/// grad_xi F = [[H phi(xi_-), x_-], [x_-^T, 0]]; exact block assembly.
Mat jacobian_F(const ChartPhase& phi, const Vec& xi, const Vec& x);

/// Block-elimination determinant of [[H, x_-], [x_-^T, 0]]:
///   det = -<H^{-1} x_-, x_-> det H.
/// Throws DegenerateError when H is numerically singular (condition > 1e12);
/// callers then fall back to a direct determinant of jacobian_F.
double schur_det(const Mat& h_phi, const Vec& x_minus);

struct CriticalPointResult {
  Vec xi;           // the stationary point g(x)
  Mat hessian;      // H_xi Phi_x at xi
  double det = 0.0;
  int signature = 0;
  int iterations = 0;
  double residual = 0.0;  // |F(xi, x)|
  bool in_band = false;   // xi_d in (1/4, 4)
};

/// Damped Newton on F(., x) with backtracking (factor 1/2, accept on residual
/// decrease). Singular Jacobians fall back to a least-squares step with the
/// damping halved. Throws DomainError when x_- = 0, NonConvergenceError past
/// max_iter or when the damping underflows, DegenerateError if the converged
/// Hessian is singular.
CriticalPointResult solve_critical(const ChartPhase& phi, const Vec& x, const Vec& xi_init,
                                   double tol = 1e-12, int max_iter = 100);

/// g(x1, x2) = (-x2/x1, -phi'(-x2/x1)/x1), the explicit stationary point in d = 2.
Vec critical_closed_form_2d(const ChartPhase& phi, const Vec& x);

/// The unique x with F(xi, x) = 0: x_- = -grad phi(xi_-)/xi_d, x_d = -<xi_-, x_->.
Vec inverse_critical_map(const ChartPhase& phi, const Vec& xi);

/// Jacobian of x -> g(x) from the implicit function theorem:
///   Dg = -(grad_xi F)^{-1} grad_x F.
Mat critical_map_jacobian(const ChartPhase& phi, const Vec& xi, const Vec& x);

/// Lambda(xi) = xi_d (xi_-, 1); requires xi_d > 0.
Vec lambda_map(const Vec& xi);
/// Lambda^{-1}(eta) = (eta_- / eta_d, eta_d); requires eta_d > 0.
Vec lambda_inv(const Vec& eta);

enum class WitnessBranch {
  DefiniteHessian,  // H phi(0) definite: invert grad phi near the pole
  NonzeroSlope2d,   // d = 2 and phi'(0) != 0: explicit g
};
const char* to_string(WitnessBranch b);

struct Witness {
  Vec xi0;  // frequency witness, xi0_d = 1
  Vec x0;   // spatial witness, F(xi0, x0) = 0 and x0_- != 0
  WitnessBranch branch = WitnessBranch::DefiniteHessian;
  double slope = 0.0;  // c = phi'(0) (2-d branch)
  double delta = 0.0;  // phi' stays in (c/2, 2c) on (-delta, delta) (2-d branch)
};

/// Construct (xi0, x0). With d = 2 and phi'(0) != 0 the explicit branch is
/// used (xi0 = (0, 1), x0 = (-c, 0)); otherwise H phi(0) must be definite and
/// xi0 = (seed, 1), x0 = (-grad phi(seed), <seed, grad phi(seed)>). A seed with
/// vanishing gradient is retried rotated and rescaled before giving up.
Witness witness_point(const ChartPhase& phi, const Vec& seed_offset);
Witness witness_point(const ChartPhase& phi);

/// Largest delta (up to `cap`) with phi' in the open interval between c/2 and
/// 2c on (-delta, delta): outward scan refined by bisection.
double slope_band_halfwidth(const ChartPhase& phi, double cap = 4.0);

/// Certified concrete versions of the existential sets in the critical-point
/// lemma: the spatial box U around x0, the frequency radius eps, and the
/// membership test for U1 = {x in U : |Lambda(g(x)) - Lambda(xi0)| < eps/2}.
struct WitnessDomains {
  Witness witness;
  double eps = 0.0;
  Vec u_lower;
  Vec u_upper;
  double shrink = 1.0;

  int dimension() const { return static_cast<int>(witness.x0.size()); }
  Vec frequency_center() const { return lambda_map(witness.xi0); }
  bool in_box(const Vec& x) const;
  double box_volume() const;

  std::string to_json() const;
  static WitnessDomains from_json(const std::string& text);
};

/// Bisection/dyadic certification of U and eps (see WitnessDomains).
/// Throws DegenerateError when no box can be certified.
WitnessDomains build_domains(const ChartPhase& phi, const Witness& witness, double shrink = 1.0);

/// g(x) for x in U, by Newton from the linear prediction around the witness,
/// with straight-line continuation from x0 as a fallback. std::nullopt when
/// neither converges to a regular point inside the band.
std::optional<CriticalPointResult> solve_in_domain(const ChartPhase& phi,
                                                   const WitnessDomains& domains, const Vec& x);

/// x in U1, i.e. x in U and |Lambda(g(x)) - Lambda(xi0)| < eps/2.
bool in_u1(const ChartPhase& phi, const WitnessDomains& domains, const Vec& x);

}  // namespace umlab
