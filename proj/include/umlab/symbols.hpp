#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "umlab/types.hpp"

namespace umlab {

/// A degree-0 homogeneous real symbol on R^d \ {0}.
///
/// The symbol is determined by its restriction to the unit sphere; every
/// evaluation normalizes its argument first. Analytic ambient derivatives are
/// optional: when absent, chart phases fall back to finite differences.
/// Instances are immutable and cheap to copy (shared state).
class Symbol {
 public:
  using SphereFn = std::function<double(const Vec& unit)>;
  using GradientFn = std::function<Vec(const Vec& xi)>;
  using HessianFn = std::function<Mat(const Vec& xi)>;

  /// Evaluator-only symbol; derivatives come from finite differences.
  Symbol(int dimension, std::string name, SphereFn on_sphere);
  /// Symbol with analytic ambient gradient and Hessian of the homogeneous extension.
  Symbol(int dimension, std::string name, SphereFn on_sphere, GradientFn gradient,
         HessianFn hessian);

  int dimension() const { return impl_->dim; }
  const std::string& name() const { return impl_->name; }
  bool has_analytic_derivatives() const { return static_cast<bool>(impl_->gradient); }

  /// Phi(xi) = phi(xi/|xi|). Throws DomainError at xi = 0.
  double eval(const Vec& xi) const;
  /// Evaluate at a point already on the unit sphere.
  double eval_unit(const Vec& omega) const { return impl_->on_sphere(omega); }

  /// Ambient gradient / Hessian of the homogeneous extension. Only available
  /// for analytic symbols (std::nullopt otherwise).
  std::optional<Vec> gradient(const Vec& xi) const;
  std::optional<Mat> hessian(const Vec& xi) const;

  /// xi -> Phi(R xi) for orthogonal R.
  Symbol composed_with(const Mat& rotation, std::string name) const;
  /// xi -> -Phi(xi).
  Symbol negated() const;

 private:
  struct Impl {
    int dim;
    std::string name;
    SphereFn on_sphere;
    GradientFn gradient;
    HessianFn hessian;
  };
  std::shared_ptr<const Impl> impl_;
};

/// xi -> xi / |xi|, computed after an exact power-of-two rescaling so that the
/// result is bit-identical for arguments differing by a power-of-two factor.
Vec normalize_direction(const Vec& xi);

// ---------------------------------------------------------------------------
// Catalog

/// One monomial c * omega^powers of a polynomial restricted to the sphere.
struct MonomialTerm {
  double coefficient = 0.0;
  std::vector<int> powers;
};

/// Phi(xi) = sum_i c_i (xi/|xi|)^{alpha_i}. Polynomials restricted to the
/// sphere are exactly the finite spherical-harmonic expansions, so this covers
/// every low-degree harmonic combination. Derivatives are analytic.
Symbol spherical_polynomial(int dimension, std::vector<MonomialTerm> terms, std::string name);

/// sign * xi_k / |xi| (k is 1-based).
Symbol riesz(int dimension, int axis, int sign = +1);
Symbol constant_symbol(int dimension, double value = 0.0);
/// sum_k a_k (xi_k/|xi|)^2; Morse on the sphere when the a_k are distinct.
Symbol quadratic_symbol(std::vector<double> weights);

/// Resolve a catalog id: "riesz:k", "riesz:-k", "constant", "constant:c",
/// "quadratic:a1,...,ad". Throws InvalidArgument for unknown ids.
Symbol symbol_from_id(const std::string& id, int dimension);

/// Parse {"d": 3, "name": "...", "terms": [{"coef": 1.0, "powers": [1,0,0]}, ...]}.
Symbol symbol_from_json(const std::string& json_text);

// ---------------------------------------------------------------------------
// Chart phases

/// A smooth function on R^n with gradient and Hessian; used for the
/// restriction phi(u) = Phi(u, 1) and for any other chart of the sphere.
class ChartPhase {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradientFn = std::function<Vec(const Vec&)>;
  using HessianFn = std::function<Mat(const Vec&)>;

  ChartPhase(int dimension, ValueFn value, GradientFn gradient, HessianFn hessian);
  /// Value-only chart; central differences with step 1e-5 (1 + |u|) for the
  /// gradient and 1e-4 (1 + |u|) for the Hessian.
  static ChartPhase finite_difference(int dimension, ValueFn value);

  int dimension() const { return dim_; }
  bool analytic() const { return analytic_; }
  double value(const Vec& u) const { return value_(u); }
  Vec gradient(const Vec& u) const { return gradient_(u); }
  Mat hessian(const Vec& u) const { return hessian_(u); }

 private:
  int dim_;
  bool analytic_ = true;
  ValueFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
};

Vec fd_gradient(const ChartPhase::ValueFn& f, const Vec& u);
Mat fd_hessian(const ChartPhase::ValueFn& f, const Vec& u);

/// phi(u) = Phi(u, 1): the restriction to the hyperplane <xi, e_d> = 1.
ChartPhase chart_phase(const Symbol& sym);

/// Gnomonic chart of the cap {sign * xi_axis > 0}: u -> Phi(xi) with
/// xi_axis = sign and the remaining coordinates equal to u (axis is 0-based).
/// chart_phase(sym) is cap_chart(sym, d - 1, +1).
ChartPhase cap_chart(const Symbol& sym, int axis, int sign);
Vec cap_embed(const Vec& u, int axis, int sign);

// ---------------------------------------------------------------------------
// Rotation to the pole

/// Orthogonal map sending e_d to p: identity when p = e_d, otherwise the
/// Householder reflection across (e_d - p)^perp.
Mat pole_rotation(const Vec& p);

/// xi -> Phi(R xi) with R e_d = p, so the result takes the value Phi(p) at e_d.
/// Throws DomainError unless |p| = 1 within 1e-10.
Symbol rotate_to_pole(const Symbol& sym, const Vec& p);

// ---------------------------------------------------------------------------
// Morse analysis on S^{d-1}

enum class CriticalKind { Minimum, Maximum, Saddle, Degenerate };
const char* to_string(CriticalKind kind);

struct SphereCriticalPoint {
  Vec location;         // unit vector
  Vec hessian_eigenvalues;  // of the gnomonic chart Hessian, ascending
  CriticalKind kind = CriticalKind::Degenerate;
  double value = 0.0;
  double gradient_norm = 0.0;
};

struct CriticalPointSearch {
  std::vector<SphereCriticalPoint> points;
  int starts = 0;
  int converged_starts = 0;
  /// True when no start converged: "search failed", as opposed to an empty
  /// but successful search.
  bool search_failed = false;

  /// All found points nondegenerate (and at least one found).
  bool morse() const;
};

/// Relative eigenvalue threshold below which a chart Hessian counts as degenerate.
inline constexpr double kDegeneracyThreshold = 1e-6;

/// Multi-start Newton on chart gradients over the atlas of 2d coordinate caps.
/// Starts are the 2d axis points followed by deterministic pseudo-random
/// directions; results within 1e-6 geodesic distance are merged.
CriticalPointSearch sphere_critical_points(const Symbol& sym, int n_starts, double tol = 1e-10);

/// Classify from eigenvalues with the threshold 1e-6 (1 + max |lambda|).
CriticalKind classify_eigenvalues(const Vec& eigenvalues);

// ---------------------------------------------------------------------------
// Spherical mean

struct SphericalMeanResult {
  Complex value;
  double gap = 0.0;  // difference between the last two refinement levels
  long nodes = 0;
};

/// a_Phi^t = (1/|S^{d-1}|) int_{S^{d-1}} exp(i t Phi) d sigma, refined by
/// doubling a product-angle rule until successive levels differ by < tol.
/// Throws BudgetError (carrying the last estimate and gap) past max_nodes.
SphericalMeanResult spherical_mean(const Symbol& sym, double t, double tol = 1e-10,
                                   long max_nodes = 1L << 24);

}  // namespace umlab
