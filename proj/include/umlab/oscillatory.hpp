#pragma once

#include <functional>
#include <string>
#include <vector>

#include "umlab/types.hpp"

namespace umlab {

/// Real phase on R^n. The gradient is used to size panels and the Hessian by
/// the stationary-phase term; both are optional (finite differences otherwise).
struct PhaseFn {
  int dim = 1;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;
};

struct Box {
  Vec lower;
  Vec upper;
  bool contains(const Vec& x) const;
};

/// Smooth compactly supported amplitude; zero outside `support`.
struct AmplitudeFn {
  int dim = 1;
  std::function<Complex(const Vec&)> eval;
  Box support;

  Complex operator()(const Vec& xi) const { return support.contains(xi) ? eval(xi) : Complex{}; }
};

struct OscIntegralResult {
  Complex value;
  double error = 0.0;  // |I(2P) - I(P)| between the last two levels
  long nodes = 0;      // nodes of the accepted level
  int depth = 0;       // number of panel doublings after the initial level
};

struct OscOptions {
  double kappa = 4.0;     // nodes per oscillation (2 pi of phase) on the first level
  int gauss_order = 8;    // nodes per panel
  int min_panels = 8;
  long max_nodes = 1L << 26;
};

/// int exp(i t phase(xi)) amp(xi) dxi over amp's support box (1 <= dim <= 3),
/// by tensor-product Gauss-Legendre panels. The initial panel count per axis
/// resolves kappa nodes per oscillation of t * G * L (G an estimate of
/// max |grad phase| over the box, L the edge); panels are doubled until two
/// successive levels agree to tol. Throws BudgetError past max_nodes.
OscIntegralResult oscillatory_integral(const PhaseFn& phase, const AmplitudeFn& amp, double t,
                                       double tol, const OscOptions& opts = {});

/// Number of positive minus number of negative eigenvalues of a symmetric
/// matrix, counted against tol * (1 + |H|). Throws DegenerateError when an
/// eigenvalue falls below the threshold.
int signature(const Mat& h, double tol = 1e-10);

/// Leading stationary-phase term
///   psi(xi*) (2 pi)^{d/2} exp(i pi sgn/4) |det H|^{-1/2} exp(i t phase(xi*)) t^{-d/2}.
Complex stationary_phase_approx(const PhaseFn& phase, const AmplitudeFn& amp, const Vec& xi_star,
                                double t);

struct DecayRow {
  double t;
  Complex direct;
  Complex approx;
  double abs_err;
};

struct DecayReport {
  int dim = 0;
  std::vector<DecayRow> rows;
  double slope = 0.0;
  double bound = 0.0;  // -(d/2 + 1) + 0.3
  bool pass = false;
  std::string to_csv() const;
};

/// Fits log |direct - approx| against log t; passes when the slope is at most
/// -(d/2 + 1) + 0.3.
DecayReport decay_check(const PhaseFn& phase, const AmplitudeFn& amp, const Vec& xi_star,
                        const std::vector<double>& t_list, double tol = 1e-10,
                        const OscOptions& opts = {});

/// psi(xi) = e * exp(-1 / (1 - |xi|^2)) on the unit ball: psi(0) = 1,
/// Laplacian psi(0) = -2 d.
AmplitudeFn standard_bump(int dim);

enum class DecayFixture { Quadratic1d, Quadratic2d, Saddle2d, Vanishing1d, Vanishing2d };

struct DecayFixtureData {
  std::string name;
  PhaseFn phase;
  AmplitudeFn amp;
  Vec xi_star;
};

/// Quadratic phases |xi|^2/2 (or (xi1^2 - xi2^2)/2 for the saddle) with the
/// standard bump; the vanishing variants multiply the bump by |xi|^2.
DecayFixtureData decay_fixture(DecayFixture kind);
DecayFixture decay_fixture_from_name(const std::string& name);

}  // namespace umlab
