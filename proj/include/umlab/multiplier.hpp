#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "umlab/oscillatory.hpp"
#include "umlab/phase_geometry.hpp"
#include "umlab/symbols.hpp"
#include "umlab/types.hpp"

namespace umlab {

/// chi(r) = s(2 - 2r) / (s(2 - 2r) + s(2r - 1)), s(r) = exp(-1/r) for r > 0:
/// equal to 1 on [0, 1/2] and 0 on [1, inf).
double bump_profile(double r);

/// f_hat(xi) = chi(|xi - center| / eps): 1 on the inner ball B(center, eps/2),
/// supported in the outer ball B(center, eps).
class BumpAmplitude {
 public:
  BumpAmplitude(Vec center, double eps);

  int dimension() const { return static_cast<int>(center_.size()); }
  const Vec& center() const { return center_; }
  double eps() const { return eps_; }
  double operator()(const Vec& xi) const;
  Box support_box() const;
  AmplitudeFn as_amplitude() const;

 private:
  Vec center_;
  double eps_;
};

/// F(xi) = f_hat(Lambda(xi)) xi_d^{d-1}, supported in the Lambda-preimage of
/// the outer ball (boxed). Requires the outer ball inside Lambda(R^{d-1} x (1/4, 4)).
class TransformedAmplitude {
 public:
  explicit TransformedAmplitude(BumpAmplitude bump);

  const BumpAmplitude& bump() const { return bump_; }
  double operator()(const Vec& xi) const;
  Box support_box() const;
  AmplitudeFn as_amplitude() const;

 private:
  BumpAmplitude bump_;
};

/// T^t f(t x) through the transformed representation: the oscillatory integral
/// of exp(i t Phi_x) F over the support of F, with phi the chart phase of sym.
OscIntegralResult apply_pointwise(const Symbol& sym, const BumpAmplitude& bump, double t,
                                  const Vec& x, double tol, const OscOptions& opts = {});

/// The phase Phi_x as an oscillatory-integral phase.
PhaseFn modified_phase_fn(const ChartPhase& phi, const Vec& x);

// ---------------------------------------------------------------------------
// Grids

/// Centered uniform grid: along axis k the samples sit at (j - N_k/2) h_k,
/// h_k = extent_k / N_k, j = 0..N_k-1; row-major with the last axis fastest.
struct GridField {
  std::vector<double> extents;
  std::vector<int> counts;
  std::vector<Complex> samples;

  GridField() = default;
  GridField(std::vector<double> extents, std::vector<int> counts);

  int dims() const { return static_cast<int>(counts.size()); }
  std::size_t size() const;
  double spacing(int k) const { return extents[static_cast<std::size_t>(k)] / counts[static_cast<std::size_t>(k)]; }
  double cell_volume() const;
  Vec coordinate(std::size_t flat) const;
};

/// Samples of bump on a frequency grid.
GridField sample_frequency(const BumpAmplitude& bump, std::vector<double> extents,
                           std::vector<int> counts);

/// Spatial samples of T^t f from frequency samples of f_hat, with
///   f(x) = sum_xi exp(i xi . x) f_hat(xi) dxi^d
/// (the convention in which f_hat carries the (2 pi)^{-d}); the zero mode
/// uses Phi(0) := 0. The spatial grid has extent 2 pi N_k / extent_k.
/// Counts must be powers of two; throws InvalidArgument on dimension mismatch.
GridField apply_grid(const Symbol& sym, const GridField& f_hat, double t);

/// (sum |f|^2 cell)^{1/2}
double discrete_l2(const GridField& field);
/// (sum |f|^p cell)^{1/p}
double discrete_lp(const GridField& field, double p);

/// Separable 4-point Lagrange interpolation (exact at grid nodes). Throws
/// DomainError outside the interpolable interior.
Complex interpolate(const GridField& field, const Vec& y);

void write_grid(const GridField& field, const std::string& path);
GridField read_grid(const std::string& path);
std::string grid_sidecar_json(const GridField& field, const std::string& data_file);

/// |f|_{L^p} of the spatial bump, from an inverse DFT of f_hat on a grid with
/// `points` samples per axis (0 picks a size from the dimension).
double bump_lp_norm(const BumpAmplitude& bump, double p, int points = 0);

// ---------------------------------------------------------------------------
// Lower bound

/// Halton points in [0, 1)^dim starting at index 1; a nonzero seed applies a
/// Cranley-Patterson rotation drawn from mt19937_64(seed).
std::vector<Vec> halton_points(int dim, int n, std::uint64_t seed);

/// Fixed quasi-random sample of the box U with its U1 hits.
struct U1Sample {
  int n_samples = 0;
  double box_volume = 0.0;
  std::vector<Vec> hits;
};
U1Sample sample_u1(const ChartPhase& phi, const WitnessDomains& domains, int n_samples,
                   std::uint64_t seed, int threads = 0);

struct LowerBoundOptions {
  int n_samples = 64;
  std::uint64_t seed = 0;
  double quad_tol = 1e-7;
  int threads = 0;  // 0: hardware concurrency
  OscOptions osc;
};

struct LowerBoundEstimate {
  double t = 0.0;
  double p = 0.0;
  double surrogate = 0.0;  // t^{d/p} (int_{U1} |T^t f(t x)|^p dx)^{1/p}
  double integral = 0.0;   // int_{U1} |T^t f(t x)|^p dx
  double std_error = 0.0;  // sampling error of `integral`
  int n_samples = 0;
  int hits = 0;
  int quad_failures = 0;   // samples that hit the node budget (best estimate used)
};

/// Throws InvalidArgument unless p in (1, 2], t > 0, n_samples >= 32;
/// DomainError for an empty U1 sample; BudgetError when more than 10% of
/// the samples exhaust the quadrature budget.
LowerBoundEstimate lower_bound_norm(const Symbol& sym, const WitnessDomains& domains,
                                    const BumpAmplitude& bump, double t, double p,
                                    const LowerBoundOptions& opts = {});

/// Same estimate on a precomputed U1 sample (shared across a t sweep).
LowerBoundEstimate lower_bound_norm(const Symbol& sym, const U1Sample& sample,
                                    const BumpAmplitude& bump, double t, double p,
                                    const LowerBoundOptions& opts = {});

}  // namespace umlab
