#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace umlab {

// Largest ambient dimension handled anywhere in the library. Vectors and
// matrices are dynamically sized up to this bound but never touch the heap,
// which keeps the quadrature inner loops allocation free.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using Complex = std::complex<double>;

inline Vec to_vec(std::span<const double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

/// The first d-1 coordinates of a d-vector.
inline Vec head_minus(const Vec& v) { return v.head(v.size() - 1); }

/// (u, last) as a d-vector.
inline Vec append(const Vec& u, double last) {
  Vec out(u.size() + 1);
  out.head(u.size()) = u;
  out(u.size()) = last;
  return out;
}

/// <t> = (1 + t^2)^{1/2}
inline double japanese_bracket(double t) { return std::sqrt(1.0 + t * t); }

}  // namespace umlab
