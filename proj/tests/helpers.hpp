#pragma once

// Shared builders for the test suites: seeded random sphere points,
// tangent vectors and curves.

#include "motionsphere/sphere.hpp"
#include "motionsphere/srvf.hpp"

#include <cmath>

namespace mstest {

using namespace motionsphere;

inline RowMat random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  RowMat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

inline SrvfPoint random_point(Rng& rng, Eigen::Index t = 8, Eigen::Index n = 3) {
  return SrvfPoint::normalized(random_matrix(rng, t, n));
}

/// Random tangent at mu with the requested quadrature norm.
inline TangentVector random_tangent(Rng& rng, const SrvfPoint& mu, double norm) {
  RowMat w = random_matrix(rng, mu.time_samples(), mu.dim());
  w -= l2_inner(w, mu.samples()) * mu.samples();
  const double wn = l2_norm(w);
  return TangentVector(RowMat(w * (norm / wn)), mu);
}

/// Constant-in-time unit basis function along coordinate axis `axis`
/// (quadrature norm 1 by construction).
inline SrvfPoint axis_point(Eigen::Index t, Eigen::Index n, Eigen::Index axis) {
  RowMat m = RowMat::Zero(t, n);
  m.col(axis).setOnes();
  return SrvfPoint(std::move(m));
}

/// Smooth multi-harmonic curve used by the SRVF roundtrip oracles.
inline Curve sinusoid_curve(Eigen::Index t, Eigen::Index n, double amplitude = 100.0) {
  RowMat m(t, n);
  for (Eigen::Index i = 0; i < t; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(t - 1);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double p = static_cast<double>(j);
      m(i, j) = amplitude * (std::sin(2.0 * M_PI * (u + 0.1 * p)) + 0.3 * u * (p + 1.0));
    }
  }
  return Curve{std::move(m)};
}

inline double max_abs_diff(const RowMat& a, const RowMat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace mstest
