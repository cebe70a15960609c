#pragma once

// Riemannian operations on the unit hypersphere of discretized trajectories.
//
// A point is a T x n matrix sampling a function q : [0,1] -> R^n on a
// uniform grid, with unit norm under the trapezoidal L2 inner product.
// Exponential and logarithm maps follow the closed-form great-circle
// expressions; the Karcher mean is the classic iterative tangent-averaging
// scheme with step size epsilon.

#include "motionsphere/common.hpp"

#include <optional>

namespace motionsphere {

/// Trapezoidal-rule inner product of two T x n sample matrices over [0,1].
double l2_inner(const RowMat& a, const RowMat& b);

/// Quadrature norm sqrt(l2_inner(a, a)).
double l2_norm(const RowMat& a);

/// A discretized trajectory function of unit quadrature norm: one point of
/// the hypersphere. Validated on construction.
class SrvfPoint {
 public:
  explicit SrvfPoint(RowMat samples);

  /// Normalizes an arbitrary nonzero sample matrix onto the sphere.
  static SrvfPoint normalized(const RowMat& samples);

  const RowMat& samples() const { return samples_; }
  Eigen::Index time_samples() const { return samples_.rows(); }
  Eigen::Index dim() const { return samples_.cols(); }
  double dt() const { return 1.0 / static_cast<double>(samples_.rows() - 1); }

  static constexpr double kUnitNormTol = 1e-9;

 private:
  RowMat samples_;
};

/// Element of the tangent space at a reference point: same grid, orthogonal
/// to the base under the quadrature inner product.
class TangentVector {
 public:
  TangentVector(RowMat samples, SrvfPoint base);

  const RowMat& samples() const { return samples_; }
  const SrvfPoint& base() const { return base_; }
  double norm() const { return l2_norm(samples_); }

  static constexpr double kTangencyTol = 1e-8;

 private:
  RowMat samples_;
  SrvfPoint base_;
};

/// arccos of the clamped inner product; range [0, pi].
double geodesic_distance(const SrvfPoint& q1, const SrvfPoint& q2);

/// exp_mu(s) = cos(|s|) mu + sin(|s|) s/|s|. Returns mu exactly when
/// |s| < 1e-12.
SrvfPoint exp_map(const SrvfPoint& mu, const TangentVector& s);

/// log_mu(q) = d/sin(d) (q - cos(d) mu) with d = geodesic distance.
/// Throws DomainError when q is within 1e-6 of the antipode of mu.
TangentVector log_map(const SrvfPoint& mu, const SrvfPoint& q);

/// Great-circle interpolation; a=0 and a=1 reproduce the endpoints exactly.
SrvfPoint geodesic_interpolate(const SrvfPoint& q1, const SrvfPoint& q2, double a);

struct KarcherConfig {
  double epsilon = 0.9;     // step size along the mean tangent direction
  double threshold = 1e-9;  // convergence tolerance on |v_bar|
  int max_iters = 1000;
};

struct KarcherResult {
  SrvfPoint mean;
  int iterations;        // number of tangent-average evaluations
  double final_step_norm;  // |v_bar| at the returned mean
};

/// Iterative Karcher mean. The initial estimate is the first input point
/// unless an explicit one is supplied. Throws ConvergenceError when the
/// tolerance is not reached within max_iters, DomainError on an antipodal
/// encounter.
KarcherResult karcher_mean(const std::vector<SrvfPoint>& points, const KarcherConfig& cfg,
                           const std::optional<SrvfPoint>& initial = std::nullopt);

namespace detail {
constexpr double kZeroNormGuard = 1e-12;
constexpr double kAntipodeGuard = 1e-6;

/// Trapezoid weight for grid row t of T (dt * 1/2 at the ends, dt inside).
inline double trapezoid_weight(Eigen::Index t, Eigen::Index rows) {
  const double dt = 1.0 / static_cast<double>(rows - 1);
  return (t == 0 || t == rows - 1) ? 0.5 * dt : dt;
}

/// Raw log-map formula on sample matrices; callers guard the domain.
RowMat log_map_samples(const RowMat& mu, const RowMat& q, double distance);
}  // namespace detail

}  // namespace motionsphere
