#pragma once

// Square-root velocity transform between pose sequences, curves in R^n and
// scale-normalized sphere points.
//
// Encoding divides the curve derivative by the square root of its speed and
// normalizes the result onto the unit hypersphere; the pre-normalization
// norm ("scale") and the integration constant ("anchor") are kept alongside
// the point so decoding restores true units. Derivative and integral use a
// matched second-order pair: central differences and the cumulative
// trapezoid rule.

#include "motionsphere/common.hpp"
#include "motionsphere/sphere.hpp"

namespace motionsphere {

/// Time-ordered skeleton frames: flat row t is the pose at frame t in
/// joint-major order (x_1, y_1, z_1, ..., x_k, y_k, z_k), millimeters.
struct PoseSequence {
  RowMat flat;   // T x 3k
  int joints = 0;
  double fps = 0.0;

  Eigen::Index frames() const { return flat.rows(); }
  /// k x 3 view of frame t (no copy).
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>> pose(
      Eigen::Index t) const {
    return {flat.row(t).data(), joints, 3};
  }
  void validate() const;
};

/// A curve alpha : [0,1] -> R^n on a uniform grid.
struct Curve {
  RowMat samples;  // T x n
};

/// Unit-sphere SRVF plus the data needed to undo the normalization.
struct ScaledSrvf {
  SrvfPoint point;
  double scale;           // pre-normalization quadrature norm of q
  Eigen::RowVectorXd anchor;  // alpha(0) used by decode

  ScaledSrvf(SrvfPoint p, double scale, Eigen::RowVectorXd anchor);

  // Validity floor on the stored scale; anything smaller is treated as a
  // degenerate (constant) curve.
  static constexpr double kMinScale = 1e-200;
};

enum class AnchorRule {
  kFirstSample,  // alpha(0) = first curve sample (ground-truth futures)
  kLastSample,   // alpha(0) = last curve sample (prior sequences)
};

Curve sequence_to_curve(const PoseSequence& seq);
PoseSequence curve_to_sequence(const Curve& curve, int joints, double fps);

/// Central differences inside, one-sided second-order stencils at the ends,
/// scaled by 1/dt. Exact for polynomials of degree <= 2. Requires T >= 3.
RowMat curve_derivative(const Curve& curve);

/// Linear interpolation onto a uniform grid of t_out samples; endpoint rows
/// are copied bitwise.
Curve resample_curve(const Curve& curve, Eigen::Index t_out);

/// SRVF of a curve: q = alpha_dot / sqrt(|alpha_dot|) pointwise (zero rows
/// where the speed is below 1e-12), normalized onto the sphere. Throws
/// DegenerateInputError when the curve is constant (scale would be zero).
ScaledSrvf srvf_encode(const Curve& curve, AnchorRule rule = AnchorRule::kFirstSample);
ScaledSrvf srvf_encode(const Curve& curve, Eigen::RowVectorXd anchor);

/// Integral of |q| q from the anchor, resampled to t_out rows. The first
/// output row equals the anchor bitwise.
Curve srvf_decode(const ScaledSrvf& s, Eigen::Index t_out);

namespace detail {
/// Decode from raw (not necessarily unit-norm) q samples; used by the
/// scaled decode and directly testable on the zero-integrand edge case.
Curve decode_q_samples(const RowMat& q, const Eigen::RowVectorXd& anchor, Eigen::Index t_out);

/// Cumulative trapezoid along rows with uniform spacing dt; row 0 is zero.
RowMat cumtrapz(const RowMat& rows, double dt);
}  // namespace detail

}  // namespace motionsphere
