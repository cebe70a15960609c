#pragma once

// Differentiable building blocks of the training objective, plus plain
// evaluators for the reported loss values.
//
// Tangent vectors are handled in flattened form: one sample is a row of
// length T*n (row-major flatten of the T x n grid), so a batch is a K x T*n
// matrix and the dense layers apply directly. The quadrature inner product
// becomes a weighted row sum with the trapezoid weights repeated across the
// n coordinates of each grid row.

#include "motionsphere/autodiff.hpp"
#include "motionsphere/common.hpp"
#include "motionsphere/nets.hpp"
#include "motionsphere/skeleton.hpp"
#include "motionsphere/sphere.hpp"

namespace motionsphere::gan {

/// Grid geometry of the flattened tangent rows.
struct TangentLayout {
  Eigen::Index t = 0;  // time samples
  Eigen::Index n = 0;  // coordinate dimension
  Eigen::Index dim() const { return t * n; }

  /// Trapezoid quadrature weights as a flat row (weight of grid row t
  /// repeated over its n coordinates).
  Eigen::RowVectorXd quad_weights() const;
};

/// Flattens a T x n sample matrix to a 1 x T*n row.
Eigen::RowVectorXd flatten(const RowMat& m);
/// Inverse of flatten.
RowMat unflatten(const Eigen::RowVectorXd& row, const TangentLayout& lay);

// ---- tape builders (batch rows) -------------------------------------------

/// Per-row quadrature inner product with a fixed row: K x D -> K x 1.
int quad_dot_rows(ad::Graph& g, int x, const Eigen::RowVectorXd& fixed, const TangentLayout& lay);

/// Removes each row's component along mu: out_i = x_i - <x_i, mu> mu.
int project_tangent_rows(ad::Graph& g, int x, const Eigen::RowVectorXd& mu_flat,
                         const TangentLayout& lay);

/// Sphere exponential applied per row: cos(|s|) mu + sinc(|s|) s with the
/// quadrature norm (epsilon-shifted under the sqrt so the map stays smooth
/// at |s| = 0).
int exp_map_rows(ad::Graph& g, int s, const Eigen::RowVectorXd& mu_flat, const TangentLayout& lay);

/// SRVF decode of one flattened sample row into a T x n frame matrix:
/// cumulative trapezoid of |q| q from the anchor, q = scale * point row.
int decode_frames(ad::Graph& g, int point_row, double scale, const Eigen::RowVectorXd& anchor,
                  const TangentLayout& lay);

/// Sum over frames of the Gram distance between predicted frames (node) and
/// ground-truth frames (constant), divided by the frame count.
int gram_frame_loss(ad::Graph& g, int frames, const RowMat& truth_frames, int joints);

/// Mean absolute bone-length deviation between predicted and truth frames.
int bone_frame_loss(ad::Graph& g, int frames, const RowMat& truth_frames,
                    const SkeletonTopology& topo);

// ---- numeric (non-tape) counterparts ---------------------------------------

/// Quadrature inner product of two flattened sample rows.
double quad_inner_flat(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b,
                       const TangentLayout& lay);

/// Numeric tangent projection of one flattened row.
Eigen::RowVectorXd project_tangent_flat(const Eigen::RowVectorXd& x,
                                        const Eigen::RowVectorXd& mu_flat,
                                        const TangentLayout& lay);

// ---- reported loss values (non-differentiable evaluators) ------------------

/// Critic forward on a single tangent vector (flattened internally).
double critic_value(const Mlp& critic, const TangentVector& x);

/// Literal adversarial loss of one (real, predicted, interpolate) triple:
/// D(log_mu real) - D(log_mu predicted) + lambda (|grad D(interp)| - 1)^2.
double adversarial_loss(const Mlp& critic, const SrvfPoint& real_future,
                        const SrvfPoint& predicted, const TangentVector& interp_sample,
                        double lambda, const SrvfPoint& mu);

/// L1 distance in the tangent space between the prediction (already tangent
/// at mu) and log_mu of the truth.
double reconstruction_loss(const TangentVector& predicted_tangent, const SrvfPoint& truth,
                           const SrvfPoint& mu);

/// Euclidean norm of the critic's input gradient at x (flattened), via the
/// tape. Exposed for the penalty-term tests.
double critic_input_gradient_norm(const Mlp& critic, const RowMat& x);

}  // namespace motionsphere::gan
