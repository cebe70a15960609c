#include "motionsphere/losses.hpp"

namespace motionsphere::gan {

namespace {
// Shift under the square roots that keeps gradients finite when a norm or a
// bone length passes through zero; far below every tolerance in use.
constexpr double kSqrtShift = 1e-30;
}  // namespace

Eigen::RowVectorXd TangentLayout::quad_weights() const {
  Eigen::RowVectorXd w(dim());
  for (Eigen::Index i = 0; i < t; ++i)
    w.segment(i * n, n).setConstant(detail::trapezoid_weight(i, t));
  return w;
}

Eigen::RowVectorXd flatten(const RowMat& m) {
  return Eigen::Map<const Eigen::RowVectorXd>(m.data(), m.size());
}

RowMat unflatten(const Eigen::RowVectorXd& row, const TangentLayout& lay) {
  if (row.size() != lay.dim()) throw DimensionError("unflatten: row length mismatch");
  return Eigen::Map<const RowMat>(row.data(), lay.t, lay.n);
}

int quad_dot_rows(ad::Graph& g, int x, const Eigen::RowVectorXd& fixed,
                  const TangentLayout& lay) {
  const Eigen::Index batch = g.val(x).rows();
  if (g.val(x).cols() != lay.dim()) throw DimensionError("quad_dot_rows: row width mismatch");
  const RowMat weighted_fixed =
      RowMat(lay.quad_weights().cwiseProduct(fixed)).replicate(batch, 1);
  return g.rows_sum(g.mul(x, g.constant(weighted_fixed)));
}

int project_tangent_rows(ad::Graph& g, int x, const Eigen::RowVectorXd& mu_flat,
                         const TangentLayout& lay) {
  const Eigen::Index batch = g.val(x).rows();
  const int dots = quad_dot_rows(g, x, mu_flat, lay);  // K x 1
  const int mu_rows = g.constant(RowMat(mu_flat).replicate(batch, 1));
  return g.sub(x, g.mul(g.repeat_cols(dots, lay.dim()), mu_rows));
}

int exp_map_rows(ad::Graph& g, int s, const Eigen::RowVectorXd& mu_flat,
                 const TangentLayout& lay) {
  const Eigen::Index batch = g.val(s).rows();
  const Eigen::Index d = lay.dim();
  const RowMat wrep = RowMat(lay.quad_weights()).replicate(batch, 1);
  const int nsq = g.rows_sum(g.mul(g.mul(s, g.constant(wrep)), s));  // K x 1
  const int nrm =
      g.sqrt_(g.add(nsq, g.constant(RowMat::Constant(batch, 1, kSqrtShift))));
  const int mu_rows = g.constant(RowMat(mu_flat).replicate(batch, 1));
  const int cos_part = g.mul(g.repeat_cols(g.cos_(nrm), d), mu_rows);
  const int sin_part = g.mul(g.repeat_cols(g.sinc_(nrm), d), s);
  return g.add(cos_part, sin_part);
}

int decode_frames(ad::Graph& g, int point_row, double scale, const Eigen::RowVectorXd& anchor,
                  const TangentLayout& lay) {
  if (g.val(point_row).rows() != 1 || g.val(point_row).cols() != lay.dim())
    throw DimensionError("decode_frames: expects one flattened sample row");
  const Eigen::Index T = lay.t, n = lay.n;
  const int q = g.scale(g.reshape(point_row, T, n), scale);

  const int rn = g.sqrt_(
      g.add(g.rows_sum(g.mul(q, q)), g.constant(RowMat::Constant(T, 1, kSqrtShift))));
  const int integrand = g.mul(g.repeat_cols(rn, n), q);

  // Cumulative trapezoid as a constant lower-triangular operator.
  const double dt = 1.0 / static_cast<double>(T - 1);
  RowMat L = RowMat::Zero(T, T);
  for (Eigen::Index t = 1; t < T; ++t) {
    L(t, 0) = 0.5 * dt;
    for (Eigen::Index r = 1; r < t; ++r) L(t, r) = dt;
    L(t, t) = 0.5 * dt;
  }
  const int alpha = g.matmul(g.constant(L), integrand);
  return g.add(alpha, g.constant(RowMat(anchor).replicate(T, 1)));
}

int gram_frame_loss(ad::Graph& g, int frames, const RowMat& truth_frames, int joints) {
  const Eigen::Index T = g.val(frames).rows();
  if (truth_frames.rows() != T || truth_frames.cols() != g.val(frames).cols())
    throw DimensionError("gram_frame_loss: truth shape mismatch");
  int acc = -1;
  for (Eigen::Index t = 0; t < T; ++t) {
    const int pf = g.reshape(g.slice_rows(frames, t, t + 1), joints, 3);
    const RowMat pt = Eigen::Map<const RowMat>(truth_frames.row(t).data(), joints, 3);
    const int tr_pred = g.sum(g.mul(pf, pf));
    const int tr_truth = g.scalar_constant(pt.squaredNorm());
    const int cross = g.matmul(g.transpose(pf), g.constant(pt));  // 3 x 3
    const int delta = g.sub(g.add(tr_pred, tr_truth), g.scale(g.nuclear3(cross), 2.0));
    acc = acc < 0 ? delta : g.add(acc, delta);
  }
  return g.scale(acc, 1.0 / static_cast<double>(T));
}

int bone_frame_loss(ad::Graph& g, int frames, const RowMat& truth_frames,
                    const SkeletonTopology& topo) {
  const Eigen::Index T = g.val(frames).rows();
  if (truth_frames.rows() != T || truth_frames.cols() != g.val(frames).cols())
    throw DimensionError("bone_frame_loss: truth shape mismatch");
  const auto B = static_cast<Eigen::Index>(topo.bones.size());
  int acc = -1;
  for (Eigen::Index t = 0; t < T; ++t) {
    const int pf = g.reshape(g.slice_rows(frames, t, t + 1), topo.joints, 3);
    const Pose pt = Eigen::Map<const Pose>(truth_frames.row(t).data(), topo.joints, 3);
    const VectorXd truth_len = bone_lengths(pt, topo);
    for (Eigen::Index j = 0; j < B; ++j) {
      const auto [pa, ch] = topo.bones[static_cast<std::size_t>(j)];
      const int diff = g.sub(g.slice_rows(pf, ch, ch + 1), g.slice_rows(pf, pa, pa + 1));
      const int len =
          g.sqrt_(g.add(g.sum(g.mul(diff, diff)), g.scalar_constant(kSqrtShift)));
      const int dev = g.abs_(g.sub(len, g.scalar_constant(truth_len[j])));
      acc = acc < 0 ? dev : g.add(acc, dev);
    }
  }
  return g.scale(acc, 1.0 / static_cast<double>(T * B));
}

double quad_inner_flat(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b,
                       const TangentLayout& lay) {
  if (a.size() != lay.dim() || b.size() != lay.dim())
    throw DimensionError("quad_inner_flat: row length mismatch");
  return lay.quad_weights().cwiseProduct(a).dot(b);
}

Eigen::RowVectorXd project_tangent_flat(const Eigen::RowVectorXd& x,
                                        const Eigen::RowVectorXd& mu_flat,
                                        const TangentLayout& lay) {
  return x - quad_inner_flat(x, mu_flat, lay) * mu_flat;
}

double critic_value(const Mlp& critic, const TangentVector& x) {
  const RowMat out = critic.forward(RowMat(flatten(x.samples())));
  return out(0, 0);
}

double critic_input_gradient_norm(const Mlp& critic, const RowMat& x) {
  ad::Graph g;
  const int in = g.leaf(RowMat(flatten(x)));
  const int out = critic.build_frozen(g, in);
  const int grad = g.input_gradient(out, in);
  return std::sqrt(g.val(grad).squaredNorm());
}

double adversarial_loss(const Mlp& critic, const SrvfPoint& real_future,
                        const SrvfPoint& predicted, const TangentVector& interp_sample,
                        double lambda, const SrvfPoint& mu) {
  const TangentVector real_tan = log_map(mu, real_future);
  const TangentVector pred_tan = log_map(mu, predicted);
  const double d_real = critic_value(critic, real_tan);
  const double d_pred = critic_value(critic, pred_tan);
  const double gn = critic_input_gradient_norm(critic, interp_sample.samples());
  const double pen = (gn - 1.0) * (gn - 1.0);
  return d_real - d_pred + lambda * pen;
}

double reconstruction_loss(const TangentVector& predicted_tangent, const SrvfPoint& truth,
                           const SrvfPoint& mu) {
  const TangentVector truth_tan = log_map(mu, truth);
  if (predicted_tangent.samples().rows() != truth_tan.samples().rows() ||
      predicted_tangent.samples().cols() != truth_tan.samples().cols())
    throw DimensionError("reconstruction_loss: tangent shapes differ");
  return (predicted_tangent.samples() - truth_tan.samples()).cwiseAbs().sum();
}

}  // namespace motionsphere::gan
