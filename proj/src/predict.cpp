#include "motionsphere/gan.hpp"

#include <cmath>

namespace motionsphere::gan {

namespace {

// Generator output for one flattened prior tangent row: projected tangent
// plus the decoded scale according to the policy.
struct RawPrediction {
  Eigen::RowVectorXd tangent;
  double scale = 0.0;
};

RawPrediction run_generator(const Checkpoint& ckpt, const Eigen::RowVectorXd& prior_tangent,
                            double prior_scale) {
  const TangentLayout lay = ckpt.layout();
  const Eigen::RowVectorXd mu_flat = flatten(ckpt.mu);
  const RowMat raw = ckpt.generator.forward(RowMat(prior_tangent));

  RawPrediction out;
  out.tangent = project_tangent_flat(raw.row(0).head(lay.dim()), mu_flat, lay);
  switch (ckpt.config.scale_policy) {
    case ScalePolicy::kPriorRatio:
      out.scale = prior_scale * ckpt.scale_ratio_mean;
      break;
    case ScalePolicy::kTrainMean:
      out.scale = ckpt.scale_future_mean;
      break;
    case ScalePolicy::kRegressed:
      out.scale = std::exp(raw(0, lay.dim())) * ckpt.scale_future_mean;
      break;
  }
  return out;
}

}  // namespace

TangentVector generator_forward(const Checkpoint& ckpt, const TangentVector& prior_tangent) {
  if (prior_tangent.samples().rows() != ckpt.mu.rows() ||
      prior_tangent.samples().cols() != ckpt.mu.cols())
    throw DimensionError("generator_forward: tangent grid differs from the checkpoint");
  const RawPrediction rp =
      run_generator(ckpt, flatten(prior_tangent.samples()), ckpt.scale_future_mean);
  return TangentVector(unflatten(rp.tangent, ckpt.layout()), SrvfPoint(ckpt.mu));
}

double discriminator_forward(const Checkpoint& ckpt, const TangentVector& x) {
  if (x.samples().rows() != ckpt.mu.rows() || x.samples().cols() != ckpt.mu.cols())
    throw DimensionError("discriminator_forward: tangent grid differs from the checkpoint");
  return critic_value(ckpt.critic, x);
}

PoseSequence predict_normalized(const Checkpoint& ckpt, const PoseSequence& prior_norm,
                                Eigen::Index horizon) {
  prior_norm.validate();
  if (prior_norm.joints != ckpt.joints)
    throw DimensionError("predict: prior has " + std::to_string(prior_norm.joints) +
                         " joints, checkpoint expects " + std::to_string(ckpt.joints));
  if (prior_norm.frames() != ckpt.prior_len)
    throw DimensionError("predict: prior has " + std::to_string(prior_norm.frames()) +
                         " frames, checkpoint expects " + std::to_string(ckpt.prior_len));
  if (horizon < 2) throw DimensionError("predict: horizon must be >= 2");

  const SrvfPoint mu{ckpt.mu};
  const ScaledSrvf prior_srvf = srvf_encode(sequence_to_curve(prior_norm), AnchorRule::kLastSample);
  const Eigen::RowVectorXd prior_tangent = flatten(log_map(mu, prior_srvf.point).samples());

  const RawPrediction rp = run_generator(ckpt, prior_tangent, prior_srvf.scale);
  const TangentLayout lay = ckpt.layout();
  const SrvfPoint predicted = exp_map(mu, TangentVector(unflatten(rp.tangent, lay), mu));

  // Decode from the last prior pose: the seam frame is the anchor, bitwise.
  const Curve decoded = srvf_decode(ScaledSrvf(predicted, rp.scale, prior_srvf.anchor), horizon);
  return curve_to_sequence(decoded, prior_norm.joints, prior_norm.fps);
}

PoseSequence predict(const Checkpoint& ckpt, const PoseSequence& prior_mm, Eigen::Index horizon) {
  const PoseSequence prior_norm = apply_normalization(prior_mm, ckpt.normalization);
  PoseSequence out = invert_normalization(predict_normalized(ckpt, prior_norm, horizon),
                                          ckpt.normalization);
  // Normalization drops the per-frame root translation, so the decoded
  // sequence lives at the mean root position. Re-attach the prior's frame
  // of reference: translate so the seam frame coincides with the raw last
  // prior pose, then write that frame through so the equality is bitwise.
  const Eigen::RowVectorXd last_prior = prior_mm.flat.row(prior_mm.frames() - 1);
  Eigen::RowVectorXd shift(out.flat.cols());
  const Eigen::RowVectorXd seam = out.flat.row(0);
  for (int j = 0; j < out.joints; ++j)
    shift.segment(3 * j, 3) =
        last_prior.segment(3 * ckpt.normalization.root, 3) - seam.segment(3 * ckpt.normalization.root, 3);
  out.flat.rowwise() += shift;
  out.flat.row(0) = last_prior;
  out.fps = prior_mm.fps;
  return out;
}

PoseSequence recursive_predict(const Checkpoint& ckpt, const PoseSequence& prior_mm,
                               int repetitions, Eigen::Index horizon) {
  if (repetitions < 1) throw DimensionError("recursive_predict: repetitions must be >= 1");
  const Eigen::Index h = horizon > 0 ? horizon : ckpt.future_len;
  if (ckpt.prior_len > h)
    throw DimensionError(
        "recursive_predict: horizon shorter than the prior window, cannot reseed");

  PoseSequence out;
  out.joints = prior_mm.joints;
  out.fps = prior_mm.fps;
  out.flat.resize(static_cast<Eigen::Index>(repetitions) * h, prior_mm.flat.cols());

  PoseSequence seed = prior_mm;
  for (int r = 0; r < repetitions; ++r) {
    const PoseSequence seg = predict(ckpt, seed, h);
    out.flat.middleRows(static_cast<Eigen::Index>(r) * h, h) = seg.flat;
    seed.flat = seg.flat.bottomRows(ckpt.prior_len);
    seed.joints = seg.joints;
    seed.fps = seg.fps;
  }
  return out;
}

}  // namespace motionsphere::gan
