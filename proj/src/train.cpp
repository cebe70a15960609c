#include "motionsphere/gan.hpp"

#include <cmath>

namespace motionsphere::gan {

MuSource mu_source_from_string(const std::string& s) {
  if (s == "priors") return MuSource::kPriors;
  if (s == "futures") return MuSource::kFutures;
  if (s == "union") return MuSource::kUnion;
  throw ParseError("unknown mu_source '" + s + "' (expected priors, futures or union)");
}

ScalePolicy scale_policy_from_string(const std::string& s) {
  if (s == "prior_ratio") return ScalePolicy::kPriorRatio;
  if (s == "train_mean") return ScalePolicy::kTrainMean;
  if (s == "regressed") return ScalePolicy::kRegressed;
  throw ParseError("unknown scale_policy '" + s +
                   "' (expected prior_ratio, train_mean or regressed)");
}

std::string to_string(MuSource m) {
  switch (m) {
    case MuSource::kPriors: return "priors";
    case MuSource::kFutures: return "futures";
    case MuSource::kUnion: return "union";
  }
  return "?";
}

std::string to_string(ScalePolicy p) {
  switch (p) {
    case ScalePolicy::kPriorRatio: return "prior_ratio";
    case ScalePolicy::kTrainMean: return "train_mean";
    case ScalePolicy::kRegressed: return "regressed";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (lr < 0.0) throw DomainError("TrainConfig: lr must be nonnegative");
  if (batch < 1) throw DomainError("TrainConfig: batch must be >= 1");
  if (epochs < 1) throw DomainError("TrainConfig: epochs must be >= 1");
  if (beta1 < 0 || beta2 < 0 || beta3 < 0 || beta4 < 0)
    throw DomainError("TrainConfig: loss weights must be nonnegative");
  if (lambda < 0) throw DomainError("TrainConfig: lambda must be nonnegative");
  if (gen_hidden.empty() || critic_hidden.empty())
    throw DomainError("TrainConfig: hidden layer lists must be nonempty");
}

TrainConfig TrainConfig::fullscale_preset() {
  TrainConfig cfg;
  cfg.gen_hidden = {512, 256, 128, 64};
  cfg.critic_hidden = {64, 32, 16, 1024};
  cfg.batch = 64;
  cfg.epochs = 500;
  cfg.lr = 1e-4;
  return cfg;
}

MuInfo compute_mu(const MotionDataset& ds, MuSource source, const KarcherConfig& karcher) {
  if (ds.samples.empty()) throw DimensionError("compute_mu: dataset is empty");
  std::vector<SrvfPoint> points;
  points.reserve(ds.samples.size() * (source == MuSource::kUnion ? 2 : 1));
  for (const auto& [prior, future] : ds.samples) {
    if (source == MuSource::kPriors || source == MuSource::kUnion)
      points.push_back(srvf_encode(sequence_to_curve(prior), AnchorRule::kLastSample).point);
    if (source == MuSource::kFutures || source == MuSource::kUnion)
      points.push_back(srvf_encode(sequence_to_curve(future), AnchorRule::kFirstSample).point);
  }
  KarcherResult res = karcher_mean(points, karcher);
  return MuInfo{std::move(res.mean), res.iterations, res.final_step_norm};
}

std::vector<EncodedSample> encode_pairs(const MotionDataset& ds, const SrvfPoint& mu) {
  std::vector<EncodedSample> out;
  out.reserve(ds.samples.size());
  for (const auto& [prior, future] : ds.samples) {
    if (prior.frames() != future.frames())
      throw DimensionError(
          "encode_pairs: prior and future lengths must match to share one reference point");
    const ScaledSrvf qp = srvf_encode(sequence_to_curve(prior), AnchorRule::kLastSample);
    const ScaledSrvf qf = srvf_encode(sequence_to_curve(future), AnchorRule::kFirstSample);
    if (qp.point.time_samples() != mu.time_samples() || qp.point.dim() != mu.dim())
      throw DimensionError("encode_pairs: sample grid differs from the reference point");
    EncodedSample e;
    e.prior_tangent = flatten(log_map(mu, qp.point).samples());
    e.future_tangent = flatten(log_map(mu, qf.point).samples());
    e.prior_scale = qp.scale;
    e.future_scale = qf.scale;
    e.future_anchor = qf.anchor;
    e.future_frames = future.flat;
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

struct NetShapes {
  std::vector<int> gen_dims;
  std::vector<Activation> gen_acts;
  std::vector<int> critic_dims;
  std::vector<Activation> critic_acts;
};

NetShapes net_shapes(const TrainConfig& cfg, Eigen::Index tangent_dim) {
  NetShapes s;
  const int d = static_cast<int>(tangent_dim);
  s.gen_dims.push_back(d);
  for (int h : cfg.gen_hidden) {
    s.gen_dims.push_back(h);
    s.gen_acts.push_back(Activation::kLeakyRelu02);
  }
  // One extra output unit carries the log-scale head when regressed.
  s.gen_dims.push_back(cfg.scale_policy == ScalePolicy::kRegressed ? d + 1 : d);
  s.gen_acts.push_back(Activation::kLinear);

  s.critic_dims.push_back(d);
  for (int h : cfg.critic_hidden) {
    s.critic_dims.push_back(h);
    s.critic_acts.push_back(Activation::kTanh);
  }
  s.critic_dims.push_back(1);
  s.critic_acts.push_back(Activation::kLinear);
  return s;
}

// Gathers rows `idx[i0..i0+k)` of the flattened per-sample rows.
RowMat gather_rows(const std::vector<EncodedSample>& samples, const std::vector<int>& idx,
                   std::size_t i0, std::size_t k, bool future) {
  RowMat out(static_cast<Eigen::Index>(k), samples.front().prior_tangent.size());
  for (std::size_t i = 0; i < k; ++i) {
    const EncodedSample& e = samples[static_cast<std::size_t>(idx[i0 + i])];
    out.row(static_cast<Eigen::Index>(i)) = future ? e.future_tangent : e.prior_tangent;
  }
  return out;
}

// Splits the generator's raw batched output into the projected tangent rows
// and (when present) the log-scale head column.
struct GenOutput {
  int tangent = -1;  // K x D, projected onto the tangent space at mu
  int scale_head = -1;  // K x 1 or -1
};

GenOutput split_and_project(ad::Graph& g, int raw, const Eigen::RowVectorXd& mu_flat,
                            const TangentLayout& lay, bool regressed) {
  GenOutput out;
  int y = raw;
  if (regressed) {
    const int yt = g.transpose(raw);
    y = g.transpose(g.slice_rows(yt, 0, lay.dim()));
    out.scale_head = g.transpose(g.slice_rows(yt, lay.dim(), lay.dim() + 1));
  }
  out.tangent = project_tangent_rows(g, y, mu_flat, lay);
  return out;
}

// Critic graph value on constant input rows (parameters frozen).
double batch_mean(const RowMat& col) { return col.mean(); }

struct StepValues {
  double d_real = 0.0, d_fake = 0.0, penalty = 0.0;
};

// One critic update; returns the literal Eq-4 style components for logging.
StepValues critic_step(const Mlp& gen, Mlp& critic, Adam& opt,
                       const std::vector<EncodedSample>& samples, const std::vector<int>& order,
                       std::size_t i0, std::size_t k, const Eigen::RowVectorXd& mu_flat,
                       const TangentLayout& lay, const TrainConfig& cfg, Rng& rng) {
  const RowMat priors = gather_rows(samples, order, i0, k, false);
  const RowMat reals = gather_rows(samples, order, i0, k, true);

  // Generated tangents are constants for the critic update.
  RowMat raw = gen.forward(priors);
  RowMat fakes(raw.rows(), lay.dim());
  for (Eigen::Index i = 0; i < raw.rows(); ++i)
    fakes.row(i) =
        project_tangent_flat(raw.row(i).head(lay.dim()), mu_flat, lay);

  RowMat interp(fakes.rows(), fakes.cols());
  for (Eigen::Index i = 0; i < fakes.rows(); ++i) {
    const double a = rng.uniform();
    interp.row(i) = (1.0 - a) * reals.row(i) + a * fakes.row(i);
  }

  ad::Graph g;
  const Mlp::Leaves p = critic.leaves(g);
  const int d_real = critic.build(g, p, g.constant(reals));
  const int d_fake = critic.build(g, p, g.constant(fakes));
  const int x_tilde = g.leaf(interp);
  const int d_tilde = critic.build(g, p, x_tilde);

  // Per-sample input gradients: rows of d sum(D) / d x_tilde.
  const int grad_rows = g.input_gradient(g.sum(d_tilde), x_tilde);
  const int gn = g.sqrt_(g.add(g.rows_sum(g.mul(grad_rows, grad_rows)),
                               g.constant(RowMat::Constant(static_cast<Eigen::Index>(k), 1, 1e-30))));
  const int gdev = g.sub(gn, g.constant(RowMat::Ones(static_cast<Eigen::Index>(k), 1)));
  const int penalty = g.mean(g.mul(gdev, gdev));

  // Critic descends E[D(fake)] - E[D(real)] + lambda * penalty.
  const int loss =
      g.add(g.sub(g.mean(d_fake), g.mean(d_real)), g.scale(penalty, cfg.lambda));

  std::vector<RowMat*> params;
  for (std::size_t l = 0; l < critic.weights.size(); ++l) {
    params.push_back(&critic.weights[l]);
    params.push_back(&critic.biases[l]);
  }
  const std::vector<int> grad_ids = g.gradients(loss, p.all());
  std::vector<RowMat> grads;
  grads.reserve(grad_ids.size());
  for (int id : grad_ids) grads.push_back(g.val(id));
  opt.step(params, grads);

  return StepValues{batch_mean(g.val(d_real)), batch_mean(g.val(d_fake)),
                    g.val(penalty)(0, 0)};
}

struct GenStepValues {
  double adv = 0.0;  // -E[D(fake)]
  double rec = 0.0;
  double integrity = 0.0;
  double bone = 0.0;
};

GenStepValues generator_step(Mlp& gen, const Mlp& critic, Adam& opt,
                             const std::vector<EncodedSample>& samples,
                             const std::vector<int>& order, std::size_t i0, std::size_t k,
                             const Eigen::RowVectorXd& mu_flat, const TangentLayout& lay,
                             const TrainConfig& cfg, const SkeletonTopology& topo,
                             double scale_future_mean) {
  const RowMat priors = gather_rows(samples, order, i0, k, false);
  const RowMat reals = gather_rows(samples, order, i0, k, true);
  const auto kk = static_cast<Eigen::Index>(k);

  ad::Graph g;
  const Mlp::Leaves p = gen.leaves(g);
  const int raw = gen.build(g, p, g.constant(priors));
  const GenOutput go = split_and_project(
      g, raw, mu_flat, lay, cfg.scale_policy == ScalePolicy::kRegressed);

  const int d_fake = critic.build_frozen(g, go.tangent);
  const int adv = g.neg(g.mean(d_fake));
  const int rec = g.scale(g.l1_norm(g.sub(go.tangent, g.constant(reals))), 1.0 / static_cast<double>(k));

  int loss = g.add(g.scale(adv, cfg.beta1), g.scale(rec, cfg.beta2));

  int integrity = -1, bone = -1;
  if (cfg.loss_ls || cfg.loss_lb) {
    const int on_sphere = exp_map_rows(g, go.tangent, mu_flat, lay);
    for (std::size_t i = 0; i < k; ++i) {
      const EncodedSample& e = samples[static_cast<std::size_t>(order[i0 + i])];
      const int row = g.slice_rows(on_sphere, static_cast<Eigen::Index>(i),
                                   static_cast<Eigen::Index>(i) + 1);
      // Decode with the ground-truth scale and anchor so a perfect tangent
      // prediction reproduces the truth frames exactly.
      const int frames = decode_frames(g, row, e.future_scale, e.future_anchor, lay);
      if (cfg.loss_ls) {
        const int ls = gram_frame_loss(g, frames, e.future_frames, topo.joints);
        integrity = integrity < 0 ? ls : g.add(integrity, ls);
      }
      if (cfg.loss_lb) {
        const int lb = bone_frame_loss(g, frames, e.future_frames, topo);
        bone = bone < 0 ? lb : g.add(bone, lb);
      }
    }
    if (integrity >= 0) {
      integrity = g.scale(integrity, 1.0 / static_cast<double>(k));
      loss = g.add(loss, g.scale(integrity, cfg.beta3));
    }
    if (bone >= 0) {
      bone = g.scale(bone, 1.0 / static_cast<double>(k));
      loss = g.add(loss, g.scale(bone, cfg.beta4));
    }
  }

  if (go.scale_head >= 0) {
    // Log-space regression of the future scale against the truth.
    RowMat target(kk, 1);
    for (std::size_t i = 0; i < k; ++i)
      target(static_cast<Eigen::Index>(i), 0) =
          std::log(samples[static_cast<std::size_t>(order[i0 + i])].future_scale /
                   scale_future_mean);
    const int dev = g.sub(go.scale_head, g.constant(target));
    loss = g.add(loss, g.mean(g.mul(dev, dev)));
  }

  std::vector<RowMat*> params;
  for (std::size_t l = 0; l < gen.weights.size(); ++l) {
    params.push_back(&gen.weights[l]);
    params.push_back(&gen.biases[l]);
  }
  const std::vector<int> grad_ids = g.gradients(loss, p.all());
  std::vector<RowMat> grads;
  grads.reserve(grad_ids.size());
  for (int id : grad_ids) grads.push_back(g.val(id));
  opt.step(params, grads);

  GenStepValues v;
  v.adv = g.val(adv)(0, 0);
  v.rec = g.val(rec)(0, 0);
  v.integrity = integrity >= 0 ? g.val(integrity)(0, 0) : 0.0;
  v.bone = bone >= 0 ? g.val(bone)(0, 0) : 0.0;
  return v;
}

double validation_mpjpe(const Checkpoint& ckpt, const MotionDataset& val) {
  if (val.samples.empty()) return std::numeric_limits<double>::quiet_NaN();
  const Eigen::Index h = val.future_len();
  double acc = 0.0;
  for (const auto& [prior, future] : val.samples) {
    const PoseSequence pred = predict_normalized(ckpt, prior, h);
    PoseSequence truth;
    truth.joints = prior.joints;
    truth.fps = prior.fps;
    truth.flat.resize(h, prior.flat.cols());
    truth.flat.row(0) = prior.flat.row(prior.frames() - 1);
    truth.flat.bottomRows(h - 1) = future.flat.topRows(h - 1);
    acc += mpjpe(invert_normalization(pred, ckpt.normalization),
                 invert_normalization(truth, ckpt.normalization), h);
  }
  return acc / static_cast<double>(val.samples.size());
}

}  // namespace

LossBreakdown global_loss(const Mlp& generator, const Mlp& critic,
                          const std::vector<EncodedSample>& batch, const RowMat& mu,
                          const TrainConfig& cfg, const SkeletonTopology& topo, Rng& rng) {
  if (batch.empty()) throw DimensionError("global_loss: empty batch");
  const TangentLayout lay{mu.rows(), mu.cols()};
  const Eigen::RowVectorXd mu_flat = flatten(mu);
  const auto k = static_cast<Eigen::Index>(batch.size());

  RowMat priors(k, lay.dim()), reals(k, lay.dim());
  for (Eigen::Index i = 0; i < k; ++i) {
    priors.row(i) = batch[static_cast<std::size_t>(i)].prior_tangent;
    reals.row(i) = batch[static_cast<std::size_t>(i)].future_tangent;
  }

  const RowMat raw = generator.forward(priors);
  RowMat fakes(k, lay.dim());
  for (Eigen::Index i = 0; i < k; ++i)
    fakes.row(i) = project_tangent_flat(raw.row(i).head(lay.dim()), mu_flat, lay);

  // Literal adversarial value: E[D(real)] - E[D(fake)] + lambda penalty.
  LossBreakdown out;
  const RowMat d_real = critic.forward(reals);
  const RowMat d_fake = critic.forward(fakes);
  double pen = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double a = rng.uniform();
    const RowMat x = (1.0 - a) * reals.row(i) + a * fakes.row(i);
    const double gn = critic_input_gradient_norm(critic, x);
    pen += (gn - 1.0) * (gn - 1.0);
  }
  pen /= static_cast<double>(k);
  out.adversarial = d_real.mean() - d_fake.mean() + cfg.lambda * pen;

  double rec = 0.0, ls = 0.0, lb = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const EncodedSample& e = batch[static_cast<std::size_t>(i)];
    rec += (fakes.row(i) - e.future_tangent).cwiseAbs().sum();
    if (cfg.loss_ls || cfg.loss_lb) {
      // Numeric decode of the predicted point with truth scale and anchor.
      const RowMat tan = unflatten(fakes.row(i), lay);
      const SrvfPoint mu_point{mu};
      const SrvfPoint pred = exp_map(mu_point, TangentVector(tan, mu_point));
      const Curve decoded = detail::decode_q_samples(e.future_scale * pred.samples(),
                                                     e.future_anchor, lay.t);
      std::vector<PoseSequence> ps{curve_to_sequence(decoded, topo.joints, 25.0)};
      std::vector<PoseSequence> ts{
          curve_to_sequence(Curve{e.future_frames}, topo.joints, 25.0)};
      if (cfg.loss_ls) ls += skeleton_integrity_loss(ps, ts);
      if (cfg.loss_lb) lb += bone_length_loss(ps, ts, topo);
    }
  }
  out.reconstruction = rec / static_cast<double>(k);
  out.integrity = cfg.loss_ls ? ls / static_cast<double>(k) : 0.0;
  out.bone = cfg.loss_lb ? lb / static_cast<double>(k) : 0.0;
  out.total = cfg.beta1 * out.adversarial + cfg.beta2 * out.reconstruction +
              cfg.beta3 * out.integrity + cfg.beta4 * out.bone;
  return out;
}

TrainResult train(const MotionDataset& train_ds, const TrainConfig& cfg,
                  const MotionDataset* validation) {
  cfg.validate();
  if (train_ds.samples.empty()) throw DimensionError("train: empty dataset");
  if (train_ds.prior_len() != train_ds.future_len())
    throw DimensionError("train: prior and future lengths must match to share one tangent space");

  const MuInfo mu_info = compute_mu(train_ds, cfg.mu_source, cfg.karcher);
  const std::vector<EncodedSample> samples = encode_pairs(train_ds, mu_info.point);
  const RowMat mu = mu_info.point.samples();
  const TangentLayout lay{mu.rows(), mu.cols()};
  const Eigen::RowVectorXd mu_flat = flatten(mu);

  double ratio_acc = 0.0, future_acc = 0.0;
  for (const EncodedSample& e : samples) {
    ratio_acc += e.future_scale / e.prior_scale;
    future_acc += e.future_scale;
  }
  const double scale_ratio_mean = ratio_acc / static_cast<double>(samples.size());
  const double scale_future_mean = future_acc / static_cast<double>(samples.size());

  const NetShapes shapes = net_shapes(cfg, lay.dim());
  Rng init_rng(cfg.seed);
  Mlp gen = Mlp::create(shapes.gen_dims, shapes.gen_acts, init_rng);
  Mlp critic = Mlp::create(shapes.critic_dims, shapes.critic_acts, init_rng);
  Adam opt_g(cfg.lr, cfg.adam_b1, cfg.adam_b2, cfg.adam_eps);
  Adam opt_d(cfg.lr, cfg.adam_b1, cfg.adam_b2, cfg.adam_eps);

  const int n = static_cast<int>(samples.size());
  const std::size_t k = static_cast<std::size_t>(std::min(cfg.batch, n));
  const int iters = std::max(1, n / static_cast<int>(k));

  TrainResult result{Checkpoint{}, {}, mu_info.iterations, mu_info.residual};
  Rng train_rng(cfg.seed ^ 0x7261696eULL);

  Checkpoint probe;  // reused for per-epoch validation
  probe.config = cfg;
  probe.mu = mu;
  probe.normalization = train_ds.normalization;
  probe.joints = train_ds.topology.joints;
  probe.prior_len = train_ds.prior_len();
  probe.future_len = train_ds.future_len();
  probe.fps = train_ds.fps;
  probe.scale_ratio_mean = scale_ratio_mean;
  probe.scale_future_mean = scale_future_mean;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const std::vector<int> order_d = train_rng.permutation(n);
    const std::vector<int> order_g = train_rng.permutation(n);

    double la_acc = 0.0, rec_acc = 0.0, ls_acc = 0.0, lb_acc = 0.0;
    for (int it = 0; it < iters; ++it) {
      const std::size_t i0 = static_cast<std::size_t>(it) * k;
      const StepValues dv =
          critic_step(gen, critic, opt_d, samples, order_d, i0, k, mu_flat, lay, cfg, train_rng);
      const GenStepValues gv = generator_step(gen, critic, opt_g, samples, order_g, i0, k,
                                              mu_flat, lay, cfg, train_ds.topology,
                                              scale_future_mean);
      la_acc += dv.d_real - dv.d_fake + cfg.lambda * dv.penalty;
      rec_acc += gv.rec;
      ls_acc += gv.integrity;
      lb_acc += gv.bone;
    }

    EpochLog log;
    log.epoch = epoch;
    log.losses.adversarial = la_acc / iters;
    log.losses.reconstruction = rec_acc / iters;
    log.losses.integrity = ls_acc / iters;
    log.losses.bone = lb_acc / iters;
    log.losses.total = cfg.beta1 * log.losses.adversarial + cfg.beta2 * log.losses.reconstruction +
                       cfg.beta3 * log.losses.integrity + cfg.beta4 * log.losses.bone;
    if (!std::isfinite(log.losses.total))
      throw TrainingDivergedError(
          "train: non-finite loss at epoch " + std::to_string(epoch), epoch);

    if (validation) {
      probe.generator = gen;
      probe.critic = critic;
      log.val_mpjpe = validation_mpjpe(probe, *validation);
    }
    result.log.push_back(log);
  }

  probe.generator = std::move(gen);
  probe.critic = std::move(critic);
  result.checkpoint = std::move(probe);
  return result;
}

}  // namespace motionsphere::gan
