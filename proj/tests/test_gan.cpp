#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "motionsphere/gan.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace motionsphere;
using namespace motionsphere::gan;
namespace fs = std::filesystem;

namespace {

MotionDataset toy_dataset(int count, Eigen::Index window, std::uint64_t seed) {
  const auto motions = synthetic_motions(SyntheticKind::kPendulumWalk, count, 2 * window, seed);
  const NormalizationRecord rec = compute_normalization(motions, 0);
  MotionDataset ds;
  ds.topology = chain5_topology();
  ds.fps = 25.0;
  ds.normalization = rec;
  ds.split = Split::kTrain;
  for (const PoseSequence& m : motions) {
    const PoseSequence n = apply_normalization(m, rec);
    PoseSequence prior, future;
    prior.joints = future.joints = n.joints;
    prior.fps = future.fps = n.fps;
    prior.flat = n.flat.topRows(window);
    future.flat = n.flat.bottomRows(window);
    ds.samples.emplace_back(std::move(prior), std::move(future));
  }
  return ds;
}

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.gen_hidden = {16};
  cfg.critic_hidden = {8};
  cfg.batch = 4;
  cfg.epochs = 2;
  cfg.lr = 1e-3;
  cfg.seed = 11;
  return cfg;
}

bool same_mlp(const Mlp& a, const Mlp& b) {
  if (a.weights.size() != b.weights.size()) return false;
  for (std::size_t l = 0; l < a.weights.size(); ++l)
    if (a.weights[l] != b.weights[l] || a.biases[l] != b.biases[l]) return false;
  return true;
}

}  // namespace

TEST_CASE("fixed-seed golden forward values") {
  Rng rng(777);
  const Mlp gen = Mlp::create({12, 8, 12}, {Activation::kLeakyRelu02, Activation::kLinear}, rng);
  const Mlp critic = Mlp::create({12, 6, 1}, {Activation::kTanh, Activation::kLinear}, rng);
  RowMat x(1, 12);
  for (int i = 0; i < 12; ++i) x(0, i) = 0.1 * (i - 5);
  const RowMat gy = gen.forward(x);
  const RowMat cy = critic.forward(x);
  CHECK(gy(0, 0) == 0.064785573438714258);
  CHECK(gy(0, 11) == 0.091463531628648814);
  CHECK(cy(0, 0) == 0.16774231556584185);
}

TEST_CASE("zero-weight generator output and critic identities") {
  const TangentLayout lay{4, 3};
  Rng rng(5);
  const SrvfPoint mu = mstest::random_point(rng, 4, 3);
  const Eigen::RowVectorXd mu_flat = flatten(mu.samples());

  Mlp gen = Mlp::create({12, 6, 12}, {Activation::kLeakyRelu02, Activation::kLinear}, rng);
  for (auto& w : gen.weights) w.setZero();
  const RowMat out = gen.forward(RowMat::Ones(1, 12));
  CHECK(out.cwiseAbs().maxCoeff() == 0.0);
  const Eigen::RowVectorXd proj = project_tangent_flat(out.row(0), mu_flat, lay);
  const SrvfPoint q = exp_map(mu, TangentVector(unflatten(proj, lay), mu));
  CHECK(q.samples() == mu.samples());

  // Zero-weight critic scores zero; a single linear layer is <w, x> + b.
  Mlp critic = Mlp::create({12, 1}, {Activation::kLinear}, rng);
  Mlp zero_critic = critic;
  for (auto& w : zero_critic.weights) w.setZero();
  for (auto& b : zero_critic.biases) b.setZero();
  const TangentVector tv = mstest::random_tangent(rng, mu, 0.7);
  CHECK(critic_value(zero_critic, tv) == 0.0);
  const double expect = flatten(tv.samples()).dot(critic.weights[0].col(0).transpose()) +
                        critic.biases[0](0, 0);
  CHECK(critic_value(critic, tv) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("generator outputs are tangent after projection for random params") {
  Rng rng(7);
  const TangentLayout lay{5, 3};
  const SrvfPoint mu = mstest::random_point(rng, 5, 3);
  const Eigen::RowVectorXd mu_flat = flatten(mu.samples());
  for (int rep = 0; rep < 20; ++rep) {
    Mlp gen = Mlp::create({15, 8, 15}, {Activation::kLeakyRelu02, Activation::kLinear}, rng);
    const RowMat raw = gen.forward(RowMat(mstest::random_matrix(rng, 3, 15)));
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
      const Eigen::RowVectorXd proj = project_tangent_flat(raw.row(i), mu_flat, lay);
      CHECK(std::abs(quad_inner_flat(proj, mu_flat, lay)) < 1e-8);
    }
  }
}

TEST_CASE("adversarial loss closed forms") {
  Rng rng(11);
  const SrvfPoint mu = mstest::random_point(rng, 4, 3);
  SrvfPoint real = mstest::random_point(rng, 4, 3);
  while (geodesic_distance(mu, real) > 2.0) real = mstest::random_point(rng, 4, 3);
  SrvfPoint pred = mstest::random_point(rng, 4, 3);
  while (geodesic_distance(mu, pred) > 2.0) pred = mstest::random_point(rng, 4, 3);
  const TangentVector interp = mstest::random_tangent(rng, mu, 0.5);

  // Zero critic, lambda = 1: 0 - 0 + (0 - 1)^2 = 1.
  Mlp zero = Mlp::create({12, 1}, {Activation::kLinear}, rng);
  zero.weights[0].setZero();
  zero.biases[0].setZero();
  CHECK(adversarial_loss(zero, real, pred, interp, 1.0, mu) == 1.0);

  // Constant critic, lambda = 0: c - c = 0.
  Mlp constant = zero;
  constant.biases[0](0, 0) = 3.75;
  CHECK(adversarial_loss(constant, real, pred, interp, 0.0, mu) == 0.0);

  // Linear critic with unit-norm weights: penalty vanishes, total is
  // <w, log real - log pred>.
  Mlp linear = Mlp::create({12, 1}, {Activation::kLinear}, rng);
  linear.weights[0] /= linear.weights[0].norm();
  linear.biases[0].setZero();
  const double total = adversarial_loss(linear, real, pred, interp, 7.0, mu);
  const Eigen::RowVectorXd diff =
      flatten(log_map(mu, real).samples()) - flatten(log_map(mu, pred).samples());
  CHECK(total == doctest::Approx(diff.dot(linear.weights[0].col(0).transpose())).epsilon(1e-10));
}

TEST_CASE("reconstruction loss examples") {
  Rng rng(13);
  const SrvfPoint mu = mstest::random_point(rng, 4, 3);
  SrvfPoint truth = mstest::random_point(rng, 4, 3);
  while (geodesic_distance(mu, truth) > 2.0) truth = mstest::random_point(rng, 4, 3);

  CHECK(reconstruction_loss(log_map(mu, truth), truth, mu) == 0.0);

  const TangentVector zero(RowMat::Zero(4, 3), mu);
  CHECK(reconstruction_loss(zero, mu, mu) == 0.0);

  // Hand-built case: L1 of the tangent difference.
  const TangentVector pred = mstest::random_tangent(rng, mu, 0.8);
  const double by_hand = (pred.samples() - log_map(mu, truth).samples()).cwiseAbs().sum();
  CHECK(reconstruction_loss(pred, truth, mu) == doctest::Approx(by_hand).epsilon(1e-14));
}

TEST_CASE("differentiable pipeline matches the numeric modules") {
  Rng rng(17);
  const TangentLayout lay{6, 15};
  const SrvfPoint mu = mstest::random_point(rng, 6, 15);
  const Eigen::RowVectorXd mu_flat = flatten(mu.samples());
  const TangentVector tv = mstest::random_tangent(rng, mu, 0.9);
  const Eigen::RowVectorXd tv_flat = flatten(tv.samples());

  ad::Graph g;
  const int s = g.constant(RowMat(tv_flat));

  // exp_map_rows vs sphere exp_map.
  const int on_sphere = exp_map_rows(g, s, mu_flat, lay);
  const SrvfPoint numeric = exp_map(mu, tv);
  const RowMat graph_point = unflatten(g.val(on_sphere).row(0), lay);
  CHECK(mstest::max_abs_diff(graph_point, numeric.samples()) < 1e-12);

  // decode_frames vs srvf decode.
  const double scale = 3.2;
  Eigen::RowVectorXd anchor(15);
  for (int i = 0; i < 15; ++i) anchor[i] = 0.3 * i - 1.0;
  const int frames = decode_frames(g, g.constant(RowMat(flatten(numeric.samples()))),
                                   scale, anchor, lay);
  const Curve direct = detail::decode_q_samples(scale * numeric.samples(), anchor, lay.t);
  const RowMat decoded = g.val(frames);
  CHECK(mstest::max_abs_diff(decoded, direct.samples) < 1e-9);

  // gram/bone frame losses vs the skeleton module.
  const SkeletonTopology chain = chain5_topology();
  const RowMat truth = mstest::random_matrix(rng, 6, 15) * 10.0;
  const int ls = gram_frame_loss(g, frames, truth, 5);
  const int lb = bone_frame_loss(g, frames, truth, chain);
  std::vector<PoseSequence> ps{curve_to_sequence(Curve{decoded}, 5, 25.0)};
  std::vector<PoseSequence> ts{curve_to_sequence(Curve{truth}, 5, 25.0)};
  CHECK(g.val(ls)(0, 0) ==
        doctest::Approx(skeleton_integrity_loss(ps, ts)).epsilon(1e-9));
  CHECK(g.val(lb)(0, 0) == doctest::Approx(bone_length_loss(ps, ts, chain)).epsilon(1e-9));
}

TEST_CASE("global loss examples and breakdown") {
  MotionDataset ds = toy_dataset(6, 8, 3);
  const MuInfo mu = compute_mu(ds, MuSource::kFutures, KarcherConfig{});
  const std::vector<EncodedSample> enc = encode_pairs(ds, mu.point);

  TrainConfig cfg = tiny_config();
  Rng r1(5);
  Rng init(1);
  const auto d = static_cast<int>(enc.front().prior_tangent.size());
  Mlp gen = Mlp::create({d, 8, d}, {Activation::kLeakyRelu02, Activation::kLinear}, init);
  Mlp critic = Mlp::create({d, 8, 1}, {Activation::kTanh, Activation::kLinear}, init);

  // Zero critic, lambda=1: adversarial term is exactly 1.
  Mlp zero_critic = critic;
  for (auto& w : zero_critic.weights) w.setZero();
  for (auto& b : zero_critic.biases) b.setZero();
  cfg.lambda = 1.0;
  const LossBreakdown zb = global_loss(gen, zero_critic, enc, mu.point.samples(), cfg,
                                       ds.topology, r1);
  CHECK(zb.adversarial == 1.0);

  // Breakdown sums to the total with the paper weights.
  cfg.beta1 = 1.0; cfg.beta2 = 1.0; cfg.beta3 = 10.0; cfg.beta4 = 10.0;
  Rng r2(5);
  const LossBreakdown full = global_loss(gen, critic, enc, mu.point.samples(), cfg,
                                         ds.topology, r2);
  const double recon = full.adversarial + full.reconstruction * 1.0 + 10.0 * full.integrity +
                       10.0 * full.bone;
  CHECK(std::abs(full.total - recon) < 1e-12 * std::max(1.0, std::abs(full.total)));
  CHECK(full.integrity > 0.0);
  CHECK(full.bone > 0.0);

  // Disabled toggles contribute exactly zero.
  cfg.loss_ls = false;
  cfg.loss_lb = false;
  Rng r3(5);
  const LossBreakdown ablated = global_loss(gen, critic, enc, mu.point.samples(), cfg,
                                            ds.topology, r3);
  CHECK(ablated.integrity == 0.0);
  CHECK(ablated.bone == 0.0);
  CHECK(ablated.total ==
        doctest::Approx(ablated.adversarial + ablated.reconstruction).epsilon(1e-12));
}

TEST_CASE("generator loss gradients match finite differences end to end") {
  // Small-scale version of the acceptance check: d(total generator
  // objective)/d(theta) through projection, exp map, decode and both pose
  // losses, against central differences.
  MotionDataset ds = toy_dataset(3, 6, 7);
  const MuInfo mu = compute_mu(ds, MuSource::kFutures, KarcherConfig{});
  const std::vector<EncodedSample> enc = encode_pairs(ds, mu.point);
  const TangentLayout lay{mu.point.time_samples(), mu.point.dim()};
  const Eigen::RowVectorXd mu_flat = flatten(mu.point.samples());
  const auto d = static_cast<int>(lay.dim());

  Rng init(3);
  const Mlp gen = Mlp::create({d, 6, d}, {Activation::kTanh, Activation::kLinear}, init);

  auto objective = [&](const Mlp& net) {
    ad::Graph g;
    RowMat priors(static_cast<Eigen::Index>(enc.size()), d);
    for (std::size_t i = 0; i < enc.size(); ++i) priors.row(static_cast<Eigen::Index>(i)) = enc[i].prior_tangent;
    const int raw = net.build_frozen(g, g.constant(priors));
    const int tang = project_tangent_rows(g, raw, mu_flat, lay);
    const int on_sphere = exp_map_rows(g, tang, mu_flat, lay);
    int loss = g.scalar_constant(0.0);
    for (std::size_t i = 0; i < enc.size(); ++i) {
      const int row = g.slice_rows(on_sphere, static_cast<Eigen::Index>(i),
                                   static_cast<Eigen::Index>(i) + 1);
      const int frames = decode_frames(g, row, enc[i].future_scale, enc[i].future_anchor, lay);
      loss = g.add(loss, g.add(gram_frame_loss(g, frames, enc[i].future_frames, 5),
                               bone_frame_loss(g, frames, enc[i].future_frames,
                                               ds.topology)));
      const int trow = g.slice_rows(tang, static_cast<Eigen::Index>(i),
                                    static_cast<Eigen::Index>(i) + 1);
      loss = g.add(loss, g.l1_norm(g.sub(trow, g.constant(RowMat(enc[i].future_tangent)))));
    }
    return g.val(loss)(0, 0);
  };

  // Analytic gradient with parameters as leaves.
  ad::Graph g;
  const Mlp::Leaves p = gen.leaves(g);
  RowMat priors(static_cast<Eigen::Index>(enc.size()), d);
  for (std::size_t i = 0; i < enc.size(); ++i) priors.row(static_cast<Eigen::Index>(i)) = enc[i].prior_tangent;
  const int raw = gen.build(g, p, g.constant(priors));
  const int tang = project_tangent_rows(g, raw, mu_flat, lay);
  const int on_sphere = exp_map_rows(g, tang, mu_flat, lay);
  int loss = g.scalar_constant(0.0);
  for (std::size_t i = 0; i < enc.size(); ++i) {
    const int row = g.slice_rows(on_sphere, static_cast<Eigen::Index>(i),
                                 static_cast<Eigen::Index>(i) + 1);
    const int frames = decode_frames(g, row, enc[i].future_scale, enc[i].future_anchor, lay);
    loss = g.add(loss, g.add(gram_frame_loss(g, frames, enc[i].future_frames, 5),
                             bone_frame_loss(g, frames, enc[i].future_frames, ds.topology)));
    const int trow = g.slice_rows(tang, static_cast<Eigen::Index>(i),
                                  static_cast<Eigen::Index>(i) + 1);
    loss = g.add(loss, g.l1_norm(g.sub(trow, g.constant(RowMat(enc[i].future_tangent)))));
  }
  const std::vector<int> grads = g.gradients(loss, p.all());

  const double h = 1e-6;
  std::size_t slot = 0;
  int checked = 0;
  for (std::size_t layer = 0; layer < gen.weights.size(); ++layer) {
    for (int which = 0; which < 2; ++which) {
      const RowMat analytic = g.val(grads[slot++]);
      const Eigen::Index count = analytic.size();
      // Spot-check a spread of parameters in each tensor.
      for (Eigen::Index e = 0; e < count; e += std::max<Eigen::Index>(1, count / 7)) {
        Mlp plus = gen, minus = gen;
        (which == 0 ? plus.weights[layer] : plus.biases[layer]).data()[e] += h;
        (which == 0 ? minus.weights[layer] : minus.biases[layer]).data()[e] -= h;
        const double fd = (objective(plus) - objective(minus)) / (2.0 * h);
        const double an = analytic.data()[e];
        const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-4});
        CHECK(rel < 1e-4);
        ++checked;
      }
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("training: zero learning rate leaves parameters unchanged") {
  MotionDataset ds = toy_dataset(8, 6, 21);
  TrainConfig cfg = tiny_config();
  cfg.lr = 0.0;
  cfg.epochs = 1;
  const TrainResult r1 = train(ds, cfg);
  cfg.epochs = 3;
  const TrainResult r3 = train(ds, cfg);
  CHECK(same_mlp(r1.checkpoint.generator, r3.checkpoint.generator));
  CHECK(same_mlp(r1.checkpoint.critic, r3.checkpoint.critic));

  cfg.lr = 1e-3;
  const TrainResult moved = train(ds, cfg);
  CHECK(!same_mlp(r1.checkpoint.generator, moved.checkpoint.generator));
}

TEST_CASE("training determinism: identical seeds give identical checkpoints") {
  MotionDataset ds = toy_dataset(8, 6, 23);
  const TrainConfig cfg = tiny_config();
  const TrainResult a = train(ds, cfg);
  const TrainResult b = train(ds, cfg);
  CHECK(same_mlp(a.checkpoint.generator, b.checkpoint.generator));
  CHECK(same_mlp(a.checkpoint.critic, b.checkpoint.critic));
  CHECK(a.checkpoint.mu == b.checkpoint.mu);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i)
    CHECK(a.log[i].losses.total == b.log[i].losses.total);

  TrainConfig other = cfg;
  other.seed = cfg.seed + 1;
  const TrainResult c = train(ds, other);
  CHECK(!same_mlp(a.checkpoint.generator, c.checkpoint.generator));
}

TEST_CASE("training rejects mismatched window lengths and reports karcher info") {
  MotionDataset ds = toy_dataset(4, 6, 29);
  // Make the future windows longer than the priors.
  for (auto& [prior, future] : ds.samples) {
    PoseSequence longer;
    longer.joints = future.joints;
    longer.fps = future.fps;
    longer.flat.resize(future.frames() + 2, future.flat.cols());
    longer.flat.topRows(future.frames()) = future.flat;
    longer.flat.bottomRows(2) = future.flat.bottomRows(2);
    future = longer;
  }
  CHECK_THROWS_AS(train(ds, tiny_config()), DimensionError);

  MotionDataset ok = toy_dataset(4, 6, 29);
  const TrainResult r = train(ok, tiny_config());
  CHECK(r.karcher_iterations >= 1);
  CHECK(r.karcher_residual < KarcherConfig{}.threshold);
}

TEST_CASE("per-epoch validation mpjpe is logged when a validation set is given") {
  MotionDataset tr = toy_dataset(8, 6, 31);
  MotionDataset val = toy_dataset(3, 6, 32);
  val.normalization = tr.normalization;
  TrainConfig cfg = tiny_config();
  cfg.epochs = 2;
  const TrainResult r = train(tr, cfg, &val);
  REQUIRE(r.log.size() == 2);
  CHECK(std::isfinite(r.log[0].val_mpjpe));
  CHECK(r.log[0].val_mpjpe > 0.0);
}

TEST_CASE("checkpoint file roundtrip is byte exact") {
  MotionDataset ds = toy_dataset(6, 6, 37);
  const TrainResult r = train(ds, tiny_config());

  const std::string p1 = "/tmp/mstest_a.ckpt";
  const std::string p2 = "/tmp/mstest_b.ckpt";
  save_checkpoint(p1, r.checkpoint);
  const Checkpoint loaded = load_checkpoint(p1);
  CHECK(same_mlp(loaded.generator, r.checkpoint.generator));
  CHECK(same_mlp(loaded.critic, r.checkpoint.critic));
  CHECK(loaded.mu == r.checkpoint.mu);
  CHECK(loaded.scale_ratio_mean == r.checkpoint.scale_ratio_mean);
  CHECK(loaded.config.seed == r.checkpoint.config.seed);
  CHECK(RowMat(loaded.normalization.mean_pose) == RowMat(r.checkpoint.normalization.mean_pose));

  save_checkpoint(p2, loaded);
  std::ifstream a(p1, std::ios::binary), b(p2, std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(!sa.empty());
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("predict: seam is bitwise and zero generator decodes the reference point") {
  MotionDataset ds = toy_dataset(6, 8, 41);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 1;
  TrainResult r = train(ds, cfg);

  // Zero out the generator: the prediction decodes mu itself.
  Checkpoint zero = r.checkpoint;
  for (auto& w : zero.generator.weights) w.setZero();
  for (auto& b : zero.generator.biases) b.setZero();

  const auto raw = synthetic_motions(SyntheticKind::kPendulumWalk, 1, 8, 43);
  const PoseSequence prior_mm = raw[0];
  const PoseSequence out = predict(zero, prior_mm, 8);
  CHECK(out.frames() == 8);
  CHECK(out.flat.row(0) == prior_mm.flat.row(7));

  // Normalized-space check against a direct decode of mu.
  const PoseSequence prior_n = apply_normalization(prior_mm, zero.normalization);
  const ScaledSrvf ps = srvf_encode(sequence_to_curve(prior_n), AnchorRule::kLastSample);
  const Curve direct = srvf_decode(
      ScaledSrvf(SrvfPoint(zero.mu), ps.scale * zero.scale_ratio_mean, ps.anchor), 8);
  const PoseSequence out_n = predict_normalized(zero, prior_n, 8);
  CHECK(mstest::max_abs_diff(out_n.flat, direct.samples) == 0.0);

  // Public forward wrappers: the generator output is tangent at mu (the
  // TangentVector constructor enforces it) and the critic path runs.
  const SrvfPoint mu_pt{zero.mu};
  const TangentVector zero_tan(RowMat::Zero(zero.mu.rows(), zero.mu.cols()), mu_pt);
  CHECK(generator_forward(zero, zero_tan).samples().cwiseAbs().maxCoeff() == 0.0);
  const TangentVector gout = generator_forward(r.checkpoint, zero_tan);
  CHECK(std::abs(l2_inner(gout.samples(), zero.mu)) < 1e-8);
  CHECK(std::isfinite(discriminator_forward(r.checkpoint, gout)));

  // Shape validation errors.
  PoseSequence short_prior = prior_mm;
  short_prior.flat = prior_mm.flat.topRows(5);
  CHECK_THROWS_AS(predict(zero, short_prior, 8), DimensionError);
}

TEST_CASE("recursive prediction: junction frames repeat exactly") {
  MotionDataset ds = toy_dataset(6, 8, 47);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 1;
  const TrainResult r = train(ds, cfg);

  const auto raw = synthetic_motions(SyntheticKind::kPendulumWalk, 1, 8, 49);
  const PoseSequence prior = raw[0];

  const PoseSequence one = recursive_predict(r.checkpoint, prior, 1);
  const PoseSequence direct = predict(r.checkpoint, prior, 8);
  CHECK(one.flat == direct.flat);

  const PoseSequence three = recursive_predict(r.checkpoint, prior, 3);
  CHECK(three.frames() == 24);
  for (int seg = 1; seg < 3; ++seg)
    CHECK(three.flat.row(8 * seg) == three.flat.row(8 * seg - 1));
}

TEST_CASE("scale policies produce positive scales and distinct behavior") {
  MotionDataset ds = toy_dataset(8, 6, 53);
  for (ScalePolicy policy :
       {ScalePolicy::kPriorRatio, ScalePolicy::kTrainMean, ScalePolicy::kRegressed}) {
    TrainConfig cfg = tiny_config();
    cfg.epochs = 1;
    cfg.scale_policy = policy;
    const TrainResult r = train(ds, cfg);
    const auto raw = synthetic_motions(SyntheticKind::kPendulumWalk, 1, 6, 55);
    const PoseSequence out = predict(r.checkpoint, raw[0], 6);
    CHECK(out.frames() == 6);
    CHECK(out.flat.allFinite());
  }
}

TEST_CASE("mu sources") {
  MotionDataset ds = toy_dataset(5, 6, 59);
  const MuInfo fut = compute_mu(ds, MuSource::kFutures, KarcherConfig{});
  const MuInfo pri = compute_mu(ds, MuSource::kPriors, KarcherConfig{});
  const MuInfo uni = compute_mu(ds, MuSource::kUnion, KarcherConfig{});
  CHECK(fut.point.samples() != pri.point.samples());
  CHECK(l2_norm(uni.point.samples()) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mu_source_from_string("futures") == MuSource::kFutures);
  CHECK_THROWS_AS(mu_source_from_string("bogus"), ParseError);
}

TEST_CASE("evaluation report on a toy checkpoint") {
  MotionDataset tr = toy_dataset(10, 10, 61);
  MotionDataset te = toy_dataset(4, 10, 62);
  te.normalization = tr.normalization;
  te.split = Split::kTest;
  TrainConfig cfg = tiny_config();
  cfg.epochs = 2;
  const TrainResult r = train(tr, cfg);
  const EvalReport rep = evaluate(r.checkpoint, te, 20, 3, 1);
  CHECK(rep.sample_count == 4);
  CHECK(rep.mpjpe_at.count(80) == 1);
  CHECK(rep.mpjpe_at.count(400) == 1);
  CHECK(rep.mpjpe_at.count(1000) == 0);  // horizon too short at 25 fps
  CHECK(rep.baseline_mpjpe_at.at(400) > 0.0);
  CHECK(rep.mpjs_curve.size() == 9);
  for (const auto& [ms, st] : rep.mpjpe_resampled) CHECK(st.mean >= 0.0);

  const EvalReport rep2 = evaluate(r.checkpoint, te, 20, 3, 1);
  CHECK(rep.to_text() == rep2.to_text());
}
