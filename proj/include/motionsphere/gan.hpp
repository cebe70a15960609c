#pragma once

// The predictive manifold-aware Wasserstein GAN: a dense predictor and
// critic operating in the tangent space at a Karcher-mean reference point,
// trained with the adversarial (gradient-penalty), tangent-reconstruction,
// pose-integrity and bone-length losses, plus the prediction paths.

#include "motionsphere/dataio.hpp"
#include "motionsphere/losses.hpp"
#include "motionsphere/metrics.hpp"
#include "motionsphere/nets.hpp"
#include "motionsphere/skeleton.hpp"
#include "motionsphere/sphere.hpp"
#include "motionsphere/srvf.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace motionsphere::gan {

/// Which SRVFs the training reference point mu is averaged over.
enum class MuSource { kPriors, kFutures, kUnion };

/// How the decoded prediction recovers its millimeter scale, which the
/// unit-sphere representation cannot carry.
enum class ScalePolicy {
  kPriorRatio,  // prior scale x mean train future/prior scale ratio
  kTrainMean,   // mean train future scale
  kRegressed,   // extra generator output, log-scale regression
};

MuSource mu_source_from_string(const std::string& s);
ScalePolicy scale_policy_from_string(const std::string& s);
std::string to_string(MuSource m);
std::string to_string(ScalePolicy p);

struct TrainConfig {
  double beta1 = 1.0, beta2 = 1.0, beta3 = 10.0, beta4 = 10.0;
  double lambda = 10.0;  // gradient penalty weight
  double lr = 1e-4;
  int batch = 64;
  int epochs = 500;
  std::uint64_t seed = 0;
  bool loss_ls = true;  // skeleton integrity term toggle
  bool loss_lb = true;  // bone length term toggle
  MuSource mu_source = MuSource::kFutures;
  ScalePolicy scale_policy = ScalePolicy::kPriorRatio;
  double adam_b1 = 0.9, adam_b2 = 0.999, adam_eps = 1e-8;
  std::vector<int> gen_hidden = {256, 256};
  std::vector<int> critic_hidden = {128, 64};
  KarcherConfig karcher;

  void validate() const;

  /// Larger preset with the full-scale layer widths.
  static TrainConfig fullscale_preset();
};

struct Checkpoint {
  int format_version = 1;
  TrainConfig config;
  Mlp generator;
  Mlp critic;
  RowMat mu;  // reference point, tangent grid T x n
  NormalizationRecord normalization;
  int joints = 0;
  Eigen::Index prior_len = 0, future_len = 0;
  double fps = 0.0;
  double scale_ratio_mean = 1.0;   // train mean of future/prior scale
  double scale_future_mean = 1.0;  // train mean future scale

  TangentLayout layout() const { return TangentLayout{mu.rows(), mu.cols()}; }
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

/// One training pair after SRVF encoding against a fixed reference point.
struct EncodedSample {
  Eigen::RowVectorXd prior_tangent;  // flattened log_mu of the prior SRVF
  Eigen::RowVectorXd future_tangent;
  double prior_scale = 0.0;
  double future_scale = 0.0;
  Eigen::RowVectorXd future_anchor;  // first normalized future pose
  RowMat future_frames;              // normalized ground-truth future, T x n
};

struct MuInfo {
  SrvfPoint point;
  int iterations;
  double residual;
};

/// Karcher mean of the configured SRVF population of a dataset.
MuInfo compute_mu(const MotionDataset& ds, MuSource source, const KarcherConfig& karcher);

/// Encodes every (prior, future) pair of a dataset against mu.
std::vector<EncodedSample> encode_pairs(const MotionDataset& ds, const SrvfPoint& mu);

struct LossBreakdown {
  double total = 0.0;
  double adversarial = 0.0;
  double reconstruction = 0.0;
  double integrity = 0.0;
  double bone = 0.0;
};

/// Reported value of the weighted training objective on a batch, with the
/// per-term breakdown. Disabled toggles contribute exactly zero. The
/// gradient-penalty interpolation coefficients come from `rng`.
LossBreakdown global_loss(const Mlp& generator, const Mlp& critic,
                          const std::vector<EncodedSample>& batch, const RowMat& mu,
                          const TrainConfig& cfg, const SkeletonTopology& topo, Rng& rng);

struct EpochLog {
  int epoch = 0;
  LossBreakdown losses;
  double val_mpjpe = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochLog> log;
  int karcher_iterations = 0;
  double karcher_residual = 0.0;
};

/// Alternating critic/generator optimization with Adam; a pure function of
/// (dataset, config). Throws TrainingDivergedError on a non-finite loss.
TrainResult train(const MotionDataset& train_ds, const TrainConfig& cfg,
                  const MotionDataset* validation = nullptr);

/// Raw generator output for one prior tangent, reprojected onto the
/// tangent space at the checkpoint's reference point.
TangentVector generator_forward(const Checkpoint& ckpt, const TangentVector& prior_tangent);

/// Critic value of a tangent vector under the checkpoint's critic.
double discriminator_forward(const Checkpoint& ckpt, const TangentVector& x);

/// Normalized-space prediction: prior must already be in the checkpoint's
/// normalized coordinates. Frame 0 equals the prior's last frame bitwise.
PoseSequence predict_normalized(const Checkpoint& ckpt, const PoseSequence& prior_norm,
                                Eigen::Index horizon);

/// Millimeter-space prediction: normalizes the prior, predicts, restores
/// millimeter scale and pins the seam so that frame 0 equals the raw last
/// prior frame bitwise.
PoseSequence predict(const Checkpoint& ckpt, const PoseSequence& prior_mm, Eigen::Index horizon);

/// Feeds each prediction's tail back as the next prior; segments are
/// concatenated, so every junction frame appears twice and is identical.
PoseSequence recursive_predict(const Checkpoint& ckpt, const PoseSequence& prior_mm,
                               int repetitions, Eigen::Index horizon = 0);

/// Held-out evaluation in millimeters: per-horizon MPJPE against the
/// seam-aligned truth, the zero-velocity baseline, resampled mean/std, and
/// the MPJS curves.
EvalReport evaluate(const Checkpoint& ckpt, const MotionDataset& test, int draws = 100,
                    int draw_size = 8, std::uint64_t seed = 1u);

}  // namespace motionsphere::gan
