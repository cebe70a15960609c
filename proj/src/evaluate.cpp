#include "motionsphere/gan.hpp"

#include <map>

namespace motionsphere::gan {

EvalReport evaluate(const Checkpoint& ckpt, const MotionDataset& test, int draws, int draw_size,
                    std::uint64_t seed) {
  if (test.samples.empty()) throw DimensionError("evaluate: empty test set");
  const Eigen::Index h = test.future_len();
  if (test.prior_len() != ckpt.prior_len)
    throw DimensionError("evaluate: test prior length differs from checkpoint");

  // Predictions are seam-aligned: frame j estimates the pose at time
  // tau + j, frame 0 being the last prior frame exactly. Ground truth for
  // scoring is aligned the same way.
  std::vector<PoseSequence> preds, truths, baselines;
  preds.reserve(test.samples.size());
  for (const auto& [prior, future] : test.samples) {
    PoseSequence truth;
    truth.joints = prior.joints;
    truth.fps = prior.fps;
    truth.flat.resize(h, prior.flat.cols());
    truth.flat.row(0) = prior.flat.row(prior.frames() - 1);
    truth.flat.bottomRows(h - 1) = future.flat.topRows(h - 1);

    preds.push_back(invert_normalization(predict_normalized(ckpt, prior, h), ckpt.normalization));
    truths.push_back(invert_normalization(truth, ckpt.normalization));
    baselines.push_back(invert_normalization(zero_velocity_baseline(prior, h), ckpt.normalization));
  }

  EvalReport report;
  report.sample_count = static_cast<int>(test.samples.size());
  report.fps = test.fps;

  for (int ms : standard_horizons_ms()) {
    const Eigen::Index frames = horizon_frames(ms, test.fps);
    if (frames < 1 || frames > h) continue;
    std::vector<double> per_seq(preds.size()), per_seq_base(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
      per_seq[i] = mpjpe(preds[i], truths[i], frames);
      per_seq_base[i] = mpjpe(baselines[i], truths[i], frames);
    }
    double mean = 0.0, mean_base = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      mean += per_seq[i];
      mean_base += per_seq_base[i];
    }
    report.mpjpe_at[ms] = mean / static_cast<double>(preds.size());
    report.baseline_mpjpe_at[ms] = mean_base / static_cast<double>(preds.size());
    report.mpjpe_resampled[ms] = resample_stats(per_seq, draws, draw_size, seed);
  }

  report.mpjs_curve = mpjs(preds);
  report.mpjs_truth_curve = mpjs(truths);
  return report;
}

}  // namespace motionsphere::gan
