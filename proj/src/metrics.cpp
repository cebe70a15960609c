#include "motionsphere/metrics.hpp"

#include <cmath>
#include <sstream>

namespace motionsphere {

double mpjpe(const PoseSequence& pred, const PoseSequence& truth, Eigen::Index delta_frames,
             bool windowed) {
  if (pred.joints != truth.joints || pred.frames() != truth.frames())
    throw DimensionError("mpjpe: sequence shapes differ");
  if (delta_frames < 1 || delta_frames > pred.frames())
    throw DimensionError("mpjpe: delta_frames outside the predicted length");
  const Eigen::Index t0 = windowed ? 0 : delta_frames - 1;
  double acc = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index t = t0; t < delta_frames; ++t) {
    for (int j = 0; j < pred.joints; ++j) {
      acc += (pred.flat.row(t).segment(3 * j, 3) - truth.flat.row(t).segment(3 * j, 3))
                 .squaredNorm();
      ++count;
    }
  }
  return std::sqrt(acc / static_cast<double>(count));
}

std::vector<double> mpjs(const std::vector<PoseSequence>& sequences) {
  if (sequences.empty()) throw DimensionError("mpjs: no sequences");
  const Eigen::Index T = sequences.front().frames();
  const int k = sequences.front().joints;
  if (T < 2) throw DimensionError("mpjs: sequences must have at least 2 frames");
  for (const auto& s : sequences)
    if (s.frames() != T || s.joints != k) throw DimensionError("mpjs: sequence shapes differ");

  std::vector<double> out(static_cast<std::size_t>(T - 1), 0.0);
  const double inv = 1.0 / static_cast<double>(sequences.size() * k);
  for (Eigen::Index t = 1; t < T; ++t) {
    double acc = 0.0;
    for (const auto& s : sequences)
      for (int j = 0; j < k; ++j)
        acc += (s.flat.row(t).segment(3 * j, 3) - s.flat.row(t - 1).segment(3 * j, 3)).norm();
    out[static_cast<std::size_t>(t - 1)] = acc * inv;
  }
  return out;
}

PoseSequence zero_velocity_baseline(const PoseSequence& prior, Eigen::Index horizon) {
  prior.validate();
  if (horizon < 1) throw DimensionError("zero_velocity_baseline: horizon must be positive");
  PoseSequence out;
  out.joints = prior.joints;
  out.fps = prior.fps;
  out.flat = prior.flat.row(prior.frames() - 1).replicate(horizon, 1);
  return out;
}

double bone_length_drift(const PoseSequence& seq, const SkeletonTopology& topo) {
  seq.validate();
  if (seq.joints != topo.joints) throw DimensionError("bone_length_drift: joint count mismatch");
  const VectorXd ref = bone_lengths(Pose(seq.pose(0)), topo);
  for (Eigen::Index b = 0; b < ref.size(); ++b)
    if (ref[b] < 1e-12) throw DegenerateInputError("bone_length_drift: zero-length bone at frame 0");
  double worst = 0.0;
  for (Eigen::Index t = 1; t < seq.frames(); ++t) {
    const VectorXd len = bone_lengths(Pose(seq.pose(t)), topo);
    const double dev = ((len - ref).cwiseAbs().cwiseQuotient(ref)).mean();
    worst = std::max(worst, dev);
  }
  return worst;
}

ResampleStats resample_stats(const std::vector<double>& per_sequence, int draws, int draw_size,
                             std::uint64_t seed) {
  if (per_sequence.empty()) throw DimensionError("resample_stats: empty value list");
  if (draws < 1 || draw_size < 1) throw DimensionError("resample_stats: non-positive protocol");
  const int n = static_cast<int>(per_sequence.size());
  const int take = std::min(draw_size, n);
  Rng rng(seed);
  std::vector<double> means(static_cast<std::size_t>(draws));
  for (int d = 0; d < draws; ++d) {
    std::vector<int> perm = rng.permutation(n);
    double acc = 0.0;
    for (int i = 0; i < take; ++i) acc += per_sequence[static_cast<std::size_t>(perm[i])];
    means[static_cast<std::size_t>(d)] = acc / take;
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= draws;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= draws;
  return ResampleStats{mean, std::sqrt(var)};
}

const std::vector<int>& standard_horizons_ms() {
  static const std::vector<int> kHorizons = {80, 160, 320, 400, 1000};
  return kHorizons;
}

Eigen::Index horizon_frames(int ms, double fps) {
  return static_cast<Eigen::Index>(std::lround(ms * fps / 1000.0));
}

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os << "motionsphere eval report v1\n";
  os << "samples = " << sample_count << "\n";
  os << "fps = " << format_double(fps) << "\n";
  for (const auto& [ms, v] : mpjpe_at) os << "mpjpe_ms_" << ms << " = " << format_double(v) << "\n";
  for (const auto& [ms, v] : baseline_mpjpe_at)
    os << "baseline_mpjpe_ms_" << ms << " = " << format_double(v) << "\n";
  for (const auto& [ms, st] : mpjpe_resampled) {
    os << "mpjpe_ms_" << ms << "_resampled_mean = " << format_double(st.mean) << "\n";
    os << "mpjpe_ms_" << ms << "_resampled_std = " << format_double(st.stddev) << "\n";
  }
  auto curve = [&os](const char* key, const std::vector<double>& v) {
    os << key << " =";
    for (double x : v) os << " " << format_double(x);
    os << "\n";
  };
  curve("mpjs_pred", mpjs_curve);
  curve("mpjs_truth", mpjs_truth_curve);
  return os.str();
}

}  // namespace motionsphere
