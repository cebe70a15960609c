#pragma once

// Quantitative evaluation: per-joint position error over a prediction
// window, per-frame joint speed, the zero-velocity baseline and bone-length
// drift, plus the resampled mean/std reporting protocol.

#include "motionsphere/common.hpp"
#include "motionsphere/skeleton.hpp"
#include "motionsphere/srvf.hpp"

#include <map>
#include <string>
#include <vector>

namespace motionsphere {

/// Root-mean-square joint displacement over the first delta_frames frames,
/// millimeters. Set windowed=false to evaluate the single frame at
/// delta_frames instead of the window up to it.
double mpjpe(const PoseSequence& pred, const PoseSequence& truth, Eigen::Index delta_frames,
             bool windowed = true);

/// Mean inter-frame joint displacement per frame transition (mm/frame);
/// entry t-1 covers the step from frame t-1 to frame t.
std::vector<double> mpjs(const std::vector<PoseSequence>& sequences);

/// Freezes the last observed frame for the whole horizon.
PoseSequence zero_velocity_baseline(const PoseSequence& prior, Eigen::Index horizon);

/// Max over frames of the mean relative deviation of bone lengths from the
/// frame-0 lengths.
double bone_length_drift(const PoseSequence& seq, const SkeletonTopology& topo);

struct ResampleStats {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Draw `draws` subsets of `draw_size` sequences (without replacement
/// within a draw), average the per-sequence values over each subset, and
/// report mean and standard deviation of the draw averages.
ResampleStats resample_stats(const std::vector<double>& per_sequence, int draws, int draw_size,
                             std::uint64_t seed);

struct EvalReport {
  std::map<int, double> mpjpe_at;           // horizon ms -> mm
  std::map<int, double> baseline_mpjpe_at;  // zero-velocity reference
  std::map<int, ResampleStats> mpjpe_resampled;
  std::vector<double> mpjs_curve;        // predicted sequences
  std::vector<double> mpjs_truth_curve;  // matched ground truth
  int sample_count = 0;
  double fps = 0.0;

  /// Fixed-key structured text (mpjpe_ms_80 = ... etc.) for machine diffing.
  std::string to_text() const;
};

/// Evaluation horizons of the reporting convention (milliseconds).
const std::vector<int>& standard_horizons_ms();

/// ms -> frame count at the given fps (rounded to nearest).
Eigen::Index horizon_frames(int ms, double fps);

}  // namespace motionsphere
