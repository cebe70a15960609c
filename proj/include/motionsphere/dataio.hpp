#pragma once

// Dataset loading and the preprocessing pipeline: fps downsampling,
// normalization with training-split statistics, non-overlapping slicing
// into (prior, future) pairs, and a deterministic synthetic-motion
// generator for desk-scale experiments.

#include "motionsphere/common.hpp"
#include "motionsphere/skeleton.hpp"
#include "motionsphere/srvf.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace motionsphere {

/// Motion CSV: a "# fps=<v>" comment, a joint_i_{x,y,z} header row, then
/// one row of millimeter coordinates per frame.
PoseSequence load_motion_csv(const std::string& path);
void save_motion_csv(const std::string& path, const PoseSequence& seq);

/// Keeps every factor-th frame starting at 0 and divides fps by factor.
PoseSequence downsample_fps(const PoseSequence& seq, int factor);

/// Consecutive windows [0,w), [w,2w), ...; the trailing remainder is
/// dropped.
std::vector<PoseSequence> slice_nonoverlapping(const PoseSequence& seq, Eigen::Index window);

/// SRVF container: text header (grid size, scale, anchor) followed by the
/// flat little-endian sample block.
void save_srvf(const std::string& path, const ScaledSrvf& s);
ScaledSrvf load_srvf(const std::string& path);

enum class Split { kTrain, kTest };

struct MotionDataset {
  std::vector<std::pair<PoseSequence, PoseSequence>> samples;  // (prior, future), normalized
  SkeletonTopology topology;
  double fps = 0.0;
  NormalizationRecord normalization;
  Split split = Split::kTrain;

  Eigen::Index prior_len() const { return samples.empty() ? 0 : samples.front().first.frames(); }
  Eigen::Index future_len() const { return samples.empty() ? 0 : samples.front().second.frames(); }
};

struct DatasetManifest {
  std::vector<std::pair<std::string, Split>> files;  // sorted by filename
  Eigen::Index prior_len = 0, future_len = 0;
  double fps = 0.0;
  int downsample = 1;
  NormalizationRecord normalization;
  std::uint64_t content_hash = 0;  // FNV-1a over concatenated file bytes

  std::string to_text() const;
};

/// Test files are named explicitly; everything else is training data.
struct SplitRule {
  std::set<std::string> test_files;
  Split of(const std::string& path) const {
    return test_files.count(path) ? Split::kTest : Split::kTrain;
  }
};

struct DatasetPair {
  MotionDataset train;
  MotionDataset test;
  DatasetManifest manifest;
};

/// Full pipeline: load -> downsample -> normalize with train-split
/// statistics -> slice into contiguous (prior, future) windows. File order
/// is sorted by name so the result is a pure function of the file bytes.
DatasetPair make_dataset(const std::vector<std::string>& files, const SkeletonTopology& topo,
                         Eigen::Index prior_len, Eigen::Index future_len, const SplitRule& rule,
                         int downsample = 1);

enum class SyntheticKind { kPendulumWalk, kFigure8, kTwoMode };

SyntheticKind synthetic_kind_from_string(const std::string& s);
std::string to_string(SyntheticKind k);

/// The 5-joint chain skeleton the generator emits.
SkeletonTopology chain5_topology();

/// Deterministic articulated motions on the 5-joint chain: sinusoidal limb
/// oscillation with seeded per-sample frequency/phase jitter, exactly
/// constant bone lengths, 25 fps.
std::vector<PoseSequence> synthetic_motions(SyntheticKind kind, int count, Eigen::Index frames,
                                            std::uint64_t seed);

}  // namespace motionsphere
