#pragma once

// Skeleton-space quantities: the rotation-invariant Gram-matrix pose
// distance, its sequence-level integrity loss, bone lengths and the
// bone-length loss, and the pose-sequence normalization used before
// training.

#include "motionsphere/common.hpp"
#include "motionsphere/srvf.hpp"

#include <string>
#include <utility>
#include <vector>

namespace motionsphere {

/// A pose is a k x 3 joint-coordinate matrix (millimeters).
using Pose = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

struct SkeletonTopology {
  int joints = 0;
  int root = 0;
  std::vector<std::pair<int, int>> bones;  // (parent, child) joint indices
  std::vector<std::string> joint_names;    // optional, empty or size == joints

  void validate() const;

  /// Line-oriented text: joint count, root index, then one
  /// "parent child [name]" line per bone.
  static SkeletonTopology load(const std::string& path);
  void save(const std::string& path) const;
};

/// G = P P^T.
MatrixXd gram_matrix(const Pose& p);

/// Tr(G1) + Tr(G2) - 2 sum of the three singular values of P2^T P1.
/// Equals the squared Procrustes residual over orthogonal alignments;
/// negative rounding noise is clamped to zero.
double gram_distance(const Pose& p1, const Pose& p2);

/// Mean gram_distance over all samples and frames of matched sequence lists.
double skeleton_integrity_loss(const std::vector<PoseSequence>& pred,
                               const std::vector<PoseSequence>& truth);

/// Euclidean length of every (parent, child) segment.
VectorXd bone_lengths(const Pose& p, const SkeletonTopology& topo);

/// Mean absolute difference of scalar bone lengths over samples, frames and
/// bones.
double bone_length_loss(const std::vector<PoseSequence>& pred,
                        const std::vector<PoseSequence>& truth, const SkeletonTopology& topo);

/// Statistics needed to undo the first two normalization steps. The
/// per-frame root translation removed by the last step is not recoverable.
struct NormalizationRecord {
  Pose mean_pose;  // k x 3, computed over training frames
  double norm = 1.0;
  int root = 0;
};

/// Mean pose and scalar coordinate deviation over every frame of the given
/// sequences.
NormalizationRecord compute_normalization(const std::vector<PoseSequence>& seqs, int root);

/// Subtract the mean pose, divide by the norm, then subtract the root-joint
/// coordinates from every joint per frame (the root ends at the origin).
PoseSequence apply_normalization(const PoseSequence& seq, const NormalizationRecord& rec);

/// Undo the scale and mean shift (root translation stays lost).
PoseSequence invert_normalization(const PoseSequence& seq, const NormalizationRecord& rec);

/// Single-sequence convenience: statistics from the sequence itself.
std::pair<PoseSequence, NormalizationRecord> normalize_pose_sequence(const PoseSequence& seq,
                                                                     const SkeletonTopology& topo);

}  // namespace motionsphere
