#include "motionsphere/skeleton.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace motionsphere {

void SkeletonTopology::validate() const {
  if (joints < 1) throw DimensionError("SkeletonTopology: joint count must be positive");
  if (bones.empty()) throw DimensionError("SkeletonTopology: need at least one bone");
  if (root < 0 || root >= joints) throw DimensionError("SkeletonTopology: root index out of range");
  if (!joint_names.empty() && static_cast<int>(joint_names.size()) != joints)
    throw DimensionError("SkeletonTopology: joint_names size differs from joint count");

  // Union-find over bone endpoints: a repeated merge means a cycle.
  std::vector<int> parent(joints);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<bool> used(joints, false);
  for (auto [a, b] : bones) {
    if (a < 0 || a >= joints || b < 0 || b >= joints)
      throw DimensionError("SkeletonTopology: bone joint index out of range");
    if (a == b) throw DimensionError("SkeletonTopology: self-loop bone");
    used[a] = used[b] = true;
    int ra = find(a), rb = find(b);
    if (ra == rb) throw DimensionError("SkeletonTopology: bone list contains a cycle");
    parent[ra] = rb;
  }
  int component = -1;
  for (int j = 0; j < joints; ++j) {
    if (!used[j]) continue;
    int r = find(j);
    if (component == -1) component = r;
    if (r != component) throw DimensionError("SkeletonTopology: bones are not connected");
  }
}

SkeletonTopology SkeletonTopology::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("topology: cannot open " + path);
  SkeletonTopology topo;
  std::string line;
  int lineno = 0, field = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError("topology " + path + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    if (field == 0) {
      if (!(ss >> topo.joints)) fail("expected joint count");
      field = 1;
    } else if (field == 1) {
      if (!(ss >> topo.root)) fail("expected root index");
      field = 2;
    } else {
      int a, b;
      if (!(ss >> a >> b)) fail("expected 'parent child [name]'");
      std::string name;
      ss >> name;
      topo.bones.emplace_back(a, b);
      if (!name.empty()) {
        topo.joint_names.resize(topo.joints);
        if (b >= 0 && b < topo.joints) topo.joint_names[b] = name;
      }
    }
  }
  if (field < 2) throw ParseError("topology " + path + ": truncated file");
  topo.validate();
  return topo;
}

void SkeletonTopology::save(const std::string& path) const {
  validate();
  std::ofstream out(path);
  if (!out) throw ParseError("topology: cannot write " + path);
  out << joints << "\n" << root << "\n";
  for (std::size_t i = 0; i < bones.size(); ++i) {
    out << bones[i].first << " " << bones[i].second;
    if (!joint_names.empty() && !joint_names[bones[i].second].empty())
      out << " " << joint_names[bones[i].second];
    out << "\n";
  }
}

MatrixXd gram_matrix(const Pose& p) { return p * p.transpose(); }

double gram_distance(const Pose& p1, const Pose& p2) {
  if (p1.rows() != p2.rows())
    throw DimensionError("gram_distance: joint counts differ");
  const double tr1 = p1.squaredNorm();
  const double tr2 = p2.squaredNorm();
  // Singular values of the 3x3 cross matrix, never the k x k Grams.
  const Eigen::Matrix3d m = p2.transpose() * p1;
  const double sigma_sum = m.jacobiSvd().singularValues().sum();
  return std::max(0.0, tr1 + tr2 - 2.0 * sigma_sum);
}

static Pose pose_at(const PoseSequence& s, Eigen::Index t) {
  return Pose(s.pose(t));
}

double skeleton_integrity_loss(const std::vector<PoseSequence>& pred,
                               const std::vector<PoseSequence>& truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw DimensionError("skeleton_integrity_loss: sample counts differ or empty");
  double acc = 0.0;
  Eigen::Index total_frames = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].frames() != truth[i].frames() || pred[i].joints != truth[i].joints)
      throw DimensionError("skeleton_integrity_loss: sequence shapes differ");
    for (Eigen::Index t = 0; t < pred[i].frames(); ++t)
      acc += gram_distance(pose_at(truth[i], t), pose_at(pred[i], t));
    total_frames += pred[i].frames();
  }
  return acc / static_cast<double>(total_frames);
}

VectorXd bone_lengths(const Pose& p, const SkeletonTopology& topo) {
  if (p.rows() != topo.joints) throw DimensionError("bone_lengths: pose joint count mismatch");
  VectorXd out(static_cast<Eigen::Index>(topo.bones.size()));
  for (std::size_t j = 0; j < topo.bones.size(); ++j)
    out[static_cast<Eigen::Index>(j)] =
        (p.row(topo.bones[j].second) - p.row(topo.bones[j].first)).norm();
  return out;
}

double bone_length_loss(const std::vector<PoseSequence>& pred,
                        const std::vector<PoseSequence>& truth, const SkeletonTopology& topo) {
  if (pred.size() != truth.size() || pred.empty())
    throw DimensionError("bone_length_loss: sample counts differ or empty");
  double acc = 0.0;
  Eigen::Index count = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].frames() != truth[i].frames() || pred[i].joints != truth[i].joints)
      throw DimensionError("bone_length_loss: sequence shapes differ");
    for (Eigen::Index t = 0; t < pred[i].frames(); ++t) {
      const VectorXd bp = bone_lengths(pose_at(pred[i], t), topo);
      const VectorXd bt = bone_lengths(pose_at(truth[i], t), topo);
      acc += (bp - bt).cwiseAbs().sum();
      count += bp.size();
    }
  }
  return acc / static_cast<double>(count);
}

NormalizationRecord compute_normalization(const std::vector<PoseSequence>& seqs, int root) {
  if (seqs.empty()) throw DimensionError("compute_normalization: no sequences");
  const int k = seqs.front().joints;
  Pose mean = Pose::Zero(k, 3);
  Eigen::Index frames = 0;
  for (const auto& s : seqs) {
    if (s.joints != k) throw DimensionError("compute_normalization: joint counts differ");
    for (Eigen::Index t = 0; t < s.frames(); ++t) mean += pose_at(s, t);
    frames += s.frames();
  }
  mean /= static_cast<double>(frames);

  double ss = 0.0;
  for (const auto& s : seqs)
    for (Eigen::Index t = 0; t < s.frames(); ++t) ss += (pose_at(s, t) - mean).squaredNorm();
  const double norm = std::sqrt(ss / static_cast<double>(frames * k * 3));
  if (norm < 1e-12)
    throw DegenerateInputError("compute_normalization: zero coordinate deviation");
  return NormalizationRecord{std::move(mean), norm, root};
}

PoseSequence apply_normalization(const PoseSequence& seq, const NormalizationRecord& rec) {
  seq.validate();
  if (seq.joints != rec.mean_pose.rows())
    throw DimensionError("apply_normalization: joint count mismatch");
  PoseSequence out = seq;
  const double inv = 1.0 / rec.norm;
  for (Eigen::Index t = 0; t < out.frames(); ++t) {
    Eigen::Map<Pose> p(out.flat.row(t).data(), out.joints, 3);
    p = (p - rec.mean_pose) * inv;
    const Eigen::RowVector3d r = p.row(rec.root);
    p.rowwise() -= r;
  }
  return out;
}

PoseSequence invert_normalization(const PoseSequence& seq, const NormalizationRecord& rec) {
  seq.validate();
  if (seq.joints != rec.mean_pose.rows())
    throw DimensionError("invert_normalization: joint count mismatch");
  PoseSequence out = seq;
  for (Eigen::Index t = 0; t < out.frames(); ++t) {
    Eigen::Map<Pose> p(out.flat.row(t).data(), out.joints, 3);
    p = p * rec.norm + rec.mean_pose;
  }
  return out;
}

std::pair<PoseSequence, NormalizationRecord> normalize_pose_sequence(
    const PoseSequence& seq, const SkeletonTopology& topo) {
  if (seq.joints != topo.joints)
    throw DimensionError("normalize_pose_sequence: topology joint count mismatch");
  NormalizationRecord rec = compute_normalization({seq}, topo.root);
  return {apply_normalization(seq, rec), rec};
}

}  // namespace motionsphere
