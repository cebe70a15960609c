#include "motionsphere/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace motionsphere {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

PoseSequence load_motion_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("motion csv: cannot open " + path);
  auto fail = [&](int lineno, const std::string& what) {
    throw ParseError("motion csv " + path + ":" + std::to_string(lineno) + ": " + what);
  };

  std::string line;
  int lineno = 0;
  double fps = 0.0;
  bool have_fps = false, have_header = false;
  int joints = 0;
  std::vector<double> values;
  Eigen::Index rows = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("fps=");
      if (pos != std::string::npos) {
        try {
          fps = std::stod(line.substr(pos + 4));
        } catch (const std::exception&) {
          fail(lineno, "unreadable fps value");
        }
        have_fps = true;
      }
      continue;
    }
    const std::vector<std::string> fields = split_commas(line);
    if (!have_header) {
      if (fields.size() % 3 != 0 || fields.empty())
        fail(lineno, "header must list joint_i_x,joint_i_y,joint_i_z triples");
      joints = static_cast<int>(fields.size() / 3);
      static const char axis[3] = {'x', 'y', 'z'};
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string expect = "joint_" + std::to_string(i / 3) + "_" + axis[i % 3];
        if (fields[i] != expect)
          fail(lineno, "header column " + std::to_string(i) + " is '" + fields[i] +
                           "', expected '" + expect + "'");
      }
      have_header = true;
      continue;
    }
    if (static_cast<int>(fields.size()) != joints * 3)
      fail(lineno, "row has " + std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(joints * 3));
    for (const std::string& f : fields) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(f, &used));
        if (used != f.size()) throw std::invalid_argument(f);
      } catch (const std::exception&) {
        fail(lineno, "non-numeric field '" + f + "'");
      }
    }
    ++rows;
  }
  if (!have_header) throw ParseError("motion csv " + path + ": missing header row");
  if (!have_fps)
    throw ParseError("motion csv " + path + ": missing '# fps=<value>' comment line");
  if (rows < 2) throw ParseError("motion csv " + path + ": need at least 2 frames");

  PoseSequence seq;
  seq.joints = joints;
  seq.fps = fps;
  seq.flat = Eigen::Map<const RowMat>(values.data(), rows, joints * 3);
  seq.validate();
  return seq;
}

void save_motion_csv(const std::string& path, const PoseSequence& seq) {
  seq.validate();
  std::ofstream out(path);
  if (!out) throw ParseError("motion csv: cannot write " + path);
  out << "# fps=" << format_double(seq.fps) << "\n";
  for (int j = 0; j < seq.joints; ++j) {
    if (j) out << ",";
    out << "joint_" << j << "_x,joint_" << j << "_y,joint_" << j << "_z";
  }
  out << "\n";
  for (Eigen::Index t = 0; t < seq.frames(); ++t) {
    for (Eigen::Index c = 0; c < seq.flat.cols(); ++c) {
      if (c) out << ",";
      out << format_double(seq.flat(t, c));
    }
    out << "\n";
  }
}

void save_srvf(const std::string& path, const ScaledSrvf& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("srvf: cannot write " + path);
  std::ostringstream os;
  os << "motionsphere srvf v1\n";
  os << "t = " << s.point.time_samples() << "\n";
  os << "n = " << s.point.dim() << "\n";
  os << "scale = " << format_double(s.scale) << "\n";
  os << "anchor =";
  for (Eigen::Index i = 0; i < s.anchor.size(); ++i) os << " " << format_double(s.anchor[i]);
  os << "\nBINARY\n";
  const std::string header = os.str();
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(s.point.samples().data()),
            static_cast<std::streamsize>(s.point.samples().size() * sizeof(double)));
  if (!out) throw ParseError("srvf: short write to " + path);
}

ScaledSrvf load_srvf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("srvf: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "motionsphere srvf v1")
    throw ParseError("srvf " + path + ": bad magic line");

  Eigen::Index t = 0, n = 0;
  double scale = 0.0;
  Eigen::RowVectorXd anchor;
  while (std::getline(in, line)) {
    if (line == "BINARY") break;
    std::istringstream ss(line);
    std::string key, eq;
    ss >> key >> eq;
    if (eq != "=") throw ParseError("srvf " + path + ": malformed header line '" + line + "'");
    if (key == "t") ss >> t;
    else if (key == "n") ss >> n;
    else if (key == "scale") ss >> scale;
    else if (key == "anchor") {
      std::vector<double> vals;
      double v;
      while (ss >> v) vals.push_back(v);
      anchor = Eigen::Map<const Eigen::RowVectorXd>(vals.data(),
                                                    static_cast<Eigen::Index>(vals.size()));
    } else {
      throw ParseError("srvf " + path + ": unknown header key '" + key + "'");
    }
  }
  if (t < 2 || n < 3) throw ParseError("srvf " + path + ": missing or invalid grid size");
  RowMat samples(t, n);
  in.read(reinterpret_cast<char*>(samples.data()),
          static_cast<std::streamsize>(samples.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(samples.size() * sizeof(double)))
    throw ParseError("srvf " + path + ": sample block truncated");
  return ScaledSrvf(SrvfPoint(std::move(samples)), scale, std::move(anchor));
}

PoseSequence downsample_fps(const PoseSequence& seq, int factor) {
  seq.validate();
  if (factor < 1) throw DomainError("downsample_fps: factor must be >= 1");
  if (factor == 1) return seq;
  const Eigen::Index kept = (seq.frames() + factor - 1) / factor;
  PoseSequence out;
  out.joints = seq.joints;
  out.fps = seq.fps / factor;
  out.flat.resize(kept, seq.flat.cols());
  for (Eigen::Index i = 0; i < kept; ++i) out.flat.row(i) = seq.flat.row(i * factor);
  return out;
}

std::vector<PoseSequence> slice_nonoverlapping(const PoseSequence& seq, Eigen::Index window) {
  seq.validate();
  if (window < 2) throw DomainError("slice_nonoverlapping: window must be >= 2");
  std::vector<PoseSequence> out;
  for (Eigen::Index start = 0; start + window <= seq.frames(); start += window) {
    PoseSequence s;
    s.joints = seq.joints;
    s.fps = seq.fps;
    s.flat = seq.flat.middleRows(start, window);
    out.push_back(std::move(s));
  }
  return out;
}

std::string DatasetManifest::to_text() const {
  std::ostringstream os;
  os << "motionsphere dataset manifest v1\n";
  os << "prior_len = " << prior_len << "\n";
  os << "future_len = " << future_len << "\n";
  os << "fps = " << format_double(fps) << "\n";
  os << "downsample = " << downsample << "\n";
  os << "norm = " << format_double(normalization.norm) << "\n";
  os << "root = " << normalization.root << "\n";
  os << "mean_pose =";
  for (Eigen::Index i = 0; i < normalization.mean_pose.size(); ++i)
    os << " " << format_double(normalization.mean_pose.data()[i]);
  os << "\n";
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(content_hash));
  os << "content_hash = " << hex << "\n";
  for (const auto& [f, s] : files)
    os << "file = " << f << " " << (s == Split::kTrain ? "train" : "test") << "\n";
  return os.str();
}

DatasetPair make_dataset(const std::vector<std::string>& files, const SkeletonTopology& topo,
                         Eigen::Index prior_len, Eigen::Index future_len, const SplitRule& rule,
                         int downsample) {
  topo.validate();
  if (prior_len < 2 || future_len < 2)
    throw DimensionError("make_dataset: prior and future lengths must be >= 2");
  if (files.empty()) throw DimensionError("make_dataset: no input files");

  std::vector<std::string> sorted = files;
  std::sort(sorted.begin(), sorted.end());

  std::uint64_t hash = 0xcbf29ce484222325ULL;
  std::vector<std::pair<std::string, PoseSequence>> loaded;
  for (const std::string& f : sorted) {
    std::ifstream raw(f, std::ios::binary);
    if (!raw) throw ParseError("make_dataset: cannot open " + f);
    std::ostringstream bytes;
    bytes << raw.rdbuf();
    const std::string content = bytes.str();
    hash = fnv1a64(content.data(), content.size(), hash);

    PoseSequence seq = load_motion_csv(f);
    if (seq.joints != topo.joints)
      throw DimensionError("make_dataset: " + f + " has " + std::to_string(seq.joints) +
                           " joints, topology expects " + std::to_string(topo.joints));
    loaded.emplace_back(f, downsample_fps(seq, downsample));
  }

  // Normalization statistics come from the training split only.
  std::vector<PoseSequence> train_seqs;
  for (const auto& [f, s] : loaded)
    if (rule.of(f) == Split::kTrain) train_seqs.push_back(s);
  if (train_seqs.empty()) throw DimensionError("make_dataset: no training files after split");
  const NormalizationRecord rec = compute_normalization(train_seqs, topo.root);

  DatasetPair out;
  out.train.topology = topo;
  out.test.topology = topo;
  out.train.normalization = rec;
  out.test.normalization = rec;
  out.train.split = Split::kTrain;
  out.test.split = Split::kTest;
  out.train.fps = loaded.front().second.fps;
  out.test.fps = out.train.fps;

  const Eigen::Index window = prior_len + future_len;
  for (const auto& [f, seq] : loaded) {
    MotionDataset& ds = rule.of(f) == Split::kTrain ? out.train : out.test;
    const PoseSequence normalized = apply_normalization(seq, rec);
    for (const PoseSequence& win : slice_nonoverlapping(normalized, window)) {
      PoseSequence prior, future;
      prior.joints = future.joints = win.joints;
      prior.fps = future.fps = win.fps;
      prior.flat = win.flat.topRows(prior_len);
      future.flat = win.flat.bottomRows(future_len);
      ds.samples.emplace_back(std::move(prior), std::move(future));
    }
  }
  if (out.train.samples.empty()) throw DimensionError("make_dataset: training split is empty");

  out.manifest.prior_len = prior_len;
  out.manifest.future_len = future_len;
  out.manifest.fps = out.train.fps;
  out.manifest.downsample = downsample;
  out.manifest.normalization = rec;
  out.manifest.content_hash = hash;
  for (const std::string& f : sorted) out.manifest.files.emplace_back(f, rule.of(f));
  return out;
}

SyntheticKind synthetic_kind_from_string(const std::string& s) {
  if (s == "pendulum_walk") return SyntheticKind::kPendulumWalk;
  if (s == "figure8") return SyntheticKind::kFigure8;
  if (s == "two_mode") return SyntheticKind::kTwoMode;
  throw ParseError("unknown synthetic motion kind '" + s +
                   "' (expected pendulum_walk, figure8 or two_mode)");
}

std::string to_string(SyntheticKind k) {
  switch (k) {
    case SyntheticKind::kPendulumWalk: return "pendulum_walk";
    case SyntheticKind::kFigure8: return "figure8";
    case SyntheticKind::kTwoMode: return "two_mode";
  }
  return "?";
}

SkeletonTopology chain5_topology() {
  SkeletonTopology topo;
  topo.joints = 5;
  topo.root = 0;
  topo.bones = {{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  topo.joint_names = {"root", "hip", "knee", "ankle", "toe"};
  return topo;
}

namespace {

// Bone lengths of the synthetic chain, millimeters.
constexpr double kBoneLen[4] = {120.0, 110.0, 100.0, 90.0};
constexpr double kSynthFps = 25.0;

struct ChainAngles {
  // Polar/azimuth pair per bone; positions follow by forward kinematics
  // along unit directions, so bone lengths are constant by construction.
  double polar[4];
  double azimuth[4];
};

void write_frame(PoseSequence& seq, Eigen::Index t, const ChainAngles& a) {
  double x = 0.0, y = 0.0, z = 0.0;
  seq.flat(t, 0) = x;
  seq.flat(t, 1) = y;
  seq.flat(t, 2) = z;
  for (int b = 0; b < 4; ++b) {
    const double sp = std::sin(a.polar[b]), cp = std::cos(a.polar[b]);
    const double sa = std::sin(a.azimuth[b]), ca = std::cos(a.azimuth[b]);
    x += kBoneLen[b] * sp * ca;
    y += kBoneLen[b] * sp * sa;
    z -= kBoneLen[b] * cp;
    seq.flat(t, 3 * (b + 1) + 0) = x;
    seq.flat(t, 3 * (b + 1) + 1) = y;
    seq.flat(t, 3 * (b + 1) + 2) = z;
  }
}

double smootherstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (u * (6.0 * u - 15.0) + 10.0);
}

}  // namespace

std::vector<PoseSequence> synthetic_motions(SyntheticKind kind, int count, Eigen::Index frames,
                                            std::uint64_t seed) {
  if (count < 1 || frames < 2)
    throw DimensionError("synthetic_motions: count and frames must be positive");
  Rng rng(seed ^ (0x53594eULL + static_cast<std::uint64_t>(kind)));
  std::vector<PoseSequence> out;
  out.reserve(static_cast<std::size_t>(count));

  for (int s = 0; s < count; ++s) {
    // +-10% per-sample jitter on frequency and phase.
    const double fjit = 1.0 + 0.1 * (2.0 * rng.uniform() - 1.0);
    const double pjit = 0.1 * 2.0 * M_PI * (2.0 * rng.uniform() - 1.0);
    const double freq = 1.25 * fjit;  // Hz

    PoseSequence seq;
    seq.joints = 5;
    seq.fps = kSynthFps;
    seq.flat.resize(frames, 15);

    for (Eigen::Index t = 0; t < frames; ++t) {
      const double time = static_cast<double>(t) / kSynthFps;
      const double w = 2.0 * M_PI * freq * time + pjit;
      ChainAngles a{};
      switch (kind) {
        case SyntheticKind::kPendulumWalk:
          // Leg-like swing: growing amplitude down the chain, a quarter
          // period of lag per bone, gentle azimuth sway.
          for (int b = 0; b < 4; ++b) {
            a.polar[b] = 0.35 + (0.25 + 0.08 * b) * std::sin(w - 0.5 * M_PI * b);
            a.azimuth[b] = 0.15 * std::sin(w * 0.5 + 0.3 * b);
          }
          break;
        case SyntheticKind::kFigure8:
          // Two locked harmonics trace a figure-eight at the tip.
          for (int b = 0; b < 4; ++b) {
            a.polar[b] = 0.45 + 0.30 * std::sin(w + 0.2 * b);
            a.azimuth[b] = 0.40 * std::sin(2.0 * w + 0.2 * b);
          }
          break;
        case SyntheticKind::kTwoMode: {
          // Smooth transition from a periodic swing into a reach-and-hold.
          const double blend =
              smootherstep((time * freq - 1.0) / 1.5);
          for (int b = 0; b < 4; ++b) {
            const double swing = 0.35 + 0.28 * std::sin(w - 0.5 * M_PI * b);
            const double reach = 1.15 + 0.05 * std::sin(0.25 * w + b);
            a.polar[b] = (1.0 - blend) * swing + blend * reach;
            a.azimuth[b] = (1.0 - blend) * 0.15 * std::sin(0.5 * w) + blend * 0.6;
          }
          break;
        }
      }
      write_frame(seq, t, a);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace motionsphere
