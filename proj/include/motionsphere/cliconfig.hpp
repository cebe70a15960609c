#pragma once

// Structured-text run configuration for the train/eval commands: one
// "key = value" pair per line, '#' comments, unknown keys rejected. Every
// key can be overridden on the command line via --set key=value.

#include "motionsphere/gan.hpp"

#include <map>
#include <string>
#include <vector>

namespace motionsphere {

struct CliConfig {
  gan::TrainConfig train;
  std::string train_dir;
  std::string test_dir;
  std::string topology = "chain5";  // path, or the built-in "chain5"
  Eigen::Index prior_len = 10;
  Eigen::Index future_len = 10;
  int downsample = 1;
  std::string checkpoint_out = "model.ckpt";
  std::string log_out;

  SkeletonTopology load_topology() const;

  /// Parses a config file and applies overrides ("key=value" strings).
  static CliConfig load(const std::string& path, const std::vector<std::string>& overrides);

  /// Applies one override to an already-loaded config.
  void set(const std::string& key, const std::string& value);
};

}  // namespace motionsphere
