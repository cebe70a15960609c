#include "motionsphere/cliconfig.hpp"

#include <fstream>
#include <sstream>

namespace motionsphere {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ParseError("config: boolean value expected for " + key + ", got '" + v + "'");
}

std::vector<int> parse_ints(const std::string& v) {
  std::istringstream ss(v);
  std::vector<int> out;
  int x;
  while (ss >> x) out.push_back(x);
  return out;
}

}  // namespace

SkeletonTopology CliConfig::load_topology() const {
  if (topology == "chain5") return chain5_topology();
  return SkeletonTopology::load(topology);
}

void CliConfig::set(const std::string& key, const std::string& value) {
  gan::TrainConfig& t = train;
  try {
    if (key == "train_dir") train_dir = value;
    else if (key == "test_dir") test_dir = value;
    else if (key == "topology") topology = value;
    else if (key == "prior_len") prior_len = std::stol(value);
    else if (key == "future_len") future_len = std::stol(value);
    else if (key == "downsample") downsample = std::stoi(value);
    else if (key == "checkpoint_out") checkpoint_out = value;
    else if (key == "log_out") log_out = value;
    else if (key == "preset") {
      if (value == "fullscale") {
        t = gan::TrainConfig::fullscale_preset();
      } else if (value != "desk") {
        throw ParseError("config: unknown preset '" + value + "' (expected desk or fullscale)");
      }
    }
    else if (key == "beta1") t.beta1 = std::stod(value);
    else if (key == "beta2") t.beta2 = std::stod(value);
    else if (key == "beta3") t.beta3 = std::stod(value);
    else if (key == "beta4") t.beta4 = std::stod(value);
    else if (key == "lambda") t.lambda = std::stod(value);
    else if (key == "lr") t.lr = std::stod(value);
    else if (key == "batch") t.batch = std::stoi(value);
    else if (key == "epochs") t.epochs = std::stoi(value);
    else if (key == "seed") t.seed = std::stoull(value);
    else if (key == "loss_ls") t.loss_ls = parse_bool(value, key);
    else if (key == "loss_lb") t.loss_lb = parse_bool(value, key);
    else if (key == "mu_source") t.mu_source = gan::mu_source_from_string(value);
    else if (key == "scale_policy") t.scale_policy = gan::scale_policy_from_string(value);
    else if (key == "adam_b1") t.adam_b1 = std::stod(value);
    else if (key == "adam_b2") t.adam_b2 = std::stod(value);
    else if (key == "adam_eps") t.adam_eps = std::stod(value);
    else if (key == "gen_hidden") t.gen_hidden = parse_ints(value);
    else if (key == "critic_hidden") t.critic_hidden = parse_ints(value);
    else if (key == "karcher_eps") t.karcher.epsilon = std::stod(value);
    else if (key == "karcher_tau") t.karcher.threshold = std::stod(value);
    else if (key == "karcher_max_iters") t.karcher.max_iters = std::stoi(value);
    else throw ParseError("config: unknown key '" + key + "'");
  } catch (const std::invalid_argument&) {
    throw ParseError("config: unreadable value '" + value + "' for " + key);
  } catch (const std::out_of_range&) {
    throw ParseError("config: value out of range '" + value + "' for " + key);
  }
}

CliConfig CliConfig::load(const std::string& path, const std::vector<std::string>& overrides) {
  CliConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ParseError("config: cannot open " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ParseError("config " + path + ":" + std::to_string(lineno) +
                         ": expected 'key = value'");
      cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
  }
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos)
      throw ParseError("config: override '" + o + "' is not key=value");
    cfg.set(trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
  }
  return cfg;
}

}  // namespace motionsphere
