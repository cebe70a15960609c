#include "motionsphere/gan.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint parameter block is little-endian");

namespace motionsphere::gan {

namespace {

void put_mat(std::vector<double>& out, const RowMat& m) {
  out.insert(out.end(), m.data(), m.data() + m.size());
}

RowMat take_mat(const std::vector<double>& in, std::size_t& pos, Eigen::Index r, Eigen::Index c) {
  if (pos + static_cast<std::size_t>(r * c) > in.size())
    throw ParseError("checkpoint: parameter block truncated");
  RowMat m = Eigen::Map<const RowMat>(in.data() + pos, r, c);
  pos += static_cast<std::size_t>(r * c);
  return m;
}

std::string act_code(const std::vector<Activation>& acts) {
  std::string s;
  for (Activation a : acts) {
    if (!s.empty()) s += " ";
    s += std::to_string(static_cast<int>(a));
  }
  return s;
}

std::vector<Activation> parse_acts(std::istringstream ss) {
  std::vector<Activation> acts;
  int code;
  while (ss >> code) acts.push_back(static_cast<Activation>(code));
  return acts;
}

std::string int_list(const std::vector<int>& v) {
  std::string s;
  for (int x : v) {
    if (!s.empty()) s += " ";
    s += std::to_string(x);
  }
  return s;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::istringstream ss(s);
  std::vector<int> v;
  int x;
  while (ss >> x) v.push_back(x);
  return v;
}

void write_mlp_header(std::ostream& os, const char* prefix, const Mlp& net) {
  os << prefix << "_layers = " << net.layer_count() << "\n";
  os << prefix << "_dims =";
  os << " " << net.weights.front().rows();
  for (const RowMat& w : net.weights) os << " " << w.cols();
  os << "\n";
  os << prefix << "_acts = " << act_code(net.acts) << "\n";
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("checkpoint: cannot write " + path);
  const TrainConfig& c = ckpt.config;

  std::ostringstream os;
  os << "motionsphere checkpoint v" << ckpt.format_version << "\n";
  os << "joints = " << ckpt.joints << "\n";
  os << "prior_len = " << ckpt.prior_len << "\n";
  os << "future_len = " << ckpt.future_len << "\n";
  os << "fps = " << format_double(ckpt.fps) << "\n";
  os << "mu_rows = " << ckpt.mu.rows() << "\n";
  os << "mu_cols = " << ckpt.mu.cols() << "\n";
  os << "norm_root = " << ckpt.normalization.root << "\n";
  os << "norm_scale = " << format_double(ckpt.normalization.norm) << "\n";
  os << "scale_ratio_mean = " << format_double(ckpt.scale_ratio_mean) << "\n";
  os << "scale_future_mean = " << format_double(ckpt.scale_future_mean) << "\n";
  os << "beta1 = " << format_double(c.beta1) << "\n";
  os << "beta2 = " << format_double(c.beta2) << "\n";
  os << "beta3 = " << format_double(c.beta3) << "\n";
  os << "beta4 = " << format_double(c.beta4) << "\n";
  os << "lambda = " << format_double(c.lambda) << "\n";
  os << "lr = " << format_double(c.lr) << "\n";
  os << "batch = " << c.batch << "\n";
  os << "epochs = " << c.epochs << "\n";
  os << "seed = " << c.seed << "\n";
  os << "loss_ls = " << (c.loss_ls ? 1 : 0) << "\n";
  os << "loss_lb = " << (c.loss_lb ? 1 : 0) << "\n";
  os << "mu_source = " << to_string(c.mu_source) << "\n";
  os << "scale_policy = " << to_string(c.scale_policy) << "\n";
  os << "adam_b1 = " << format_double(c.adam_b1) << "\n";
  os << "adam_b2 = " << format_double(c.adam_b2) << "\n";
  os << "adam_eps = " << format_double(c.adam_eps) << "\n";
  os << "gen_hidden = " << int_list(c.gen_hidden) << "\n";
  os << "critic_hidden = " << int_list(c.critic_hidden) << "\n";
  os << "karcher_eps = " << format_double(c.karcher.epsilon) << "\n";
  os << "karcher_tau = " << format_double(c.karcher.threshold) << "\n";
  os << "karcher_max_iters = " << c.karcher.max_iters << "\n";
  write_mlp_header(os, "gen", ckpt.generator);
  write_mlp_header(os, "critic", ckpt.critic);

  std::vector<double> block;
  put_mat(block, RowMat(ckpt.normalization.mean_pose));
  put_mat(block, ckpt.mu);
  for (std::size_t l = 0; l < ckpt.generator.weights.size(); ++l) {
    put_mat(block, ckpt.generator.weights[l]);
    put_mat(block, ckpt.generator.biases[l]);
  }
  for (std::size_t l = 0; l < ckpt.critic.weights.size(); ++l) {
    put_mat(block, ckpt.critic.weights[l]);
    put_mat(block, ckpt.critic.biases[l]);
  }
  os << "binary_doubles = " << block.size() << "\n";
  os << "BINARY\n";

  const std::string header = os.str();
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(block.data()),
            static_cast<std::streamsize>(block.size() * sizeof(double)));
  if (!out) throw ParseError("checkpoint: short write to " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("checkpoint: cannot open " + path);

  std::string line;
  if (!std::getline(in, line) || line.rfind("motionsphere checkpoint v", 0) != 0)
    throw ParseError("checkpoint " + path + ": bad magic line");

  Checkpoint ckpt;
  ckpt.format_version = std::stoi(line.substr(std::string("motionsphere checkpoint v").size()));
  if (ckpt.format_version != 1)
    throw ParseError("checkpoint " + path + ": unsupported format version");

  std::map<std::string, std::string> kv;
  std::size_t block_len = 0;
  while (std::getline(in, line)) {
    if (line == "BINARY") break;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos)
      throw ParseError("checkpoint " + path + ": malformed header line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("checkpoint " + path + ": missing key " + key);
    return it->second;
  };

  TrainConfig& c = ckpt.config;
  ckpt.joints = std::stoi(need("joints"));
  ckpt.prior_len = std::stol(need("prior_len"));
  ckpt.future_len = std::stol(need("future_len"));
  ckpt.fps = std::stod(need("fps"));
  const Eigen::Index mu_rows = std::stol(need("mu_rows"));
  const Eigen::Index mu_cols = std::stol(need("mu_cols"));
  ckpt.normalization.root = std::stoi(need("norm_root"));
  ckpt.normalization.norm = std::stod(need("norm_scale"));
  ckpt.scale_ratio_mean = std::stod(need("scale_ratio_mean"));
  ckpt.scale_future_mean = std::stod(need("scale_future_mean"));
  c.beta1 = std::stod(need("beta1"));
  c.beta2 = std::stod(need("beta2"));
  c.beta3 = std::stod(need("beta3"));
  c.beta4 = std::stod(need("beta4"));
  c.lambda = std::stod(need("lambda"));
  c.lr = std::stod(need("lr"));
  c.batch = std::stoi(need("batch"));
  c.epochs = std::stoi(need("epochs"));
  c.seed = std::stoull(need("seed"));
  c.loss_ls = need("loss_ls") == "1";
  c.loss_lb = need("loss_lb") == "1";
  c.mu_source = mu_source_from_string(need("mu_source"));
  c.scale_policy = scale_policy_from_string(need("scale_policy"));
  c.adam_b1 = std::stod(need("adam_b1"));
  c.adam_b2 = std::stod(need("adam_b2"));
  c.adam_eps = std::stod(need("adam_eps"));
  c.gen_hidden = parse_int_list(need("gen_hidden"));
  c.critic_hidden = parse_int_list(need("critic_hidden"));
  c.karcher.epsilon = std::stod(need("karcher_eps"));
  c.karcher.threshold = std::stod(need("karcher_tau"));
  c.karcher.max_iters = std::stoi(need("karcher_max_iters"));
  block_len = std::stoull(need("binary_doubles"));

  std::vector<double> block(block_len);
  in.read(reinterpret_cast<char*>(block.data()),
          static_cast<std::streamsize>(block_len * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != block_len * sizeof(double))
    throw ParseError("checkpoint " + path + ": parameter block truncated");

  std::size_t pos = 0;
  ckpt.normalization.mean_pose = take_mat(block, pos, ckpt.joints, 3);
  ckpt.mu = take_mat(block, pos, mu_rows, mu_cols);

  auto read_mlp = [&](const char* prefix) {
    const auto layers = static_cast<std::size_t>(std::stoul(need(std::string(prefix) + "_layers")));
    const std::vector<int> dims = parse_int_list(need(std::string(prefix) + "_dims"));
    std::vector<Activation> acts =
        parse_acts(std::istringstream(need(std::string(prefix) + "_acts")));
    if (dims.size() != layers + 1 || acts.size() != layers)
      throw ParseError("checkpoint " + path + ": inconsistent " + prefix + " shape header");
    Mlp net;
    net.acts = std::move(acts);
    for (std::size_t l = 0; l < layers; ++l) {
      net.weights.push_back(take_mat(block, pos, dims[l], dims[l + 1]));
      net.biases.push_back(take_mat(block, pos, 1, dims[l + 1]));
    }
    return net;
  };
  ckpt.generator = read_mlp("gen");
  ckpt.critic = read_mlp("critic");
  if (pos != block.size()) throw ParseError("checkpoint " + path + ": trailing parameter data");
  return ckpt;
}

}  // namespace motionsphere::gan
