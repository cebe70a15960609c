#include "motionsphere/nets.hpp"

#include <cmath>

namespace motionsphere {

Mlp Mlp::create(const std::vector<int>& dims, const std::vector<Activation>& acts, Rng& rng) {
  if (dims.size() < 2 || acts.size() != dims.size() - 1)
    throw DimensionError("Mlp::create: need one activation per layer");
  Mlp net;
  net.acts = acts;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], out = dims[l + 1];
    if (in < 1 || out < 1) throw DimensionError("Mlp::create: non-positive layer width");
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    RowMat w(in, out);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-limit, limit);
    net.weights.push_back(std::move(w));
    net.biases.push_back(RowMat::Zero(1, out));
  }
  return net;
}

static double apply_act(double x, Activation a) {
  switch (a) {
    case Activation::kLinear: return x;
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
    case Activation::kLeakyRelu02: return x > 0.0 ? x : 0.2 * x;
    case Activation::kTanh: return std::tanh(x);
  }
  throw Error("Mlp: unknown activation");
}

RowMat Mlp::forward(const RowMat& x) const {
  if (x.cols() != weights.front().rows())
    throw DimensionError("Mlp::forward: input width " + std::to_string(x.cols()) +
                         " does not match first layer " + std::to_string(weights.front().rows()));
  RowMat h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    RowMat z = h * weights[l];
    z.rowwise() += biases[l].row(0);
    const Activation a = acts[l];
    h = z.unaryExpr([a](double v) { return apply_act(v, a); });
  }
  return h;
}

std::vector<int> Mlp::Leaves::all() const {
  std::vector<int> ids;
  ids.reserve(w.size() + b.size());
  for (std::size_t l = 0; l < w.size(); ++l) {
    ids.push_back(w[l]);
    ids.push_back(b[l]);
  }
  return ids;
}

Mlp::Leaves Mlp::leaves(ad::Graph& g) const {
  Leaves p;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    p.w.push_back(g.leaf(weights[l]));
    p.b.push_back(g.leaf(biases[l]));
  }
  return p;
}

int Mlp::activate(ad::Graph& g, int id, Activation act) {
  switch (act) {
    case Activation::kLinear: return id;
    case Activation::kRelu: return g.relu(id);
    case Activation::kLeakyRelu02: return g.leaky_relu(id, 0.2);
    case Activation::kTanh: return g.tanh_(id);
  }
  throw Error("Mlp: unknown activation");
}

int Mlp::build(ad::Graph& g, const Leaves& p, int x) const {
  const Eigen::Index batch = g.val(x).rows();
  int h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    int z = g.add(g.matmul(h, p.w[l]), g.repeat_rows(p.b[l], batch));
    h = activate(g, z, acts[l]);
  }
  return h;
}

int Mlp::build_frozen(ad::Graph& g, int x) const {
  const Eigen::Index batch = g.val(x).rows();
  int h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    int z = g.add(g.matmul(h, g.constant(weights[l])), g.repeat_rows(g.constant(biases[l]), batch));
    h = activate(g, z, acts[l]);
  }
  return h;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  return n;
}

void Adam::step(std::vector<RowMat*> params, const std::vector<RowMat>& grads) {
  if (params.size() != grads.size()) throw DimensionError("Adam::step: list sizes differ");
  if (m_.empty()) {
    for (const RowMat* p : params) {
      m_.push_back(RowMat::Zero(p->rows(), p->cols()));
      v_.push_back(RowMat::Zero(p->rows(), p->cols()));
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1_ * m_[i] + (1.0 - b1_) * grads[i];
    v_[i] = b2_ * v_[i] + (1.0 - b2_) * grads[i].cwiseProduct(grads[i]);
    const RowMat mhat = m_[i] / bc1;
    const RowMat vhat = v_[i] / bc2;
    *params[i] -= lr_ * (mhat.array() / (vhat.array().sqrt() + eps_)).matrix();
  }
}

}  // namespace motionsphere
