#pragma once

// Dense networks for the predictor and the critic, in two forms: a plain
// numeric forward pass for inference, and a tape-building forward pass for
// training. Parameters are owned here; Adam keeps its moments alongside.

#include "motionsphere/autodiff.hpp"
#include "motionsphere/common.hpp"

#include <vector>

namespace motionsphere {

enum class Activation : std::uint8_t { kLinear = 0, kRelu = 1, kLeakyRelu02 = 2, kTanh = 3 };

struct Mlp {
  std::vector<RowMat> weights;  // layer l: in_l x out_l
  std::vector<RowMat> biases;   // layer l: 1 x out_l
  std::vector<Activation> acts;

  /// Glorot-uniform weights, zero biases; one activation per layer.
  static Mlp create(const std::vector<int>& dims, const std::vector<Activation>& acts, Rng& rng);

  int in_dim() const { return static_cast<int>(weights.front().rows()); }
  int out_dim() const { return static_cast<int>(weights.back().cols()); }
  std::size_t layer_count() const { return weights.size(); }

  /// Batched numeric forward: rows of x are samples.
  RowMat forward(const RowMat& x) const;

  /// Registers every parameter as a differentiable leaf.
  struct Leaves {
    std::vector<int> w, b;
    std::vector<int> all() const;
  };
  Leaves leaves(ad::Graph& g) const;

  /// Builds the forward pass on the tape from parameter nodes.
  int build(ad::Graph& g, const Leaves& p, int x) const;

  /// Builds the forward pass with parameters as constants (frozen net).
  int build_frozen(ad::Graph& g, int x) const;

  /// Applies activation `act` to node id.
  static int activate(ad::Graph& g, int id, Activation act);

  std::size_t parameter_count() const;
};

/// Standard Adam with bias correction; one slot per parameter tensor.
class Adam {
 public:
  Adam(double lr, double b1, double b2, double eps) : lr_(lr), b1_(b1), b2_(b2), eps_(eps) {}

  /// params and grads are parallel lists of tensors.
  void step(std::vector<RowMat*> params, const std::vector<RowMat>& grads);

 private:
  double lr_, b1_, b2_, eps_;
  long t_ = 0;
  std::vector<RowMat> m_, v_;
};

}  // namespace motionsphere
