#pragma once

// Minimal reverse-mode differentiation over dense 2-D tensors.
//
// Nodes live on a growing tape (the Graph); values are Eigen row-major
// matrices, scalars are 1x1. backward() does not run a numeric sweep:
// it EMITS adjoint computations as new graph nodes, so a gradient is
// itself differentiable. That is what lets the gradient-penalty term
// |grad_x D(x)| be differentiated again with respect to the critic
// parameters.
//
// The nuclear3 op (sum of singular values of a 3x3 matrix) carries an
// exact first-order adjoint built from its SVD factors; differentiating
// through that adjoint a second time is not supported and the sinc
// adjoint throws on third-order requests. Neither limit is reachable
// from the training losses, which need second order only through the
// smooth critic ops.

#include "motionsphere/common.hpp"

#include <cstdint>
#include <vector>

namespace motionsphere::ad {

enum class Op : std::uint8_t {
  kConstant, kLeaf,
  kAdd, kSub, kMul, kNeg, kScale, kMulScalar, kMatMul, kTranspose,
  kRelu, kLeakyRelu, kLeakyMask, kTanh, kSin, kCos, kSqrt, kAbs, kSign,
  kInv, kSinc, kSincGrad,
  kSum, kConcatRows, kSliceRows, kReshape, kNuclear3,
};

class Graph {
 public:
  // -- node construction -----------------------------------------------
  int constant(RowMat v);
  int leaf(RowMat v);                     // differentiable input
  int scalar_constant(double v) { return constant(RowMat::Constant(1, 1, v)); }

  int add(int a, int b);
  int sub(int a, int b);
  int mul(int a, int b);                  // elementwise, same shape
  int neg(int a);
  int scale(int a, double c);
  int mul_scalar(int a, int s);           // s is a 1x1 node
  int matmul(int a, int b);
  int transpose(int a);
  int relu(int a);
  int leaky_relu(int a, double slope);
  int tanh_(int a);
  int sin_(int a);
  int cos_(int a);
  int sqrt_(int a);
  int abs_(int a);
  int sign_(int a);                       // derivative treated as zero
  int inv(int a);                         // elementwise reciprocal
  int sinc_(int a);                       // sin(x)/x, exact at 0
  int sum(int a);                         // 1x1
  int concat_rows(int a, int b);
  int slice_rows(int a, Eigen::Index r0, Eigen::Index r1);
  int reshape(int a, Eigen::Index rows, Eigen::Index cols);
  int nuclear3(int a);                    // 3x3 -> 1x1 sum of singular values

  // -- composed helpers --------------------------------------------------
  int mean(int a);
  int l1_norm(int a);                     // sum of absolute entries
  int l2_norm(int a);                     // Euclidean norm of all entries
  int dot(int a, int b);                  // sum(a .* b)
  int rows_sum(int a);                    // R x C -> R x 1
  int repeat_cols(int a, Eigen::Index c); // R x 1 -> R x C
  int repeat_rows(int a, Eigen::Index r); // 1 x C -> R x C

  // -- evaluation / differentiation --------------------------------------
  /// Reference is invalidated by the next node creation; copy the value
  /// before building further.
  const RowMat& val(int id) const { return nodes_[static_cast<std::size_t>(id)].val; }
  std::size_t size() const { return nodes_.size(); }

  /// Emits adjoint nodes for a scalar output and returns, per requested
  /// node, the id of its gradient (a zero constant when the output does
  /// not depend on it). Gradients stay on the tape and can be composed
  /// and differentiated again.
  std::vector<int> gradients(int output, const std::vector<int>& wrt);

  /// Gradient of a scalar output with respect to one node.
  int input_gradient(int output, int x) { return gradients(output, {x})[0]; }

 private:
  struct Node {
    Op op = Op::kConstant;
    int a = -1, b = -1;
    double c0 = 0.0, c1 = 0.0;  // op attribute (slope, factor, slice range...)
    RowMat val;
    RowMat aux;  // nuclear3 keeps U V^T from the forward SVD
    bool needs_grad = false;
  };

  static Node make_node(Op op, int a = -1, int b = -1);
  int push(Node n);
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  void check_same_shape(int a, int b, const char* what) const;
  /// Appends the adjoint contributions of `id` given its output adjoint.
  void emit_adjoints(int id, int g, std::vector<int>& adj);
  void accumulate(std::vector<int>& adj, int parent, int g);

  std::vector<Node> nodes_;
};

}  // namespace motionsphere::ad
