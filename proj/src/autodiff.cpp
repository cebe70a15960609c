#include "motionsphere/autodiff.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace motionsphere::ad {

namespace {

double sinc_stable(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// d/dx sin(x)/x = (x cos x - sin x) / x^2, series near 0 to dodge the
// cancellation of the two large terms.
double sinc_grad_stable(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return -x / 3.0 + x * x2 / 30.0;
  }
  return (x * std::cos(x) - std::sin(x)) / (x * x);
}

}  // namespace

Graph::Node Graph::make_node(Op op, int a, int b) {
  Node n;
  n.op = op;
  n.a = a;
  n.b = b;
  return n;
}

int Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void Graph::check_same_shape(int a, int b, const char* what) const {
  const Node &na = node(a), &nb = node(b);
  if (na.val.rows() != nb.val.rows() || na.val.cols() != nb.val.cols())
    throw DimensionError(std::string(what) + ": shape mismatch");
}

int Graph::constant(RowMat v) {
  Node n = make_node(Op::kConstant);
  n.val = std::move(v);
  return push(std::move(n));
}

int Graph::leaf(RowMat v) {
  Node n = make_node(Op::kLeaf);
  n.val = std::move(v);
  n.needs_grad = true;
  return push(std::move(n));
}

#define MS_UNARY_PROLOG(name)                    \
  Node n;                                        \
  n.a = a;                                       \
  n.needs_grad = node(a).needs_grad;             \
  const RowMat& av = node(a).val;                \
  (void)av;

int Graph::add(int a, int b) {
  check_same_shape(a, b, "add");
  Node n = make_node(Op::kAdd, a, b);
  n.needs_grad = node(a).needs_grad || node(b).needs_grad;
  n.val = node(a).val + node(b).val;
  return push(std::move(n));
}

int Graph::sub(int a, int b) {
  check_same_shape(a, b, "sub");
  Node n = make_node(Op::kSub, a, b);
  n.needs_grad = node(a).needs_grad || node(b).needs_grad;
  n.val = node(a).val - node(b).val;
  return push(std::move(n));
}

int Graph::mul(int a, int b) {
  check_same_shape(a, b, "mul");
  Node n = make_node(Op::kMul, a, b);
  n.needs_grad = node(a).needs_grad || node(b).needs_grad;
  n.val = node(a).val.cwiseProduct(node(b).val);
  return push(std::move(n));
}

int Graph::neg(int a) {
  MS_UNARY_PROLOG(neg);
  n.op = Op::kNeg;
  n.val = -av;
  return push(std::move(n));
}

int Graph::scale(int a, double c) {
  MS_UNARY_PROLOG(scale);
  n.op = Op::kScale;
  n.c0 = c;
  n.val = c * av;
  return push(std::move(n));
}

int Graph::mul_scalar(int a, int s) {
  if (node(s).val.size() != 1) throw DimensionError("mul_scalar: scalar operand is not 1x1");
  Node n = make_node(Op::kMulScalar, a, s);
  n.needs_grad = node(a).needs_grad || node(s).needs_grad;
  n.val = node(s).val(0, 0) * node(a).val;
  return push(std::move(n));
}

int Graph::matmul(int a, int b) {
  if (node(a).val.cols() != node(b).val.rows())
    throw DimensionError("matmul: inner dimensions differ");
  Node n = make_node(Op::kMatMul, a, b);
  n.needs_grad = node(a).needs_grad || node(b).needs_grad;
  n.val = node(a).val * node(b).val;
  return push(std::move(n));
}

int Graph::transpose(int a) {
  MS_UNARY_PROLOG(transpose);
  n.op = Op::kTranspose;
  n.val = av.transpose();
  return push(std::move(n));
}

int Graph::relu(int a) {
  MS_UNARY_PROLOG(relu);
  n.op = Op::kRelu;
  n.val = av.cwiseMax(0.0);
  return push(std::move(n));
}

int Graph::leaky_relu(int a, double slope) {
  MS_UNARY_PROLOG(leaky_relu);
  n.op = Op::kLeakyRelu;
  n.c0 = slope;
  n.val = av.unaryExpr([slope](double x) { return x > 0.0 ? x : slope * x; });
  return push(std::move(n));
}

// Elementwise derivative factor of (leaky) relu: 1 where x > 0, slope
// elsewhere. Its own derivative is zero.
int Graph::tanh_(int a) {
  MS_UNARY_PROLOG(tanh);
  n.op = Op::kTanh;
  n.val = av.array().tanh();
  return push(std::move(n));
}

int Graph::sin_(int a) {
  MS_UNARY_PROLOG(sin);
  n.op = Op::kSin;
  n.val = av.array().sin();
  return push(std::move(n));
}

int Graph::cos_(int a) {
  MS_UNARY_PROLOG(cos);
  n.op = Op::kCos;
  n.val = av.array().cos();
  return push(std::move(n));
}

int Graph::sqrt_(int a) {
  MS_UNARY_PROLOG(sqrt);
  n.op = Op::kSqrt;
  n.val = av.array().sqrt();
  return push(std::move(n));
}

int Graph::abs_(int a) {
  MS_UNARY_PROLOG(abs);
  n.op = Op::kAbs;
  n.val = av.cwiseAbs();
  return push(std::move(n));
}

int Graph::sign_(int a) {
  MS_UNARY_PROLOG(sign);
  n.op = Op::kSign;
  n.needs_grad = false;  // derivative is zero almost everywhere
  n.val = av.array().sign();
  return push(std::move(n));
}

int Graph::inv(int a) {
  MS_UNARY_PROLOG(inv);
  n.op = Op::kInv;
  n.val = av.cwiseInverse();
  return push(std::move(n));
}

int Graph::sinc_(int a) {
  MS_UNARY_PROLOG(sinc);
  n.op = Op::kSinc;
  n.val = av.unaryExpr([](double x) { return sinc_stable(x); });
  return push(std::move(n));
}

int Graph::sum(int a) {
  MS_UNARY_PROLOG(sum);
  n.op = Op::kSum;
  n.val = RowMat::Constant(1, 1, av.sum());
  return push(std::move(n));
}

int Graph::concat_rows(int a, int b) {
  if (node(a).val.cols() != node(b).val.cols())
    throw DimensionError("concat_rows: column counts differ");
  Node n = make_node(Op::kConcatRows, a, b);
  n.needs_grad = node(a).needs_grad || node(b).needs_grad;
  n.val.resize(node(a).val.rows() + node(b).val.rows(), node(a).val.cols());
  if (node(a).val.rows() > 0) n.val.topRows(node(a).val.rows()) = node(a).val;
  if (node(b).val.rows() > 0) n.val.bottomRows(node(b).val.rows()) = node(b).val;
  return push(std::move(n));
}

int Graph::slice_rows(int a, Eigen::Index r0, Eigen::Index r1) {
  if (r0 < 0 || r1 > node(a).val.rows() || r0 >= r1)
    throw DimensionError("slice_rows: row range out of bounds");
  Node n = make_node(Op::kSliceRows, a);
  n.needs_grad = node(a).needs_grad;
  n.c0 = static_cast<double>(r0);
  n.c1 = static_cast<double>(r1);
  n.val = node(a).val.middleRows(r0, r1 - r0);
  return push(std::move(n));
}

int Graph::reshape(int a, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != node(a).val.size())
    throw DimensionError("reshape: element count changes");
  Node n = make_node(Op::kReshape, a);
  n.needs_grad = node(a).needs_grad;
  n.c0 = static_cast<double>(rows);
  n.c1 = static_cast<double>(cols);
  n.val = Eigen::Map<const RowMat>(node(a).val.data(), rows, cols);
  return push(std::move(n));
}

int Graph::nuclear3(int a) {
  if (node(a).val.rows() != 3 || node(a).val.cols() != 3)
    throw DimensionError("nuclear3: expects a 3x3 matrix");
  Node n = make_node(Op::kNuclear3, a);
  n.needs_grad = node(a).needs_grad;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(Eigen::Matrix3d(node(a).val),
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  n.val = RowMat::Constant(1, 1, svd.singularValues().sum());
  n.aux = svd.matrixU() * svd.matrixV().transpose();
  return push(std::move(n));
}

int Graph::mean(int a) {
  return scale(sum(a), 1.0 / static_cast<double>(node(a).val.size()));
}

int Graph::l1_norm(int a) { return sum(abs_(a)); }

int Graph::l2_norm(int a) { return sqrt_(sum(mul(a, a))); }

int Graph::dot(int a, int b) { return sum(mul(a, b)); }

int Graph::rows_sum(int a) {
  return matmul(a, constant(RowMat::Ones(node(a).val.cols(), 1)));
}

int Graph::repeat_cols(int a, Eigen::Index c) {
  if (node(a).val.cols() != 1) throw DimensionError("repeat_cols: expects a column");
  return matmul(a, constant(RowMat::Ones(1, c)));
}

int Graph::repeat_rows(int a, Eigen::Index r) {
  if (node(a).val.rows() != 1) throw DimensionError("repeat_rows: expects a row");
  return matmul(constant(RowMat::Ones(r, 1)), a);
}

void Graph::accumulate(std::vector<int>& adj, int parent, int g) {
  if (!node(parent).needs_grad) return;
  int& slot = adj[static_cast<std::size_t>(parent)];
  slot = slot < 0 ? g : add(slot, g);
}

void Graph::emit_adjoints(int id, int g, std::vector<int>& adj) {
  // Copy everything needed out of the node up front: the builders below
  // push onto nodes_ and may reallocate, invalidating references.
  const Op op = node(id).op;
  const int pa = node(id).a;
  const int pb = node(id).b;
  const double c0 = node(id).c0;
  const bool ga = pa >= 0 && node(pa).needs_grad;
  const bool gb = pb >= 0 && node(pb).needs_grad;

  switch (op) {
    case Op::kConstant:
    case Op::kLeaf:
    case Op::kLeakyMask:
    case Op::kSign:
      return;
    case Op::kAdd:
      accumulate(adj, pa, g);
      accumulate(adj, pb, g);
      return;
    case Op::kSub:
      accumulate(adj, pa, g);
      if (gb) accumulate(adj, pb, neg(g));
      return;
    case Op::kMul:
      if (ga) accumulate(adj, pa, mul(g, pb));
      if (gb) accumulate(adj, pb, mul(g, pa));
      return;
    case Op::kNeg:
      accumulate(adj, pa, neg(g));
      return;
    case Op::kScale:
      accumulate(adj, pa, scale(g, c0));
      return;
    case Op::kMulScalar:
      if (ga) accumulate(adj, pa, mul_scalar(g, pb));
      if (gb) accumulate(adj, pb, dot(g, pa));
      return;
    case Op::kMatMul:
      if (ga) accumulate(adj, pa, matmul(g, transpose(pb)));
      if (gb) accumulate(adj, pb, matmul(transpose(pa), g));
      return;
    case Op::kTranspose:
      accumulate(adj, pa, transpose(g));
      return;
    case Op::kRelu:
    case Op::kLeakyRelu: {
      const double slope = op == Op::kRelu ? 0.0 : c0;
      Node mask;
      mask.op = Op::kLeakyMask;
      mask.a = pa;
      mask.c0 = slope;
      mask.val = node(pa).val.unaryExpr([slope](double x) { return x > 0.0 ? 1.0 : slope; });
      const int m = push(std::move(mask));
      accumulate(adj, pa, mul(g, m));
      return;
    }
    case Op::kTanh: {
      const int ones = constant(RowMat::Ones(node(id).val.rows(), node(id).val.cols()));
      accumulate(adj, pa, mul(g, sub(ones, mul(id, id))));
      return;
    }
    case Op::kSin:
      accumulate(adj, pa, mul(g, cos_(pa)));
      return;
    case Op::kCos:
      accumulate(adj, pa, neg(mul(g, sin_(pa))));
      return;
    case Op::kSqrt:
      accumulate(adj, pa, mul(g, scale(inv(id), 0.5)));
      return;
    case Op::kAbs:
      accumulate(adj, pa, mul(g, sign_(pa)));
      return;
    case Op::kInv:
      accumulate(adj, pa, neg(mul(g, mul(id, id))));
      return;
    case Op::kSinc: {
      Node d;
      d.op = Op::kSincGrad;
      d.a = pa;
      d.needs_grad = ga;
      d.val = node(pa).val.unaryExpr([](double x) { return sinc_grad_stable(x); });
      const int dn = push(std::move(d));
      accumulate(adj, pa, mul(g, dn));
      return;
    }
    case Op::kSincGrad:
      throw Error("autodiff: third-order derivative through sinc is not supported");
    case Op::kSum: {
      const int ones = constant(RowMat::Ones(node(pa).val.rows(), node(pa).val.cols()));
      accumulate(adj, pa, mul_scalar(ones, g));
      return;
    }
    case Op::kConcatRows: {
      const Eigen::Index ra = node(pa).val.rows();
      const Eigen::Index rb = node(pb).val.rows();
      if (ga) accumulate(adj, pa, slice_rows(g, 0, ra));
      if (gb) accumulate(adj, pb, slice_rows(g, ra, ra + rb));
      return;
    }
    case Op::kSliceRows: {
      const auto r0 = static_cast<Eigen::Index>(c0);
      const auto r1 = static_cast<Eigen::Index>(node(id).c1);
      const Eigen::Index rows = node(pa).val.rows();
      const Eigen::Index cols = node(pa).val.cols();
      int padded = g;
      if (r0 > 0) padded = concat_rows(constant(RowMat::Zero(r0, cols)), padded);
      if (r1 < rows) padded = concat_rows(padded, constant(RowMat::Zero(rows - r1, cols)));
      accumulate(adj, pa, padded);
      return;
    }
    case Op::kReshape: {
      const Eigen::Index rows = node(pa).val.rows();
      const Eigen::Index cols = node(pa).val.cols();
      accumulate(adj, pa, reshape(g, rows, cols));
      return;
    }
    case Op::kNuclear3: {
      // Exact first-order adjoint d(sum sigma)/dM = U V^T; the factors are
      // treated as constants by any further differentiation.
      const int uvt = constant(node(id).aux);
      accumulate(adj, pa, mul_scalar(uvt, g));
      return;
    }
  }
  throw Error("autodiff: unhandled op in backward");
}

std::vector<int> Graph::gradients(int output, const std::vector<int>& wrt) {
  if (node(output).val.size() != 1)
    throw DimensionError("gradients: output must be a scalar (1x1)");

  std::vector<int> adj(static_cast<std::size_t>(output) + 1, -1);
  adj[static_cast<std::size_t>(output)] = constant(RowMat::Ones(1, 1));
  for (int id = output; id >= 0; --id) {
    const int g = adj[static_cast<std::size_t>(id)];
    if (g < 0 || !node(id).needs_grad) continue;
    emit_adjoints(id, g, adj);
  }

  std::vector<int> out;
  out.reserve(wrt.size());
  for (int w : wrt) {
    if (w <= output && adj[static_cast<std::size_t>(w)] >= 0)
      out.push_back(adj[static_cast<std::size_t>(w)]);
    else
      out.push_back(constant(RowMat::Zero(node(w).val.rows(), node(w).val.cols())));
  }
  return out;
}

}  // namespace motionsphere::ad
