#include "ab/graph.hpp"

#include <cmath>

namespace ab {

const Mat& Value::val() const { return g->value(id); }

double softplus_stable(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid_stable(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Value Graph::make(Op op, int a, int b, double c0, double c1, Mat value) {
  Node n;
  n.op = op;
  n.a = a;
  n.b = b;
  n.c0 = c0;
  n.c1 = c1;
  n.value = std::move(value);
  if (op == Op::kParam) {
    n.needs_grad = true;
  } else if (op != Op::kConst && op != Op::kStopGrad) {
    const bool pa = a >= 0 && nodes_[static_cast<size_t>(a)].needs_grad;
    const bool pb = b >= 0 && nodes_[static_cast<size_t>(b)].needs_grad;
    n.needs_grad = pa || pb;
  }
  nodes_.push_back(std::move(n));
  return Value{this, static_cast<int>(nodes_.size()) - 1};
}

Value Graph::constant(Mat m) { return make(Op::kConst, -1, -1, 0, 0, std::move(m)); }

Value Graph::param(Mat m) {
  Value v = make(Op::kParam, -1, -1, 0, 0, std::move(m));
  params_.push_back(v.id);
  return v;
}

namespace {

void accumulate(Node& parent, const Mat& delta) {
  if (!parent.needs_grad) return;
  if (!parent.has_adjoint) {
    parent.adjoint = delta;
    parent.has_adjoint = true;
  } else {
    parent.adjoint += delta;
  }
}

Mat softmax_rows(const Mat& a) {
  Mat out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    const double m = a.row(i).maxCoeff();
    Eigen::ArrayXd e = (a.row(i).array() - m).exp();
    out.row(i) = (e / e.sum()).matrix();
  }
  return out;
}

}  // namespace

void Graph::backward(Value seed) {
  if (seed.g != this) throw Error("backward: seed from another graph");
  const Mat& sv = value(seed.id);
  if (sv.rows() != 1 || sv.cols() != 1) throw Error("backward: seed must be scalar");
  for (auto& n : nodes_) {
    n.has_adjoint = false;
    n.adjoint.resize(0, 0);
  }
  Node& s = nodes_[static_cast<size_t>(seed.id)];
  if (!s.needs_grad) return;  // no trainable leaf under the seed
  s.adjoint = scalar_mat(1.0);
  s.has_adjoint = true;

  for (int i = seed.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    if (!n.has_adjoint || !n.needs_grad) continue;
    const Mat& adj = n.adjoint;
    Node* pa = n.a >= 0 ? &nodes_[static_cast<size_t>(n.a)] : nullptr;
    Node* pb = n.b >= 0 ? &nodes_[static_cast<size_t>(n.b)] : nullptr;
    switch (n.op) {
      case Op::kConst:
      case Op::kParam:
      case Op::kStopGrad:
        break;
      case Op::kAdd:
        accumulate(*pa, adj);
        accumulate(*pb, adj);
        break;
      case Op::kSub:
        accumulate(*pa, adj);
        accumulate(*pb, -adj);
        break;
      case Op::kNeg:
        accumulate(*pa, -adj);
        break;
      case Op::kMul:
        accumulate(*pa, adj.cwiseProduct(pb->value));
        accumulate(*pb, adj.cwiseProduct(pa->value));
        break;
      case Op::kMatMul:
        accumulate(*pa, adj * pb->value.transpose());
        accumulate(*pb, pa->value.transpose() * adj);
        break;
      case Op::kMatMulBT:
        accumulate(*pa, adj * pb->value);
        accumulate(*pb, adj.transpose() * pa->value);
        break;
      case Op::kScale:
        accumulate(*pa, n.c0 * adj);
        break;
      case Op::kAddScalar:
        accumulate(*pa, adj);
        break;
      case Op::kAddRowVec:
        accumulate(*pa, adj);
        accumulate(*pb, adj.colwise().sum());
        break;
      case Op::kMulRowVec:
        accumulate(*pa, adj.array().rowwise() * pb->value.row(0).array());
        accumulate(*pb, (adj.cwiseProduct(pa->value)).colwise().sum());
        break;
      case Op::kMulBScalar:
        accumulate(*pa, adj * pb->value(0, 0));
        accumulate(*pb, scalar_mat(adj.cwiseProduct(pa->value).sum()));
        break;
      case Op::kAddBScalar:
        accumulate(*pa, adj);
        accumulate(*pb, scalar_mat(adj.sum()));
        break;
      case Op::kSubBScalar:
        accumulate(*pa, adj);
        accumulate(*pb, scalar_mat(-adj.sum()));
        break;
      case Op::kTileCols:
        accumulate(*pa, adj.rowwise().sum());
        break;
      case Op::kLeakyRelu: {
        Mat mask = (pa->value.array() > 0.0).select(Mat::Ones(adj.rows(), adj.cols()), n.c0);
        accumulate(*pa, adj.cwiseProduct(mask));
        break;
      }
      case Op::kExp:
        accumulate(*pa, adj.cwiseProduct(n.value));
        break;
      case Op::kLog:
        accumulate(*pa, adj.cwiseQuotient(pa->value));
        break;
      case Op::kSquare:
        accumulate(*pa, 2.0 * adj.cwiseProduct(pa->value));
        break;
      case Op::kSoftplus: {
        Mat sig = pa->value.unaryExpr([](double x) { return sigmoid_stable(x); });
        accumulate(*pa, adj.cwiseProduct(sig));
        break;
      }
      case Op::kClamp: {
        Mat inside = ((pa->value.array() > n.c0) && (pa->value.array() < n.c1))
                         .select(Mat::Ones(adj.rows(), adj.cols()), 0.0);
        accumulate(*pa, adj.cwiseProduct(inside));
        break;
      }
      case Op::kLogSumExpRows: {
        Mat soft = softmax_rows(pa->value);
        accumulate(*pa, soft.array().colwise() * adj.col(0).array());
        break;
      }
      case Op::kRowSum:
        accumulate(*pa, adj.col(0).replicate(1, pa->value.cols()));
        break;
      case Op::kMeanAll: {
        const double w = adj(0, 0) / static_cast<double>(pa->value.size());
        accumulate(*pa, Mat::Constant(pa->value.rows(), pa->value.cols(), w));
        break;
      }
      case Op::kSumAll:
        accumulate(*pa, Mat::Constant(pa->value.rows(), pa->value.cols(), adj(0, 0)));
        break;
    }
  }
  for (int id : params_) {
    const Node& p = nodes_[static_cast<size_t>(id)];
    if (p.has_adjoint && !p.adjoint.allFinite())
      throw Error("backward: non-finite parameter gradient");
  }
}

Mat Graph::grad(int id) const {
  const Node& n = nodes_[static_cast<size_t>(id)];
  if (n.has_adjoint) return n.adjoint;
  return Mat::Zero(n.value.rows(), n.value.cols());
}

std::vector<Mat> Graph::param_grads() const {
  std::vector<Mat> out;
  out.reserve(params_.size());
  for (int id : params_) out.push_back(grad(id));
  return out;
}

std::pair<double, std::vector<Mat>> forward_backward(Graph& g, Value seed) {
  g.backward(seed);
  return {g.value(seed.id)(0, 0), g.param_grads()};
}

// -- op constructors ----------------------------------------------------------

namespace {
Graph* same_graph(Value a, Value b) {
  if (a.g != b.g) throw Error("operands belong to different graphs");
  return a.g;
}
void check_same_shape(const Mat& x, const Mat& y, const char* op) {
  if (!same_shape(x, y)) throw Error(std::string(op) + ": shape mismatch");
}
}  // namespace

Value add(Value a, Value b) {
  Graph* g = same_graph(a, b);
  check_same_shape(a.val(), b.val(), "add");
  return g->make(Op::kAdd, a.id, b.id, 0, 0, a.val() + b.val());
}

Value sub(Value a, Value b) {
  Graph* g = same_graph(a, b);
  check_same_shape(a.val(), b.val(), "sub");
  return g->make(Op::kSub, a.id, b.id, 0, 0, a.val() - b.val());
}

Value neg(Value a) { return a.g->make(Op::kNeg, a.id, -1, 0, 0, -a.val()); }

Value mul(Value a, Value b) {
  Graph* g = same_graph(a, b);
  check_same_shape(a.val(), b.val(), "mul");
  return g->make(Op::kMul, a.id, b.id, 0, 0, a.val().cwiseProduct(b.val()));
}

Value matmul(Value a, Value b) {
  Graph* g = same_graph(a, b);
  if (a.val().cols() != b.val().rows()) throw Error("matmul: inner dim mismatch");
  return g->make(Op::kMatMul, a.id, b.id, 0, 0, a.val() * b.val());
}

Value matmul_bt(Value a, Value b) {
  Graph* g = same_graph(a, b);
  if (a.val().cols() != b.val().cols()) throw Error("matmul_bt: inner dim mismatch");
  return g->make(Op::kMatMulBT, a.id, b.id, 0, 0, a.val() * b.val().transpose());
}

Value scale(Value a, double c) { return a.g->make(Op::kScale, a.id, -1, c, 0, c * a.val()); }

Value add_scalar(Value a, double c) {
  return a.g->make(Op::kAddScalar, a.id, -1, c, 0, a.val().array() + c);
}

Value add_rowvec(Value a, Value v) {
  Graph* g = same_graph(a, v);
  if (v.val().rows() != 1 || v.val().cols() != a.val().cols())
    throw Error("add_rowvec: v must be 1 x cols(a)");
  Mat out = a.val();
  out.rowwise() += v.val().row(0);
  return g->make(Op::kAddRowVec, a.id, v.id, 0, 0, std::move(out));
}

Value mul_rowvec(Value a, Value v) {
  Graph* g = same_graph(a, v);
  if (v.val().rows() != 1 || v.val().cols() != a.val().cols())
    throw Error("mul_rowvec: v must be 1 x cols(a)");
  Mat out = a.val().array().rowwise() * v.val().row(0).array();
  return g->make(Op::kMulRowVec, a.id, v.id, 0, 0, std::move(out));
}

Value mul_bscalar(Value a, Value s) {
  Graph* g = same_graph(a, s);
  if (s.val().size() != 1) throw Error("mul_bscalar: s must be 1x1");
  return g->make(Op::kMulBScalar, a.id, s.id, 0, 0, a.val() * s.val()(0, 0));
}

Value add_bscalar(Value a, Value s) {
  Graph* g = same_graph(a, s);
  if (s.val().size() != 1) throw Error("add_bscalar: s must be 1x1");
  return g->make(Op::kAddBScalar, a.id, s.id, 0, 0, a.val().array() + s.val()(0, 0));
}

Value sub_bscalar(Value a, Value s) {
  Graph* g = same_graph(a, s);
  if (s.val().size() != 1) throw Error("sub_bscalar: s must be 1x1");
  return g->make(Op::kSubBScalar, a.id, s.id, 0, 0, a.val().array() - s.val()(0, 0));
}

Value tile_cols(Value x, Index cols) {
  if (x.val().cols() != 1) throw Error("tile_cols: x must be n x 1");
  return x.g->make(Op::kTileCols, x.id, -1, static_cast<double>(cols), 0,
                   x.val().replicate(1, cols));
}

Value leaky_relu(Value a, double slope) {
  Mat out = (a.val().array() > 0.0).select(a.val(), slope * a.val());
  return a.g->make(Op::kLeakyRelu, a.id, -1, slope, 0, std::move(out));
}

Value exp(Value a) { return a.g->make(Op::kExp, a.id, -1, 0, 0, a.val().array().exp()); }

Value log(Value a) { return a.g->make(Op::kLog, a.id, -1, 0, 0, a.val().array().log()); }

Value square(Value a) {
  return a.g->make(Op::kSquare, a.id, -1, 0, 0, a.val().array().square());
}

Value softplus(Value a) {
  Mat out = a.val().unaryExpr([](double x) { return softplus_stable(x); });
  return a.g->make(Op::kSoftplus, a.id, -1, 0, 0, std::move(out));
}

Value clamp(Value a, double lo, double hi) {
  if (!(lo < hi)) throw Error("clamp: lo must be < hi");
  const long hits = (a.val().array() <= lo).count() + (a.val().array() >= hi).count();
  a.g->add_clamp_hits(hits);
  Mat out = a.val().array().min(hi).max(lo);
  return a.g->make(Op::kClamp, a.id, -1, lo, hi, std::move(out));
}

Value logsumexp_rows(Value a) {
  const Mat& x = a.val();
  Mat out(x.rows(), 1);
  for (Index i = 0; i < x.rows(); ++i) {
    const double m = x.row(i).maxCoeff();
    out(i, 0) = m + std::log((x.row(i).array() - m).exp().sum());
  }
  return a.g->make(Op::kLogSumExpRows, a.id, -1, 0, 0, std::move(out));
}

Value rowsum(Value a) {
  return a.g->make(Op::kRowSum, a.id, -1, 0, 0, a.val().rowwise().sum());
}

Value mean_all(Value a) {
  return a.g->make(Op::kMeanAll, a.id, -1, 0, 0, scalar_mat(a.val().mean()));
}

Value sum_all(Value a) {
  return a.g->make(Op::kSumAll, a.id, -1, 0, 0, scalar_mat(a.val().sum()));
}

Value stop_gradient(Value a) { return a.g->make(Op::kStopGrad, a.id, -1, 0, 0, a.val()); }

}  // namespace ab
