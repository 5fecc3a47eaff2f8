#pragma once

#include <utility>
#include <vector>

#include "ab/tensor.hpp"

namespace ab {

class Graph;

// Lightweight handle to a node owned by a Graph.
struct Value {
  Graph* g = nullptr;
  int id = -1;
  const Mat& val() const;
};

enum class Op : int {
  kConst,
  kParam,
  kAdd,          // a + b, same shape
  kSub,          // a - b
  kNeg,
  kMul,          // elementwise
  kMatMul,       // (n x k)(k x m)
  kMatMulBT,     // a * b^T, a (n x m), b (k x m)
  kScale,        // c0 * a
  kAddScalar,    // a + c0
  kAddRowVec,    // a (n x d) + v (1 x d) broadcast over rows
  kMulRowVec,    // a (n x d) .* v (1 x d) broadcast over rows
  kMulBScalar,   // a .* s, s a 1x1 node
  kAddBScalar,   // a + s,  s a 1x1 node
  kSubBScalar,   // a - s,  s a 1x1 node
  kTileCols,     // x (n x 1) -> n x c0 copies
  kLeakyRelu,    // slope c0
  kExp,
  kLog,
  kSquare,
  kSoftplus,
  kClamp,        // clip to [c0, c1]; counts clipped entries on the graph
  kLogSumExpRows,  // (n x d) -> (n x 1)
  kRowSum,         // (n x d) -> (n x 1)
  kMeanAll,        // -> 1x1
  kSumAll,         // -> 1x1
  kStopGrad,       // value passthrough, zero adjoint into parent
};

struct Node {
  Op op = Op::kConst;
  int a = -1, b = -1;
  double c0 = 0.0, c1 = 0.0;
  Mat value;
  Mat adjoint;
  bool needs_grad = false;
  bool has_adjoint = false;
};

// Dynamically built computation tape. Values are computed eagerly at node
// construction and never mutated afterwards; backward() only writes adjoints.
// Node ids increase in creation order, which is a topological order.
class Graph {
 public:
  Value constant(Mat m);
  Value constant(double s) { return constant(scalar_mat(s)); }
  Value param(Mat m);

  const Mat& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  const Node& node(int id) const { return nodes_[static_cast<size_t>(id)]; }
  int size() const { return static_cast<int>(nodes_.size()); }

  const std::vector<int>& param_ids() const { return params_; }
  // entries clipped by kClamp nodes at construction time
  long clamp_hits() const { return clamp_hits_; }
  void add_clamp_hits(long n) { clamp_hits_ += n; }

  // Reverse-mode sweep from a scalar seed. Fills adjoints for every node on a
  // trainable path; each node is visited exactly once, in reverse creation
  // order. Throws on a non-scalar seed or non-finite parameter gradients.
  void backward(Value seed);

  // adjoint of a node after backward(); zero matrix if the node was off every
  // trainable path
  Mat grad(int id) const;
  Mat grad(Value v) const { return grad(v.id); }

  // gradients of all params in registration order
  std::vector<Mat> param_grads() const;

  Value make(Op op, int a, int b, double c0, double c1, Mat value);

 private:
  std::vector<Node> nodes_;
  std::vector<int> params_;
  long clamp_hits_ = 0;
};

// -- expression-building free functions --------------------------------------

Value add(Value a, Value b);
Value sub(Value a, Value b);
Value neg(Value a);
Value mul(Value a, Value b);
Value matmul(Value a, Value b);
Value matmul_bt(Value a, Value b);
Value scale(Value a, double c);
Value add_scalar(Value a, double c);
Value add_rowvec(Value a, Value v);
Value mul_rowvec(Value a, Value v);
Value mul_bscalar(Value a, Value s);
Value add_bscalar(Value a, Value s);
Value sub_bscalar(Value a, Value s);
Value tile_cols(Value x, Index cols);
Value leaky_relu(Value a, double slope);
Value exp(Value a);
Value log(Value a);
Value square(Value a);
Value softplus(Value a);
Value clamp(Value a, double lo, double hi);
Value logsumexp_rows(Value a);
Value rowsum(Value a);
Value mean_all(Value a);
Value sum_all(Value a);
Value stop_gradient(Value a);

inline Value operator+(Value a, Value b) { return add(a, b); }
inline Value operator-(Value a, Value b) { return sub(a, b); }
inline Value operator-(Value a) { return neg(a); }
inline Value operator*(Value a, Value b) { return mul(a, b); }
inline Value operator*(double c, Value a) { return scale(a, c); }

// value + exact reverse-mode gradients of a scalar node wrt every param leaf
std::pair<double, std::vector<Mat>> forward_backward(Graph& g, Value seed);

// numerically stable scalar helpers shared with plain (non-graph) code
double softplus_stable(double x);
double sigmoid_stable(double x);

}  // namespace ab
