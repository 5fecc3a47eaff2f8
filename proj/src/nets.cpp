#include "ab/nets.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace ab {

Regularizer regularizer_from(const std::string& s) {
  if (s == "none") return Regularizer::kNone;
  if (s == "SN") return Regularizer::kSpectralNorm;
  if (s == "GP") return Regularizer::kGradientPenalty;
  throw Error("unknown regularizer: " + s);
}

std::string to_string(Regularizer r) {
  switch (r) {
    case Regularizer::kNone: return "none";
    case Regularizer::kSpectralNorm: return "SN";
    case Regularizer::kGradientPenalty: return "GP";
  }
  return "?";
}

void MlpSpec::validate() const {
  if (in_dim < 1 || out_dim < 1) throw Error("mlp spec: dims must be positive");
  for (Index h : hidden)
    if (h < 1) throw Error("mlp spec: hidden sizes must be positive");
}

std::vector<Mat*> MlpParams::trainable() {
  std::vector<Mat*> out;
  for (auto& l : layers) {
    out.push_back(&l.W);
    out.push_back(&l.b);
  }
  return out;
}

std::vector<const Mat*> MlpParams::trainable() const {
  std::vector<const Mat*> out;
  for (const auto& l : layers) {
    out.push_back(&l.W);
    out.push_back(&l.b);
  }
  return out;
}

MlpParams mlp_init(const MlpSpec& spec, Rng& rng) {
  spec.validate();
  MlpParams p;
  p.spec = spec;
  std::vector<Index> dims;
  dims.push_back(spec.in_dim);
  for (Index h : spec.hidden) dims.push_back(h);
  dims.push_back(spec.out_dim);
  for (size_t k = 0; k + 1 < dims.size(); ++k) {
    Layer l;
    const double std = std::sqrt(2.0 / static_cast<double>(dims[k]));
    l.W = rng.normal_mat(dims[k], dims[k + 1], std);
    l.b = Mat::Zero(1, dims[k + 1]);
    if (spec.spectral_norm) {
      l.u = rng.normal_mat(dims[k + 1], 1).col(0).normalized();
      l.v = rng.normal_mat(dims[k], 1).col(0).normalized();
      // warm the power-iteration state so the first normalization step
      // already divides by an accurate estimate
      for (int it = 0; it < 30; ++it) {
        l.v = (l.W * l.u).normalized();
        l.u = (l.W.transpose() * l.v).normalized();
      }
    }
    p.layers.push_back(std::move(l));
  }
  return p;
}

Mat mlp_eval(const MlpParams& p, const Mat& X) {
  if (X.cols() != p.spec.in_dim) throw Error("mlp_eval: input dim mismatch");
  Mat h = X;
  for (size_t k = 0; k < p.layers.size(); ++k) {
    Mat pre = h * p.layers[k].W;
    pre.rowwise() += p.layers[k].b.row(0);
    if (k + 1 < p.layers.size())
      h = (pre.array() > 0.0).select(pre, p.spec.lrelu_slope * pre);
    else
      h = std::move(pre);
  }
  return h;
}

Value mlp_node(Graph& g, const MlpParams& p, Value x, bool trainable) {
  if (x.val().cols() != p.spec.in_dim) throw Error("mlp_node: input dim mismatch");
  Value h = x;
  for (size_t k = 0; k < p.layers.size(); ++k) {
    Value W = trainable ? g.param(p.layers[k].W) : g.constant(p.layers[k].W);
    Value b = trainable ? g.param(p.layers[k].b) : g.constant(p.layers[k].b);
    Value pre = add_rowvec(matmul(h, W), b);
    h = (k + 1 < p.layers.size()) ? leaky_relu(pre, p.spec.lrelu_slope) : pre;
  }
  return h;
}

void spectral_normalize(MlpParams& p) {
  if (!p.spec.spectral_norm) throw Error("spectral_normalize: net not tagged for SN");
  for (auto& l : p.layers) {
    l.v = (l.W * l.u).normalized();
    l.u = (l.W.transpose() * l.v).normalized();
    const double sigma = l.v.dot(l.W * l.u);
    if (sigma > 0.0) l.W /= sigma;
  }
}

double top_singular_value(const Mat& W) {
  Eigen::BDCSVD<Mat> svd(W);
  return svd.singularValues()(0);
}

Value input_gradient_node(Graph& g, const MlpParams& p, const Mat& X, bool trainable) {
  if (p.spec.out_dim != 1) throw Error("input_gradient_node: scalar output required");
  if (X.cols() != p.spec.in_dim) throw Error("input_gradient_node: input dim mismatch");
  const size_t L = p.layers.size();
  // forward for the activation masks
  std::vector<Mat> masks(L > 0 ? L - 1 : 0);
  Mat h = X;
  for (size_t k = 0; k + 1 < L; ++k) {
    Mat pre = h * p.layers[k].W;
    pre.rowwise() += p.layers[k].b.row(0);
    masks[k] = (pre.array() > 0.0)
                   .select(Mat::Ones(pre.rows(), pre.cols()), p.spec.lrelu_slope);
    h = pre.cwiseProduct(masks[k]);
  }
  // backprop-as-forward with the masks as constants
  std::vector<Value> Ws;
  for (size_t k = 0; k < L; ++k)
    Ws.push_back(trainable ? g.param(p.layers[k].W) : g.constant(p.layers[k].W));
  Value delta = matmul_bt(g.constant(Mat::Ones(X.rows(), 1)), Ws[L - 1]);
  for (size_t k = L - 1; k-- > 0;) {
    delta = mul(delta, g.constant(masks[k]));
    delta = matmul_bt(delta, Ws[k]);
  }
  return delta;  // n x in_dim
}

std::vector<Mat*> EncoderParams::trainable() {
  std::vector<Mat*> out = trunk.trainable();
  out.push_back(&mu_head.W);
  out.push_back(&mu_head.b);
  out.push_back(&logsig_head.W);
  out.push_back(&logsig_head.b);
  return out;
}

EncoderParams encoder_init(Index in_dim, const std::vector<Index>& hidden, Index d_z,
                           double slope, Rng& rng) {
  if (hidden.empty()) throw Error("encoder_init: needs >= 1 trunk layer");
  EncoderParams e;
  MlpSpec trunk_spec;
  trunk_spec.in_dim = in_dim;
  trunk_spec.out_dim = hidden.back();
  trunk_spec.hidden.assign(hidden.begin(), hidden.end() - 1);
  trunk_spec.lrelu_slope = slope;
  e.trunk = mlp_init(trunk_spec, rng);
  const double std = std::sqrt(2.0 / static_cast<double>(hidden.back()));
  e.mu_head.W = rng.normal_mat(hidden.back(), d_z, std);
  e.mu_head.b = Mat::Zero(1, d_z);
  e.logsig_head.W = rng.normal_mat(hidden.back(), d_z, std);
  e.logsig_head.b = Mat::Zero(1, d_z);
  return e;
}

namespace {

// trunk output with the last layer activated too
Mat trunk_eval(const MlpParams& p, const Mat& X) {
  Mat h = X;
  for (const auto& l : p.layers) {
    Mat pre = h * l.W;
    pre.rowwise() += l.b.row(0);
    h = (pre.array() > 0.0).select(pre, p.spec.lrelu_slope * pre);
  }
  return h;
}

Value trunk_node(Graph& g, const MlpParams& p, Value x, bool trainable) {
  Value h = x;
  for (const auto& l : p.layers) {
    Value W = trainable ? g.param(l.W) : g.constant(l.W);
    Value b = trainable ? g.param(l.b) : g.constant(l.b);
    h = leaky_relu(add_rowvec(matmul(h, W), b), p.spec.lrelu_slope);
  }
  return h;
}

}  // namespace

std::pair<Mat, Mat> encoder_eval(const EncoderParams& p, const Mat& X) {
  Mat h = trunk_eval(p.trunk, X);
  Mat mu = h * p.mu_head.W;
  mu.rowwise() += p.mu_head.b.row(0);
  Mat ls = h * p.logsig_head.W;
  ls.rowwise() += p.logsig_head.b.row(0);
  ls = ls.array().min(kLogSigMax).max(kLogSigMin);
  return {mu, ls};
}

std::pair<Value, Value> encoder_node(Graph& g, const EncoderParams& p, Value x,
                                     bool trainable) {
  Value h = trunk_node(g, p.trunk, x, trainable);
  Value muW = trainable ? g.param(p.mu_head.W) : g.constant(p.mu_head.W);
  Value mub = trainable ? g.param(p.mu_head.b) : g.constant(p.mu_head.b);
  Value lsW = trainable ? g.param(p.logsig_head.W) : g.constant(p.logsig_head.W);
  Value lsb = trainable ? g.param(p.logsig_head.b) : g.constant(p.logsig_head.b);
  Value mu = add_rowvec(matmul(h, muW), mub);
  Value ls = clamp(add_rowvec(matmul(h, lsW), lsb), kLogSigMin, kLogSigMax);
  return {mu, ls};
}

}  // namespace ab
