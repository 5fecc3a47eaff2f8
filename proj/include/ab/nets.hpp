#pragma once

#include <utility>
#include <vector>

#include "ab/graph.hpp"
#include "ab/rng.hpp"
#include "ab/tensor.hpp"

namespace ab {

enum class Regularizer { kNone, kSpectralNorm, kGradientPenalty };

Regularizer regularizer_from(const std::string& s);
std::string to_string(Regularizer r);

// Affine stack with leaky-ReLU hidden activations and an affine last layer.
struct MlpSpec {
  Index in_dim = 0;
  Index out_dim = 0;
  std::vector<Index> hidden;
  double lrelu_slope = 0.2;
  bool spectral_norm = false;

  void validate() const;
  Index layer_count() const { return static_cast<Index>(hidden.size()) + 1; }
};

struct Layer {
  Mat W;  // in x out
  Mat b;  // 1 x out
  Vec u;  // power-iteration state (out), unit norm when present
  Vec v;  // power-iteration state (in)
};

struct MlpParams {
  MlpSpec spec;
  std::vector<Layer> layers;

  std::vector<Mat*> trainable();  // W1, b1, W2, b2, ...
  std::vector<const Mat*> trainable() const;
};

// weights ~ N(0, 2/fan_in), biases zero
MlpParams mlp_init(const MlpSpec& spec, Rng& rng);

// plain value forward, X is n x in_dim
Mat mlp_eval(const MlpParams& p, const Mat& X);

// graph forward; registers W/b as params when trainable, constants otherwise
Value mlp_node(Graph& g, const MlpParams& p, Value x, bool trainable);

// One power-iteration step per layer, then divide each weight by the
// estimated top singular value, updating u/v in place.
void spectral_normalize(MlpParams& p);

// exact top singular value (SVD); the oracle spectral_normalize is tested against
double top_singular_value(const Mat& W);

// Scalar-output nets only: builds the expression W1^T D1 ... WL^T evaluating
// the input gradient of f at each row of X, with the activation-derivative
// masks taken from the forward pass as constants. Differentiable in the
// weights, so it can feed the gradient penalty.
Value input_gradient_node(Graph& g, const MlpParams& p, const Mat& X, bool trainable);

// Shared trunk of activated layers plus two affine heads for the posterior
// mean and log-stddev; log-sigma is clamped to [-10, 5].
struct EncoderParams {
  MlpParams trunk;  // every layer activated
  Layer mu_head;
  Layer logsig_head;

  Index latent_dim() const { return mu_head.W.cols(); }
  std::vector<Mat*> trainable();
};

EncoderParams encoder_init(Index in_dim, const std::vector<Index>& hidden, Index d_z,
                           double slope, Rng& rng);

std::pair<Mat, Mat> encoder_eval(const EncoderParams& p, const Mat& X);
std::pair<Value, Value> encoder_node(Graph& g, const EncoderParams& p, Value x, bool trainable);

constexpr double kLogSigMin = -10.0;
constexpr double kLogSigMax = 5.0;

}  // namespace ab
