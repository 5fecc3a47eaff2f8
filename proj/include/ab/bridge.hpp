#pragma once

#include <memory>
#include <vector>

#include "ab/densities.hpp"
#include "ab/graph.hpp"
#include "ab/nets.hpp"

namespace ab {

struct BridgeHyper {
  double sigma2 = 1e-4;    // observation noise of the semi-implicit surrogate
  double exp_clamp = 10.0; // bound M on the ratio exponents a*f and (1-a)*f
  long mc_batch = 50;
  double gp_gamma = 10.0;  // gradient-penalty coefficient

  void validate() const {
    if (!(sigma2 > 0.0)) throw Error("bridge: sigma2 must be > 0");
    if (!(exp_clamp > 0.0)) throw Error("bridge: exponent clamp must be > 0");
  }
};

enum class EstimatorTag { kForward, kReverse, kCombined, kPractical };

struct GradEstimate {
  std::vector<Mat> grads;  // one per model parameter, registration order
  long n = 0;              // samples behind the estimate
  EstimatorTag tag = EstimatorTag::kForward;
  long clamp_hits = 0;     // ratio-exponent entries that hit the bound
  double value = 0.0;      // the weighted surrogate objective behind the estimate
};

// exp(min(max(coef * f, -bound), bound)), counting clipped entries
Vec ratio_weights(const Vec& f, double coef, double bound, long* hits);

// f(x) = log q(x) - log p(x): point values plus a graph expression so the
// pathwise estimator can differentiate through x.
class LogRatio {
 public:
  virtual ~LogRatio() = default;
  virtual Vec values(const Mat& x) const = 0;
  virtual Value build(Graph& g, Value x) const = 0;
};

// exact oracle from two fixed diagonal Gaussians
class ExactGaussianLogRatio : public LogRatio {
 public:
  ExactGaussianLogRatio(Gaussian q, Gaussian p) : q_(std::move(q)), p_(std::move(p)) {}
  Vec values(const Mat& x) const override;
  Value build(Graph& g, Value x) const override;

 private:
  Gaussian q_, p_;
};

// learned discriminator f_beta; beta enters graphs as constants
class DiscLogRatio : public LogRatio {
 public:
  explicit DiscLogRatio(const MlpParams* disc) : disc_(disc) {}
  Vec values(const Mat& x) const override;
  Value build(Graph& g, Value x) const override;

 private:
  const MlpParams* disc_;
};

// graph expression of log N(x; mean, diag var) per row, all constants
Value gaussian_logpdf_node(Graph& g, Value x, const Vec& mean, const Vec& var);

// Data-side score route: per-sample -log p_theta(x) (or its surrogate) with
// theta registered as graph params.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;
  virtual Value neg_logp_node(Graph& g, const Mat& x) const = 0;
};

// Model-side pathwise route: x = G_theta(z) with theta registered.
class PathwiseModel {
 public:
  virtual ~PathwiseModel() = default;
  virtual Value x_node(Graph& g, const Mat& z) const = 0;
};

// N(mu, sigma^2) with (mu, sigma) trainable; serves both estimator routes,
// matching the 1-D study setting.
class Gaussian1dModel : public ScoreModel, public PathwiseModel {
 public:
  Gaussian1dModel(double mu, double sigma) : mu_(mu), sigma_(sigma) {}
  Value neg_logp_node(Graph& g, const Mat& x) const override;  // params: mu, sigma
  Value x_node(Graph& g, const Mat& z) const override;         // x = mu + sigma z
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }
  Gaussian as_gaussian() const {
    return Gaussian::isotropic(Vec::Constant(1, mu_), sigma_ * sigma_);
  }

 private:
  double mu_, sigma_;
};

// semi-implicit surrogate joint: -log N(x | G(z), sigma2 I) - log p(z) with
// z = mu_phi(x) + sigma_phi(x) .* eps held fixed (phi starred)
class SurrogateScoreModel : public ScoreModel {
 public:
  SurrogateScoreModel(const MlpParams* gen, const EncoderParams* enc, const Mat* eps,
                      double sigma2)
      : gen_(gen), enc_(enc), eps_(eps), sigma2_(sigma2) {}
  Value neg_logp_node(Graph& g, const Mat& x) const override;
  Mat posterior_sample(const Mat& x) const;  // the z the node is built on

 private:
  const MlpParams* gen_;
  const EncoderParams* enc_;
  const Mat* eps_;
  double sigma2_;
};

class MlpGenerator : public PathwiseModel {
 public:
  explicit MlpGenerator(const MlpParams* gen) : gen_(gen) {}
  Value x_node(Graph& g, const Mat& z) const override;

 private:
  const MlpParams* gen_;
};

// -- losses -------------------------------------------------------------------

struct LossNodes {
  Value loss;
  std::vector<int> gen_ids;   // generator param node ids, registration order
  std::vector<int> enc_ids;   // encoder param node ids when trained
  std::vector<int> disc_ids;  // discriminator param node ids when trained
};

// negative ELBO of the surrogate joint with reparameterized z and closed-form
// Gaussian KL; minimizing it ascends the bound
LossNodes elbo_loss_node(Graph& g, const MlpParams& gen, const EncoderParams& enc,
                         const Mat& x, const Mat& eps, double sigma2, bool train_gen,
                         bool train_enc);

// the ratio game objective, negated so minimizing trains beta; softplus form
LossNodes disc_loss_node(Graph& g, const MlpParams& disc, const Mat& x_real,
                         const Mat& x_fake);

// mean -f(G(z)); the reverse-KL generator loss
LossNodes rkl_gen_loss_node(Graph& g, const MlpParams& gen, const LogRatio& ratio,
                            const Mat& z);
LossNodes rkl_gen_loss_node(Graph& g, const PathwiseModel& model, const LogRatio& ratio,
                            const Mat& z);

// the Eq. 4 objective negated, evaluated on discriminator outputs
double disc_loss_value(const Vec& f_real, const Vec& f_fake);

// (gamma/2) mean ||d f/d x||^2 over real samples, differentiable in beta
LossNodes gp_penalty_node(Graph& g, const MlpParams& disc, const Mat& x_real,
                          double gp_gamma);

// -- twin alpha-divergence gradient estimators ---------------------------------

// data-side expectation with weight (p/q)^alpha = e^(-alpha f)
GradEstimate alpha_forward_grad(const ScoreModel& model, const LogRatio& ratio, const Mat& x,
                                double alpha, const BridgeHyper& hyper);

// model-side pathwise expectation with weight (q/p)^(1-alpha) = e^((1-alpha) f)
GradEstimate alpha_reverse_grad(const PathwiseModel& model, const LogRatio& ratio,
                                const Mat& z, double alpha, const BridgeHyper& hyper);

// (1-gamma) F + gamma R; stays unbiased for any gamma in [0,1]
GradEstimate combine_grads(const GradEstimate& f_est, const GradEstimate& r_est,
                           double gamma);

// the practical bridge gradient with f_beta (or an oracle) replacing f*; both
// terms fused into one backward pass over theta
GradEstimate bridge_grad(const MlpParams& gen, const EncoderParams& enc,
                         const LogRatio& ratio, const Mat& x, const Mat& eps, const Mat& z,
                         double alpha, double gamma, const BridgeHyper& hyper);

// single stop-gradient objective whose AD theta-gradient equals bridge_grad
// on the same batches
LossNodes cycle_loss_node(Graph& g, const MlpParams& gen, const EncoderParams& enc,
                          const LogRatio& ratio, const Mat& x, const Mat& eps, const Mat& z,
                          double alpha, double gamma, const BridgeHyper& hyper);

}  // namespace ab
