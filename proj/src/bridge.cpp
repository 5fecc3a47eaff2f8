#include "ab/bridge.hpp"

#include <cmath>

namespace ab {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

Vec ratio_weights(const Vec& f, double coef, double bound, long* hits) {
  Vec out(f.size());
  long h = 0;
  for (Index i = 0; i < f.size(); ++i) {
    double e = coef * f(i);
    if (e <= -bound) {
      e = -bound;
      ++h;
    } else if (e >= bound) {
      e = bound;
      ++h;
    }
    out(i) = std::exp(e);
  }
  if (hits) *hits += h;
  return out;
}

Value gaussian_logpdf_node(Graph& g, Value x, const Vec& mean, const Vec& var) {
  const Index d = mean.size();
  if (x.val().cols() != d) throw Error("gaussian_logpdf_node: dimension mismatch");
  Value diff = add_rowvec(x, g.constant(Mat(-mean.transpose())));
  Value sq = square(diff);
  Mat half_inv = (0.5 / var.array()).matrix().transpose();
  Value quad = rowsum(mul_rowvec(sq, g.constant(half_inv)));
  double c = 0.0;
  for (Index i = 0; i < d; ++i) c += -0.5 * (std::log(var(i)) + kLog2Pi);
  return add_scalar(neg(quad), c);
}

Vec ExactGaussianLogRatio::values(const Mat& x) const {
  return logpdf_rows(q_, x) - logpdf_rows(p_, x);
}

Value ExactGaussianLogRatio::build(Graph& g, Value x) const {
  Value lq = gaussian_logpdf_node(g, x, q_.mean, q_.var);
  Value lp = gaussian_logpdf_node(g, x, p_.mean, p_.var);
  return sub(lq, lp);
}

Vec DiscLogRatio::values(const Mat& x) const { return mlp_eval(*disc_, x).col(0); }

Value DiscLogRatio::build(Graph& g, Value x) const {
  return mlp_node(g, *disc_, x, /*trainable=*/false);
}

Value Gaussian1dModel::neg_logp_node(Graph& g, const Mat& x) const {
  if (x.cols() != 1) throw Error("Gaussian1dModel: x must be n x 1");
  Value mu = g.param(scalar_mat(mu_));
  Value sig = g.param(scalar_mat(sigma_));
  Value logsig = log(sig);
  Value half_inv_var = scale(exp(scale(logsig, -2.0)), 0.5);  // 1/(2 sigma^2)
  Value quad = mul_bscalar(square(sub_bscalar(g.constant(Mat(x)), mu)), half_inv_var);
  return add_scalar(add_bscalar(quad, logsig), 0.5 * kLog2Pi);
}

Value Gaussian1dModel::x_node(Graph& g, const Mat& z) const {
  if (z.cols() != 1) throw Error("Gaussian1dModel: z must be n x 1");
  Value mu = g.param(scalar_mat(mu_));
  Value sig = g.param(scalar_mat(sigma_));
  return add_bscalar(mul_bscalar(g.constant(Mat(z)), sig), mu);
}

Mat SurrogateScoreModel::posterior_sample(const Mat& x) const {
  auto [mu, logsig] = encoder_eval(*enc_, x);
  return mu.array() + logsig.array().exp() * eps_->array();
}

Value SurrogateScoreModel::neg_logp_node(Graph& g, const Mat& x) const {
  const Mat z = posterior_sample(x);
  Value gz = mlp_node(g, *gen_, g.constant(z), /*trainable=*/true);
  Value resid = sub(g.constant(Mat(x)), gz);
  Value recon = scale(rowsum(square(resid)), 0.5 / sigma2_);
  const double d = static_cast<double>(x.cols());
  const double dz = static_cast<double>(z.cols());
  // - log p(z) per sample, a constant in theta
  Mat neg_logpz = 0.5 * (z.array().square().rowwise().sum() + dz * kLog2Pi);
  Value out = add(recon, g.constant(neg_logpz));
  return add_scalar(out, 0.5 * d * (std::log(sigma2_) + kLog2Pi));
}

Value MlpGenerator::x_node(Graph& g, const Mat& z) const {
  return mlp_node(g, *gen_, g.constant(z), /*trainable=*/true);
}

// -- losses -------------------------------------------------------------------

LossNodes elbo_loss_node(Graph& g, const MlpParams& gen, const EncoderParams& enc,
                         const Mat& x, const Mat& eps, double sigma2, bool train_gen,
                         bool train_enc) {
  if (!(sigma2 > 0.0)) throw Error("elbo: sigma2 must be > 0");
  LossNodes out;
  const int before_enc = static_cast<int>(g.param_ids().size());
  auto [mu, logsig] = encoder_node(g, enc, g.constant(Mat(x)), train_enc);
  if (train_enc)
    out.enc_ids.assign(g.param_ids().begin() + before_enc, g.param_ids().end());
  Value z = add(mu, mul(exp(logsig), g.constant(Mat(eps))));

  const int before_gen = static_cast<int>(g.param_ids().size());
  Value gz = mlp_node(g, gen, z, train_gen);
  if (train_gen)
    out.gen_ids.assign(g.param_ids().begin() + before_gen, g.param_ids().end());

  Value resid = sub(g.constant(Mat(x)), gz);
  const double d = static_cast<double>(x.cols());
  Value recon = add_scalar(scale(rowsum(square(resid)), 0.5 / sigma2),
                           0.5 * d * (std::log(sigma2) + kLog2Pi));
  // KL(N(mu, sigma^2) || N(0, I)) = 0.5 sum(mu^2 + sigma^2 - 1 - 2 log sigma)
  Value kl_terms = add(add_scalar(add(square(mu), exp(scale(logsig, 2.0))), -1.0),
                       scale(logsig, -2.0));
  Value kl = scale(rowsum(kl_terms), 0.5);
  out.loss = mean_all(add(recon, kl));
  return out;
}

LossNodes disc_loss_node(Graph& g, const MlpParams& disc, const Mat& x_real,
                         const Mat& x_fake) {
  if (x_real.rows() < 1 || x_fake.rows() < 1) throw Error("disc_loss: empty batch");
  LossNodes out;
  const int before = static_cast<int>(g.param_ids().size());
  // one registration of beta shared by both passes
  std::vector<Value> Ws, bs;
  for (const auto& l : disc.layers) {
    Ws.push_back(g.param(l.W));
    bs.push_back(g.param(l.b));
  }
  out.disc_ids.assign(g.param_ids().begin() + before, g.param_ids().end());
  auto apply = [&](Value h) {
    for (size_t k = 0; k < Ws.size(); ++k) {
      h = add_rowvec(matmul(h, Ws[k]), bs[k]);
      if (k + 1 < Ws.size()) h = leaky_relu(h, disc.spec.lrelu_slope);
    }
    return h;
  };
  Value f_real = apply(g.constant(Mat(x_real)));
  Value f_fake = apply(g.constant(Mat(x_fake)));
  // -log sigma(f) = softplus(-f), -log(1 - sigma(f)) = softplus(f)
  out.loss = add(mean_all(softplus(neg(f_real))), mean_all(softplus(f_fake)));
  return out;
}

LossNodes rkl_gen_loss_node(Graph& g, const MlpParams& gen, const LogRatio& ratio,
                            const Mat& z) {
  MlpGenerator model(&gen);
  return rkl_gen_loss_node(g, model, ratio, z);
}

LossNodes rkl_gen_loss_node(Graph& g, const PathwiseModel& model, const LogRatio& ratio,
                            const Mat& z) {
  LossNodes out;
  const int before = static_cast<int>(g.param_ids().size());
  Value x = model.x_node(g, z);
  out.gen_ids.assign(g.param_ids().begin() + before, g.param_ids().end());
  out.loss = mean_all(neg(ratio.build(g, x)));
  return out;
}

double disc_loss_value(const Vec& f_real, const Vec& f_fake) {
  double acc = 0.0;
  for (Index i = 0; i < f_real.size(); ++i) acc += softplus_stable(-f_real(i));
  acc /= static_cast<double>(f_real.size());
  double acc2 = 0.0;
  for (Index i = 0; i < f_fake.size(); ++i) acc2 += softplus_stable(f_fake(i));
  return acc + acc2 / static_cast<double>(f_fake.size());
}

LossNodes gp_penalty_node(Graph& g, const MlpParams& disc, const Mat& x_real,
                          double gp_gamma) {
  LossNodes out;
  const int before = static_cast<int>(g.param_ids().size());
  Value grad = input_gradient_node(g, disc, x_real, /*trainable=*/true);
  out.disc_ids.assign(g.param_ids().begin() + before, g.param_ids().end());
  out.loss = scale(mean_all(rowsum(square(grad))), 0.5 * gp_gamma);
  return out;
}

// -- estimators ----------------------------------------------------------------

GradEstimate alpha_forward_grad(const ScoreModel& model, const LogRatio& ratio, const Mat& x,
                                double alpha, const BridgeHyper& hyper) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha_forward_grad: alpha outside (0,1)");
  hyper.validate();
  GradEstimate est;
  est.tag = EstimatorTag::kForward;
  est.n = x.rows();
  Graph g;
  Value neg_logp = model.neg_logp_node(g, x);
  Vec f = ratio.values(x);
  Vec w = ratio_weights(f, -alpha, hyper.exp_clamp, &est.clamp_hits);
  Value loss = scale(mean_all(mul(g.constant(Mat(w)), neg_logp)), 1.0 / (1.0 - alpha));
  g.backward(loss);
  est.grads = g.param_grads();
  est.value = loss.val()(0, 0);
  return est;
}

GradEstimate alpha_reverse_grad(const PathwiseModel& model, const LogRatio& ratio,
                                const Mat& z, double alpha, const BridgeHyper& hyper) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha_reverse_grad: alpha outside (0,1)");
  hyper.validate();
  GradEstimate est;
  est.tag = EstimatorTag::kReverse;
  est.n = z.rows();
  Graph g;
  Value x = model.x_node(g, z);
  Value f = ratio.build(g, x);
  Vec w = ratio_weights(f.val().col(0), 1.0 - alpha, hyper.exp_clamp, &est.clamp_hits);
  Value loss = mean_all(mul(g.constant(Mat(w)), neg(f)));
  g.backward(loss);
  est.grads = g.param_grads();
  est.value = loss.val()(0, 0);
  return est;
}

GradEstimate combine_grads(const GradEstimate& f_est, const GradEstimate& r_est,
                           double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("combine_grads: gamma outside [0,1]");
  if (f_est.grads.size() != r_est.grads.size())
    throw Error("combine_grads: estimates address different parameter sets");
  GradEstimate out;
  out.tag = EstimatorTag::kCombined;
  out.n = f_est.n + r_est.n;
  out.clamp_hits = f_est.clamp_hits + r_est.clamp_hits;
  out.grads.reserve(f_est.grads.size());
  for (size_t i = 0; i < f_est.grads.size(); ++i) {
    if (!same_shape(f_est.grads[i], r_est.grads[i]))
      throw Error("combine_grads: gradient shape mismatch");
    out.grads.push_back((1.0 - gamma) * f_est.grads[i] + gamma * r_est.grads[i]);
  }
  out.value = (1.0 - gamma) * f_est.value + gamma * r_est.value;
  return out;
}

GradEstimate bridge_grad(const MlpParams& gen, const EncoderParams& enc,
                         const LogRatio& ratio, const Mat& x, const Mat& eps, const Mat& z,
                         double alpha, double gamma, const BridgeHyper& hyper) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("bridge_grad: alpha outside (0,1)");
  hyper.validate();
  GradEstimate est;
  est.tag = EstimatorTag::kPractical;
  est.n = x.rows() + z.rows();
  Graph g;
  // one registration of theta feeds both terms
  std::vector<Value> Ws, bs;
  for (const auto& l : gen.layers) {
    Ws.push_back(g.param(l.W));
    bs.push_back(g.param(l.b));
  }
  auto apply_gen = [&](Value h) {
    for (size_t k = 0; k < Ws.size(); ++k) {
      h = add_rowvec(matmul(h, Ws[k]), bs[k]);
      if (k + 1 < Ws.size()) h = leaky_relu(h, gen.spec.lrelu_slope);
    }
    return h;
  };

  // term 1: data side, weight e^(-alpha f(x)) on -d log p~(x, z_phi)
  SurrogateScoreModel surrogate(&gen, &enc, &eps, hyper.sigma2);
  const Mat z_post = surrogate.posterior_sample(x);
  Value gz = apply_gen(g.constant(z_post));
  Value recon = scale(rowsum(square(sub(g.constant(Mat(x)), gz))), 0.5 / hyper.sigma2);
  Vec w1 = ratio_weights(ratio.values(x), -alpha, hyper.exp_clamp, &est.clamp_hits);
  Value term1 =
      scale(mean_all(mul(g.constant(Mat(w1)), recon)), (1.0 - gamma) / (1.0 - alpha));

  // term 2: model side, weight e^((1-alpha) f(x)) on the pathwise ratio gradient
  Value x_fake = apply_gen(g.constant(Mat(z)));
  Value f_fake = ratio.build(g, x_fake);
  Vec w2 = ratio_weights(f_fake.val().col(0), 1.0 - alpha, hyper.exp_clamp, &est.clamp_hits);
  Value term2 = scale(mean_all(mul(g.constant(Mat(w2)), neg(f_fake))), gamma);

  Value total = add(term1, term2);
  g.backward(total);
  est.grads = g.param_grads();
  est.value = total.val()(0, 0);
  return est;
}

LossNodes cycle_loss_node(Graph& g, const MlpParams& gen, const EncoderParams& enc,
                          const LogRatio& ratio, const Mat& x, const Mat& eps, const Mat& z,
                          double alpha, double gamma, const BridgeHyper& hyper) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("cycle_loss: alpha outside (0,1)");
  hyper.validate();
  LossNodes out;
  const int before = static_cast<int>(g.param_ids().size());
  std::vector<Value> Ws, bs;
  for (const auto& l : gen.layers) {
    Ws.push_back(g.param(l.W));
    bs.push_back(g.param(l.b));
  }
  out.gen_ids.assign(g.param_ids().begin() + before, g.param_ids().end());
  auto apply_gen = [&](Value h) {
    for (size_t k = 0; k < Ws.size(); ++k) {
      h = add_rowvec(matmul(h, Ws[k]), bs[k]);
      if (k + 1 < Ws.size()) h = leaky_relu(h, gen.spec.lrelu_slope);
    }
    return h;
  };
  const double m = hyper.exp_clamp;

  // weighted half cycle-consistency: e^(-a f(x)) ||x - G(z)||^2 / (2 sigma^2)
  SurrogateScoreModel surrogate(&gen, &enc, &eps, hyper.sigma2);
  const Mat z_post = surrogate.posterior_sample(x);
  Value f_data = ratio.build(g, g.constant(Mat(x)));
  Value w1 = exp(clamp(scale(f_data, -alpha), -m, m));
  Value sq = scale(rowsum(square(sub(g.constant(Mat(x)), apply_gen(g.constant(z_post))))),
                   0.5 / hyper.sigma2);
  Value term1 = scale(mean_all(mul(w1, sq)), (1.0 - gamma) / (1.0 - alpha));

  // adversarial half: -e^((1-a) f(sg(x))) f(x) on model samples
  Value x_fake = apply_gen(g.constant(Mat(z)));
  Value f_sg = ratio.build(g, stop_gradient(x_fake));
  Value w2 = exp(clamp(scale(f_sg, 1.0 - alpha), -m, m));
  Value f_fake = ratio.build(g, x_fake);
  Value term2 = scale(mean_all(neg(mul(w2, f_fake))), gamma);

  out.loss = add(term1, term2);
  return out;
}

}  // namespace ab
