#include "ab/gmm1d.hpp"

#include <cmath>

#include "ab/adam.hpp"

namespace ab {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

GaussianMixture Gmm1dModel::as_mixture() const {
  GaussianMixture m;
  const Index k = components();
  Eigen::ArrayXd e = (logits.row(0).array() - logits.row(0).maxCoeff()).exp();
  m.weights = (e / e.sum()).matrix();
  m.means = means.transpose();
  m.vars = (log_sigmas.row(0).array() * 2.0).exp().matrix();
  (void)k;
  return m;
}

CombineMethod combine_method_from(const std::string& s) {
  if (s == "MLE") return CombineMethod::kMle;
  if (s == "RKL") return CombineMethod::kRkl;
  if (s == "FR") return CombineMethod::kFR;
  if (s == "FRw") return CombineMethod::kFRw;
  if (s == "FRw3") return CombineMethod::kFRw3;
  if (s == "alpha-bridge") return CombineMethod::kAlphaBridge;
  throw Error("unknown combine method: " + s);
}

std::string to_string(CombineMethod m) {
  switch (m) {
    case CombineMethod::kMle: return "MLE";
    case CombineMethod::kRkl: return "RKL";
    case CombineMethod::kFR: return "FR";
    case CombineMethod::kFRw: return "FRw";
    case CombineMethod::kFRw3: return "FRw3";
    case CombineMethod::kAlphaBridge: return "alpha-bridge";
  }
  return "?";
}

Gmm1dModel gmm1d_init(const Gmm1dConfig& cfg, Rng& rng) {
  Gmm1dModel m;
  m.logits = Mat::Zero(1, cfg.components);
  m.means.resize(1, cfg.components);
  for (int k = 0; k < cfg.components; ++k)
    m.means(0, k) = rng.uniform(cfg.init_mean_lo, cfg.init_mean_hi);
  m.log_sigmas = Mat::Constant(1, cfg.components, cfg.init_log_sigma);
  return m;
}

Gmm1dLosses::Gmm1dLosses(const Gmm1dConfig& cfg, const GaussianMixture& truth) {
  if (truth.dim() != 1) throw Error("gmm1d: ground truth must be 1-D");
  const Index n = cfg.grid_n;
  xs.resize(n);
  trap_w.resize(n);
  logq.resize(n);
  const double h = (cfg.grid_hi - cfg.grid_lo) / static_cast<double>(n - 1);
  for (Index i = 0; i < n; ++i) {
    xs(i) = cfg.grid_lo + h * static_cast<double>(i);
    trap_w(i) = (i == 0 || i == n - 1) ? 0.5 * h : h;
    logq(i) = logpdf(truth, Vec::Constant(1, xs(i)));
  }
  q_trap = trap_w.array() * logq.array().exp();
  q_entropy_term = (q_trap.array() * logq.array()).sum();
}

Value Gmm1dLosses::logp_node(Graph& g, const Gmm1dModel& m) const {
  const Index k = m.components();
  Value logits = g.param(m.logits);
  Value means = g.param(m.means);
  Value logsig = g.param(m.log_sigmas);
  Value logw = sub_bscalar(logits, logsumexp_rows(logits));  // log softmax, 1 x K
  Value lognorm = add_scalar(neg(logsig), -0.5 * kLog2Pi);
  Value half_inv = scale(exp(scale(logsig, -2.0)), 0.5);  // 1/(2 sigma^2), 1 x K
  Value diff = add_rowvec(tile_cols(g.constant(Mat(xs)), k), neg(means));
  Value quad = mul_rowvec(square(diff), half_inv);
  Value comp_ll = add_rowvec(neg(quad), add(logw, lognorm));
  return logsumexp_rows(comp_ll);  // n x 1
}

Value Gmm1dLosses::fkl_node(Graph& g, const Gmm1dModel& m) const {
  Value logp = logp_node(g, m);
  Value cross = sum_all(mul(g.constant(Mat(q_trap)), logp));
  return add_scalar(neg(cross), q_entropy_term);
}

Value Gmm1dLosses::rkl_node(Graph& g, const Gmm1dModel& m) const {
  Value logp = logp_node(g, m);
  Value integrand = mul(exp(logp), sub(logp, g.constant(Mat(logq))));
  return sum_all(mul(g.constant(Mat(trap_w)), integrand));
}

Value Gmm1dLosses::alpha_node(Graph& g, const Gmm1dModel& m, double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("gmm1d: alpha outside (0,1)");
  Value logp = logp_node(g, m);
  Value blend = exp(add(scale(logp, alpha), g.constant(Mat((1.0 - alpha) * logq))));
  Value integral = sum_all(mul(g.constant(Mat(trap_w)), blend));
  return scale(add_scalar(neg(integral), 1.0), 1.0 / (alpha * (1.0 - alpha)));
}

namespace {

struct PhasePlan {
  std::string tag;
  double alpha = 0.0;  // used by the bridge phase
  double gamma = 0.0;  // FRw weight
  enum class Kind { kFkl, kRkl, kAlpha, kFRw, kFR } kind = Kind::kFkl;
};

}  // namespace

Gmm1dModel train_gmm1d(CombineMethod method, const Gmm1dConfig& cfg,
                       const GaussianMixture& truth, Rng& rng, const Gmm1dTrace& trace) {
  cfg.schedule.validate();
  Gmm1dLosses losses(cfg, truth);
  Gmm1dModel model = gmm1d_init(cfg, rng);
  AdamState opt(cfg.lr, cfg.adam_beta1, cfg.adam_beta2);
  const long total = cfg.total_steps();

  ScheduleSpec whole = cfg.schedule;  // FRw: gamma over the full run
  whole.num_iters = total;
  ScheduleSpec mid = cfg.schedule;  // step II clock
  mid.num_iters = cfg.steps2;

  for (long iter = 1; iter <= total; ++iter) {
    PhasePlan plan;
    switch (method) {
      case CombineMethod::kMle:
        plan = {"MLE", 0.0, 0.0, PhasePlan::Kind::kFkl};
        break;
      case CombineMethod::kRkl:
        plan = {"RKL", 1.0, 1.0, PhasePlan::Kind::kRkl};
        break;
      case CombineMethod::kFR:
        plan = {"FR", 0.0, 0.5, PhasePlan::Kind::kFR};
        break;
      case CombineMethod::kFRw: {
        const double a = alpha_at(t_of_iter(iter, whole), whole);
        plan = {"FRw", a, gamma_at(a, whole), PhasePlan::Kind::kFRw};
        break;
      }
      case CombineMethod::kFRw3:
      case CombineMethod::kAlphaBridge: {
        if (iter <= cfg.steps1) {
          plan = {"I", 0.0, 0.0, PhasePlan::Kind::kFkl};
        } else if (iter <= cfg.steps1 + cfg.steps2) {
          const double a = alpha_at(t_of_iter(iter - cfg.steps1, mid), mid);
          const double gm = gamma_at(a, mid);
          plan = {"II", a, gm,
                  method == CombineMethod::kAlphaBridge ? PhasePlan::Kind::kAlpha
                                                        : PhasePlan::Kind::kFRw};
        } else {
          plan = {"III", 1.0, 1.0, PhasePlan::Kind::kRkl};
        }
        break;
      }
    }

    Graph g;
    Value loss{nullptr, -1};
    switch (plan.kind) {
      case PhasePlan::Kind::kFkl:
        loss = losses.fkl_node(g, model);
        break;
      case PhasePlan::Kind::kRkl:
        loss = losses.rkl_node(g, model);
        break;
      case PhasePlan::Kind::kAlpha:
        loss = losses.alpha_node(g, model, plan.alpha);
        break;
      case PhasePlan::Kind::kFRw: {
        // one registration serves both divergence terms
        Value logp = losses.logp_node(g, model);
        Value cross = sum_all(mul(g.constant(Mat(losses.q_trap)), logp));
        Value fkl = add_scalar(neg(cross), losses.q_entropy_term);
        Value integrand = mul(exp(logp), sub(logp, g.constant(Mat(losses.logq))));
        Value rkl = sum_all(mul(g.constant(Mat(losses.trap_w)), integrand));
        loss = add(scale(fkl, 1.0 - plan.gamma), scale(rkl, plan.gamma));
        break;
      }
      case PhasePlan::Kind::kFR: {
        Value logp = losses.logp_node(g, model);
        Value cross = sum_all(mul(g.constant(Mat(losses.q_trap)), logp));
        Value fkl = add_scalar(neg(cross), losses.q_entropy_term);
        Value integrand = mul(exp(logp), sub(logp, g.constant(Mat(losses.logq))));
        Value rkl = sum_all(mul(g.constant(Mat(losses.trap_w)), integrand));
        loss = add(fkl, rkl);
        break;
      }
    }
    g.backward(loss);
    adam_step(model.trainable(), g.param_grads(), opt);
    if (!model.means.allFinite() || !model.log_sigmas.allFinite())
      throw Error("gmm1d: non-finite parameters at iter " + std::to_string(iter));
    if (trace)
      trace(iter, plan.tag, plan.alpha, plan.gamma, loss.val()(0, 0),
            gmm1d_modes_matched(model, truth, cfg.success_tol));
  }
  return model;
}

namespace {

// all injective assignments of model components to truth components
bool match_recursive(const Gmm1dModel& m, const GaussianMixture& truth, double tol,
                     Index comp, std::vector<bool>& used) {
  if (comp == m.components()) return true;
  for (Index t = 0; t < truth.components(); ++t) {
    if (used[static_cast<size_t>(t)]) continue;
    const double mu = m.means(0, comp);
    const double sig = std::exp(m.log_sigmas(0, comp));
    const double true_sig = std::sqrt(truth.vars(t));
    const bool ok = std::abs(mu - truth.means(t, 0)) <= tol &&
                    sig <= 2.0 * true_sig && sig >= 0.5 * true_sig;
    if (!ok) continue;
    used[static_cast<size_t>(t)] = true;
    if (match_recursive(m, truth, tol, comp + 1, used)) return true;
    used[static_cast<size_t>(t)] = false;
  }
  return false;
}

}  // namespace

bool gmm1d_success(const Gmm1dModel& model, const GaussianMixture& truth, double tol) {
  if (model.components() > truth.components()) return false;
  std::vector<bool> used(static_cast<size_t>(truth.components()), false);
  return match_recursive(model, truth, tol, 0, used);
}

int gmm1d_modes_matched(const Gmm1dModel& model, const GaussianMixture& truth,
                        double tol) {
  int matched = 0;
  for (Index t = 0; t < truth.components(); ++t) {
    const double true_sig = std::sqrt(truth.vars(t));
    for (Index c = 0; c < model.components(); ++c) {
      const double sig = std::exp(model.log_sigmas(0, c));
      if (std::abs(model.means(0, c) - truth.means(t, 0)) <= tol &&
          sig <= 2.0 * true_sig && sig >= 0.5 * true_sig) {
        ++matched;
        break;
      }
    }
  }
  return matched;
}

}  // namespace ab
