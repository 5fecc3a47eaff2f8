#include "ab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ab/adam.hpp"
#include "ab/bridge.hpp"
#include "ab/graph.hpp"

namespace ab {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

double kde_loglik(const Mat& model_samples, const Mat& held_out, double kernel_var) {
  if (model_samples.rows() < 1 || held_out.rows() < 1)
    throw Error("kde_loglik: empty inputs");
  if (!(kernel_var > 0.0)) throw Error("kde_loglik: kernel variance must be > 0");
  if (model_samples.cols() != held_out.cols()) throw Error("kde_loglik: dim mismatch");
  const Index m = model_samples.rows();
  const double d = static_cast<double>(model_samples.cols());
  const double lognorm =
      -std::log(static_cast<double>(m)) - 0.5 * d * (std::log(kernel_var) + kLog2Pi);
  // pairwise squared distances via the Gram expansion
  Vec s2 = model_samples.rowwise().squaredNorm();
  Vec y2 = held_out.rowwise().squaredNorm();
  Mat cross = held_out * model_samples.transpose();  // k x m
  double acc = 0.0;
  for (Index i = 0; i < held_out.rows(); ++i) {
    double best = -1e300;
    Eigen::ArrayXd expo(m);
    for (Index j = 0; j < m; ++j) {
      expo(j) = -(y2(i) + s2(j) - 2.0 * cross(i, j)) / (2.0 * kernel_var);
      best = std::max(best, expo(j));
    }
    const double ll = lognorm + best + std::log((expo - best).exp().sum());
    acc += std::max(ll, kLogLikFloor);
  }
  return acc / static_cast<double>(held_out.rows());
}

std::vector<int> nearest_mode_labels(const Mat& samples, const Mat& centers) {
  std::vector<int> labels(static_cast<size_t>(samples.rows()));
  for (Index i = 0; i < samples.rows(); ++i) {
    double best = 1e300;
    int arg = 0;
    for (Index c = 0; c < centers.rows(); ++c) {
      const double d2 = (samples.row(i) - centers.row(c)).squaredNorm();
      if (d2 < best) {
        best = d2;
        arg = static_cast<int>(c);
      }
    }
    labels[static_cast<size_t>(i)] = arg;
  }
  return labels;
}

double classifier_accuracy(const MlpParams& clf, const Mat& data,
                           const std::vector<int>& labels) {
  Mat logits = mlp_eval(clf, data);
  long hit = 0;
  for (Index i = 0; i < data.rows(); ++i) {
    Index arg;
    logits.row(i).maxCoeff(&arg);
    if (static_cast<int>(arg) == labels[static_cast<size_t>(i)]) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(data.rows());
}

MlpParams train_mode_classifier(const Mat& data, const std::vector<int>& labels,
                                int n_classes, const ClassifierConfig& cfg, Rng& rng) {
  if (data.rows() != static_cast<Index>(labels.size()))
    throw Error("train_mode_classifier: label count mismatch");
  MlpSpec spec;
  spec.in_dim = data.cols();
  spec.out_dim = n_classes;
  spec.hidden = cfg.hidden;
  MlpParams clf = mlp_init(spec, rng);
  AdamState opt(cfg.lr, 0.9, 0.999);

  const Index n = data.rows();
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (long epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    // deterministic shuffle
    for (Index i = n - 1; i > 0; --i) {
      const Index j = static_cast<Index>(rng.raw() % static_cast<std::uint64_t>(i + 1));
      std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    }
    for (Index start = 0; start < n; start += cfg.batch) {
      const Index len = std::min<Index>(cfg.batch, n - start);
      Mat xb(len, data.cols());
      Mat onehot = Mat::Zero(len, n_classes);
      for (Index r = 0; r < len; ++r) {
        const Index src = order[static_cast<size_t>(start + r)];
        xb.row(r) = data.row(src);
        onehot(r, labels[static_cast<size_t>(src)]) = 1.0;
      }
      Graph g;
      Value logits = mlp_node(g, clf, g.constant(xb), true);
      Value ce =
          mean_all(sub(logsumexp_rows(logits), rowsum(mul(logits, g.constant(onehot)))));
      g.backward(ce);
      adam_step(clf.trainable(), g.param_grads(), opt);
    }
    if (classifier_accuracy(clf, data, labels) == 1.0) return clf;
  }
  throw Error("train_mode_classifier: failed to reach 100% within the epoch budget");
}

double inception_score_probs(const Mat& probs) {
  const Index c = probs.cols();
  const double u = 1.0 / static_cast<double>(c);
  double acc = 0.0;
  for (Index i = 0; i < probs.rows(); ++i) {
    double kl = 0.0;
    for (Index y = 0; y < c; ++y)
      kl += u * (std::log(u) - std::log(std::max(probs(i, y), kProbFloor)));
    acc += kl;
  }
  return acc / static_cast<double>(probs.rows());
}

double inception_score(const MlpParams& clf, const Mat& samples) {
  Mat logits = mlp_eval(clf, samples);
  Mat probs(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    Eigen::ArrayXd e = (logits.row(i).array() - m).exp();
    probs.row(i) = (e / e.sum()).matrix();
  }
  return inception_score_probs(probs);
}

int mode_coverage(const Mat& samples, const Mat& centers, double radius, int min_count) {
  if (!(radius > 0.0)) throw Error("mode_coverage: radius must be > 0");
  int covered = 0;
  const double r2 = radius * radius;
  for (Index c = 0; c < centers.rows(); ++c) {
    int count = 0;
    for (Index i = 0; i < samples.rows(); ++i) {
      if ((samples.row(i) - centers.row(c)).squaredNorm() <= r2) ++count;
      if (count >= min_count) break;
    }
    if (count >= min_count) ++covered;
  }
  return covered;
}

VarianceReport variance_study(double mu, double sigma, const Gaussian& q,
                              const Vec& alphas, long trials, const ScheduleSpec& sched,
                              Rng& rng) {
  if (q.dim() != 1) throw Error("variance_study: q must be 1-D");
  if (trials < 2) throw Error("variance_study: needs >= 2 trials");
  VarianceReport rep;
  rep.alphas = alphas;
  rep.trials = trials;
  const Index na = alphas.size();
  rep.var_f.resize(na, 2);
  rep.var_r.resize(na, 2);
  rep.var_c.resize(na, 2);
  rep.mean_f.resize(na, 2);
  rep.mean_r.resize(na, 2);
  rep.mean_c.resize(na, 2);

  Gaussian1dModel model(mu, sigma);
  ExactGaussianLogRatio ratio(q, model.as_gaussian());
  BridgeHyper hyper;
  hyper.exp_clamp = 200.0;  // the study observes the raw estimators

  for (Index ia = 0; ia < na; ++ia) {
    const double a = alphas(ia);
    const double gamma = gamma_at(a, sched);
    Mat f_grads(trials, 2), r_grads(trials, 2), c_grads(trials, 2);
    for (long t = 0; t < trials; ++t) {
      Mat x = sample(q, 1, rng);
      Mat z = rng.normal_mat(1, 1);
      GradEstimate fe = alpha_forward_grad(model, ratio, x, a, hyper);
      GradEstimate re = alpha_reverse_grad(model, ratio, z, a, hyper);
      GradEstimate ce = combine_grads(fe, re, gamma);
      for (int p = 0; p < 2; ++p) {
        f_grads(t, p) = fe.grads[p](0, 0);
        r_grads(t, p) = re.grads[p](0, 0);
        c_grads(t, p) = ce.grads[p](0, 0);
      }
    }
    for (int p = 0; p < 2; ++p) {
      auto mv = [&](const Mat& m) {
        const double mean = m.col(p).mean();
        const double var =
            (m.col(p).array() - mean).square().sum() / static_cast<double>(trials - 1);
        return std::pair<double, double>(mean, var);
      };
      auto [mf, vf] = mv(f_grads);
      auto [mr, vr] = mv(r_grads);
      auto [mc, vc] = mv(c_grads);
      rep.mean_f(ia, p) = mf;
      rep.var_f(ia, p) = vf;
      rep.mean_r(ia, p) = mr;
      rep.var_r(ia, p) = vr;
      rep.mean_c(ia, p) = mc;
      rep.var_c(ia, p) = vc;
    }
  }
  return rep;
}

double spearman_vs_index(const Vec& y) {
  const Index n = y.size();
  std::vector<Index> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return y(a) < y(b); });
  Vec rank(n);
  for (Index r = 0; r < n; ++r) rank(idx[static_cast<size_t>(r)]) = static_cast<double>(r);
  double num = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double di = rank(i) - static_cast<double>(i);
    num += di * di;
  }
  const double nn = static_cast<double>(n);
  return 1.0 - 6.0 * num / (nn * (nn * nn - 1.0));
}

}  // namespace ab
