#pragma once

#include <string>
#include <vector>

#include "ab/densities.hpp"
#include "ab/nets.hpp"
#include "ab/rng.hpp"
#include "ab/schedules.hpp"
#include "ab/tensor.hpp"

namespace ab {

// one line of the training log
struct MetricsRow {
  long iter = 0;
  std::string step;  // I / II / III / baseline / probe tags
  double alpha = 0.0;
  double gamma = 0.0;
  double loss_g = 0.0;
  double loss_d = 0.0;
  double kde_ll = 0.0;
  double is_score = 0.0;
  int modes = 0;
};

constexpr double kLogLikFloor = -1000.0;  // per evaluation point
constexpr double kProbFloor = 1e-12;      // inside metric logs

// Parzen log-likelihood: mean over held-out points of the log Gaussian-kernel
// mixture centered at the model samples.
double kde_loglik(const Mat& model_samples, const Mat& held_out, double kernel_var);

// nearest mode index per sample
std::vector<int> nearest_mode_labels(const Mat& samples, const Mat& centers);

struct ClassifierConfig {
  std::vector<Index> hidden = {128, 128, 128, 128};  // 5 linear layers total
  long batch = 100;
  double lr = 1e-3;
  long max_epochs = 400;
};

// 5-layer lReLU classifier trained to 100% accuracy on the labeled data;
// throws if the budget runs out first
MlpParams train_mode_classifier(const Mat& data, const std::vector<int>& labels,
                                int n_classes, const ClassifierConfig& cfg, Rng& rng);

double classifier_accuracy(const MlpParams& clf, const Mat& data,
                           const std::vector<int>& labels);

// E_x KL(p(y) || p(y|x)) with uniform p(y), conditionals floored at 1e-12
double inception_score(const MlpParams& clf, const Mat& samples);
double inception_score_probs(const Mat& probs);  // rows are p(y|x)

// number of centers with >= min_count samples within radius
int mode_coverage(const Mat& samples, const Mat& centers, double radius, int min_count);

// Fig.-2-style harness: per-alpha single-sample gradient variances of the
// twin estimators and their gamma_alpha combination.
struct VarianceReport {
  Vec alphas;
  long trials = 0;
  // variance over trials, indexed [alpha][param] with params (mu, sigma)
  Mat var_f, var_r, var_c;
  Mat mean_f, mean_r, mean_c;
};

VarianceReport variance_study(double mu, double sigma, const Gaussian& q,
                              const Vec& alphas, long trials, const ScheduleSpec& sched,
                              Rng& rng);

// Spearman rank correlation of y against 1..n (ties broken by order)
double spearman_vs_index(const Vec& y);

}  // namespace ab
