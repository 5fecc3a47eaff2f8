#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ab/adam.hpp"
#include "ab/bridge.hpp"
#include "ab/densities.hpp"
#include "ab/metrics.hpp"
#include "ab/nets.hpp"
#include "ab/rng.hpp"
#include "ab/schedules.hpp"

namespace ab {

struct NetsConfig {
  Index d_z = 2;
  std::vector<Index> gen_hidden = {400, 400, 400, 400};
  std::vector<Index> disc_hidden = {400, 400, 400, 400};
  std::vector<Index> enc_hidden = {400, 400, 400, 400};
};

struct MetricsConfig {
  long kde_samples = 5000;
  double kde_var = 2e-4;
  long held_out = 5000;
  double coverage_radius = 4.0 * 0.014142135623730951;  // 4 component sigmas
  int coverage_min_count = 20;
  long classifier_data = 10000;
  ClassifierConfig classifier;
};

struct TrainConfig {
  long steps1 = 7500;
  long steps2 = 7500;
  long steps3 = 25000;
  long batch = 50;
  double lr = 2e-4;
  double adam_beta1 = 0.1;
  double adam_beta2 = 0.999;
  ScheduleSpec schedule;
  BridgeHyper bridge;
  Regularizer reg = Regularizer::kSpectralNorm;
  std::uint64_t seed = 1;
  long metric_cadence = 500;
  long disc_steps = 1;
  bool beta_first = true;  // discriminator update before the generator's
  NetsConfig nets;
  MetricsConfig metrics;

  long total_steps() const { return steps1 + steps2 + steps3; }
  void validate() const;
};

enum class BaselineKind { kMle, kRklSn, kRklGp, kFR, kFRw, kFRw3 };
BaselineKind baseline_from(const std::string& s);
std::string to_string(BaselineKind k);

struct TrainState {
  MlpParams gen;
  EncoderParams enc;
  MlpParams disc;
  AdamState opt_gen, opt_enc, opt_disc;
  long iter = 0;  // completed iterations
  Rng data_rng{0}, disc_rng{0}, gen_rng{0}, eps_rng{0};
  std::string status = "ok";
  long nan_iter = -1;  // last finite iteration before an abort
  double last_loss_g = 0.0;
  double last_loss_d = 0.0;
};

// fresh nets, presized optimizer moments and derived rng streams
TrainState init_train_state(const TrainConfig& cfg, Index data_dim);

// binary checkpoint: JSON header (shapes, specs, optimizer and rng state)
// followed by a flat row-major double blob; round-trips bit-exactly
void save_checkpoint(const TrainState& st, const TrainConfig& cfg,
                     const std::string& path);
TrainState load_checkpoint(const std::string& path, const TrainConfig& cfg);

class MetricsSink {
 public:
  virtual ~MetricsSink() = default;
  virtual void push(const MetricsRow& row) = 0;
};

class VectorSink : public MetricsSink {
 public:
  void push(const MetricsRow& row) override { rows.push_back(row); }
  std::vector<MetricsRow> rows;
};

// Fixed evaluation battery shared by every run of one experiment seed: held-out
// data, mode classifier, centers. Deterministic given the seed and independent
// of the training streams.
struct Evaluator {
  Mat centers;
  Mat held_out;
  MlpParams classifier;
  MetricsConfig cfg;
  double is_reference = 0.0;  // IS of true-data samples, the normalization anchor

  static Evaluator make(const GaussianMixture& data, const MetricsConfig& cfg,
                        std::uint64_t seed);
  MetricsRow evaluate(const MlpParams& gen, Index d_z, std::uint64_t seed, long iter) const;
  int coverage_of(const MlpParams& gen, Index d_z, std::uint64_t seed, long iter) const;
};

// the three-step alpha-Bridge trainer and its single-objective baselines
class Trainer25G {
 public:
  Trainer25G(TrainConfig cfg, GaussianMixture data);

  TrainState init_state() const;

  // Steps I, II, III per Algorithm 1. When `resume` is set the run continues
  // from its iteration counter; checkpoints land in checkpoint_dir when given.
  TrainState run_bridge(MetricsSink* sink, const std::string& checkpoint_dir = "",
                        std::optional<TrainState> resume = std::nullopt);

  TrainState run_baseline(BaselineKind kind, MetricsSink* sink);

  const Evaluator& evaluator() const { return eval_; }
  const TrainConfig& config() const { return cfg_; }

  // one phase-II iteration from arbitrary state (also the probe driver)
  void bridge_step2_iteration(TrainState& st, long iter_in_phase, long phase_len);
  void rkl_iteration(TrainState& st, bool update_encoder);

 private:
  friend struct TrainerTestHook;
  void disc_update(TrainState& st, const Mat& x);
  void elbo_update(TrainState& st, const Mat& x, bool update_gen, bool update_enc);
  std::vector<Mat> rkl_gen_grads(TrainState& st, const Mat& z, double* value);
  void step1_iteration(TrainState& st);
  void step3_iteration(TrainState& st, bool update_encoder);
  void push_metrics(MetricsSink* sink, const TrainState& st, const std::string& tag,
                    double alpha, double gamma, long iter);

  TrainConfig cfg_;
  GaussianMixture data_;
  Evaluator eval_;
};

struct CoverageTrace {
  std::vector<long> iters;
  std::vector<int> coverage;
};

// From a Step-I checkpoint: pure reverse-KL refinement vs a compressed Step-II
// bridge, recording mode coverage every `stride` iterations.
CoverageTrace forgetting_probe(Trainer25G& trainer, const TrainState& start, long iters,
                               long stride, bool bridge_mode, MetricsSink* sink);

}  // namespace ab
