#include "ab/trainer.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace ab {

using nlohmann::json;

void TrainConfig::validate() const {
  if (steps1 < 0 || steps2 < 0 || steps3 < 0) throw Error("train: negative step count");
  if (total_steps() < 1) throw Error("train: no iterations configured");
  if (batch < 1) throw Error("train: batch size must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw Error("train: beta1 outside [0,1)");
  if (metric_cadence < 1) throw Error("train: metric cadence must be positive");
  if (disc_steps < 1) throw Error("train: disc_steps must be positive");
  schedule.validate();
  bridge.validate();
}

BaselineKind baseline_from(const std::string& s) {
  if (s == "MLE") return BaselineKind::kMle;
  if (s == "RKL-SN") return BaselineKind::kRklSn;
  if (s == "RKL-GP") return BaselineKind::kRklGp;
  if (s == "FR") return BaselineKind::kFR;
  if (s == "FRw") return BaselineKind::kFRw;
  if (s == "FRw3") return BaselineKind::kFRw3;
  throw Error("unknown baseline kind: " + s);
}

std::string to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::kMle: return "MLE";
    case BaselineKind::kRklSn: return "RKL-SN";
    case BaselineKind::kRklGp: return "RKL-GP";
    case BaselineKind::kFR: return "FR";
    case BaselineKind::kFRw: return "FRw";
    case BaselineKind::kFRw3: return "FRw3";
  }
  return "?";
}

// -- evaluator ------------------------------------------------------------------

Evaluator Evaluator::make(const GaussianMixture& data, const MetricsConfig& cfg,
                          std::uint64_t seed) {
  Evaluator ev;
  ev.cfg = cfg;
  ev.centers = data.means;
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + 0xa5a5a5a5ULL);
  ev.held_out = sample(data, cfg.held_out, rng);
  Mat clf_data = sample(data, cfg.classifier_data, rng);
  auto labels = nearest_mode_labels(clf_data, data.means);
  ev.classifier = train_mode_classifier(clf_data, labels,
                                        static_cast<int>(data.components()),
                                        cfg.classifier, rng);
  Mat ref = sample(data, cfg.kde_samples, rng);
  ev.is_reference = inception_score(ev.classifier, ref);
  return ev;
}

namespace {
Rng eval_rng(std::uint64_t seed, long iter) {
  return Rng((seed + 0x51ed2701ULL) * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(iter));
}
}  // namespace

MetricsRow Evaluator::evaluate(const MlpParams& gen, Index d_z, std::uint64_t seed,
                               long iter) const {
  Rng rng = eval_rng(seed, iter);
  Mat z = rng.normal_mat(cfg.kde_samples, d_z);
  Mat samples = mlp_eval(gen, z);
  MetricsRow row;
  row.iter = iter;
  row.kde_ll = kde_loglik(samples, held_out, cfg.kde_var);
  row.is_score = inception_score(classifier, samples);
  row.modes = mode_coverage(samples, centers, cfg.coverage_radius, cfg.coverage_min_count);
  return row;
}

int Evaluator::coverage_of(const MlpParams& gen, Index d_z, std::uint64_t seed,
                           long iter) const {
  Rng rng = eval_rng(seed, iter);
  Mat z = rng.normal_mat(cfg.kde_samples, d_z);
  Mat samples = mlp_eval(gen, z);
  return mode_coverage(samples, centers, cfg.coverage_radius, cfg.coverage_min_count);
}

// -- trainer ----------------------------------------------------------------------

Trainer25G::Trainer25G(TrainConfig cfg, GaussianMixture data)
    : cfg_(std::move(cfg)), data_(std::move(data)),
      eval_(Evaluator::make(data_, cfg_.metrics, cfg_.seed)) {
  cfg_.validate();
  data_.validate();
}

namespace {

MlpSpec make_spec(Index in, const std::vector<Index>& hidden, Index out, bool sn) {
  MlpSpec s;
  s.in_dim = in;
  s.hidden = hidden;
  s.out_dim = out;
  s.spectral_norm = sn;
  return s;
}

void presize_adam(AdamState& st, const std::vector<Mat*>& params) {
  st.m.clear();
  st.v.clear();
  for (const Mat* p : params) {
    st.m.push_back(Mat::Zero(p->rows(), p->cols()));
    st.v.push_back(Mat::Zero(p->rows(), p->cols()));
  }
}

std::vector<Mat> add_grads(std::vector<Mat> a, const std::vector<Mat>& b, double wa = 1.0,
                           double wb = 1.0) {
  if (b.empty()) {
    for (auto& m : a) m *= wa;
    return a;
  }
  if (a.size() != b.size()) throw Error("gradient lists of different length");
  for (size_t i = 0; i < a.size(); ++i) a[i] = wa * a[i] + wb * b[i];
  return a;
}

}  // namespace

TrainState init_train_state(const TrainConfig& cfg, Index data_dim) {
  TrainState st;
  Rng root(cfg.seed);
  st.data_rng = root.fork(1);
  st.disc_rng = root.fork(2);
  st.gen_rng = root.fork(3);
  st.eps_rng = root.fork(4);
  Rng init = root.fork(5);
  st.gen = mlp_init(make_spec(cfg.nets.d_z, cfg.nets.gen_hidden, data_dim, false), init);
  st.enc = encoder_init(data_dim, cfg.nets.enc_hidden, cfg.nets.d_z, 0.2, init);
  const bool sn = cfg.reg == Regularizer::kSpectralNorm;
  st.disc = mlp_init(make_spec(data_dim, cfg.nets.disc_hidden, 1, sn), init);
  st.opt_gen = AdamState(cfg.lr, cfg.adam_beta1, cfg.adam_beta2);
  st.opt_enc = AdamState(cfg.lr, cfg.adam_beta1, cfg.adam_beta2);
  st.opt_disc = AdamState(cfg.lr, cfg.adam_beta1, cfg.adam_beta2);
  presize_adam(st.opt_gen, st.gen.trainable());
  presize_adam(st.opt_enc, st.enc.trainable());
  presize_adam(st.opt_disc, st.disc.trainable());
  return st;
}

TrainState Trainer25G::init_state() const { return init_train_state(cfg_, data_.dim()); }

void Trainer25G::disc_update(TrainState& st, const Mat& x) {
  for (long k = 0; k < cfg_.disc_steps; ++k) {
    if (cfg_.reg == Regularizer::kSpectralNorm) spectral_normalize(st.disc);
    Mat zf = st.disc_rng.normal_mat(cfg_.batch, cfg_.nets.d_z);
    Mat fakes = mlp_eval(st.gen, zf);
    Graph g;
    auto dn = disc_loss_node(g, st.disc, x, fakes);
    Value total = dn.loss;
    std::vector<int> gp_ids;
    if (cfg_.reg == Regularizer::kGradientPenalty) {
      auto gp = gp_penalty_node(g, st.disc, x, cfg_.bridge.gp_gamma);
      gp_ids = gp.disc_ids;
      total = add(total, gp.loss);
    }
    g.backward(total);
    std::vector<Mat> grads;
    for (size_t i = 0; i < dn.disc_ids.size(); ++i) {
      Mat gr = g.grad(dn.disc_ids[i]);
      if (!gp_ids.empty()) gr += g.grad(gp_ids[i]);
      grads.push_back(std::move(gr));
    }
    adam_step(st.disc.trainable(), grads, st.opt_disc);
    st.last_loss_d = dn.loss.val()(0, 0);
  }
}

void Trainer25G::elbo_update(TrainState& st, const Mat& x, bool update_gen,
                             bool update_enc) {
  Mat eps = st.eps_rng.normal_mat(x.rows(), cfg_.nets.d_z);
  Graph g;
  auto nodes =
      elbo_loss_node(g, st.gen, st.enc, x, eps, cfg_.bridge.sigma2, update_gen, update_enc);
  g.backward(nodes.loss);
  if (update_gen) {
    std::vector<Mat> grads;
    for (int id : nodes.gen_ids) grads.push_back(g.grad(id));
    adam_step(st.gen.trainable(), grads, st.opt_gen);
    st.last_loss_g = nodes.loss.val()(0, 0);
  }
  if (update_enc) {
    std::vector<Mat> grads;
    for (int id : nodes.enc_ids) grads.push_back(g.grad(id));
    adam_step(st.enc.trainable(), grads, st.opt_enc);
  }
}

std::vector<Mat> Trainer25G::rkl_gen_grads(TrainState& st, const Mat& z, double* value) {
  DiscLogRatio ratio(&st.disc);
  Graph g;
  auto nodes = rkl_gen_loss_node(g, st.gen, ratio, z);
  g.backward(nodes.loss);
  if (value) *value = nodes.loss.val()(0, 0);
  std::vector<Mat> grads;
  for (int id : nodes.gen_ids) grads.push_back(g.grad(id));
  return grads;
}

void Trainer25G::step1_iteration(TrainState& st) {
  Mat x = sample(data_, cfg_.batch, st.data_rng);
  if (cfg_.beta_first) {
    disc_update(st, x);
    elbo_update(st, x, true, true);
  } else {
    elbo_update(st, x, true, true);
    disc_update(st, x);
  }
}

void Trainer25G::bridge_step2_iteration(TrainState& st, long iter_in_phase,
                                        long phase_len) {
  ScheduleSpec sched = cfg_.schedule;
  sched.num_iters = phase_len;
  const double alpha = alpha_at(t_of_iter(iter_in_phase, sched), sched);
  const double gamma = gamma_at(alpha, sched);
  Mat x = sample(data_, cfg_.batch, st.data_rng);

  auto theta_phi = [&]() {
    Mat eps = st.eps_rng.normal_mat(cfg_.batch, cfg_.nets.d_z);
    Mat z = st.gen_rng.normal_mat(cfg_.batch, cfg_.nets.d_z);
    DiscLogRatio ratio(&st.disc);
    GradEstimate est =
        bridge_grad(st.gen, st.enc, ratio, x, eps, z, alpha, gamma, cfg_.bridge);
    adam_step(st.gen.trainable(), est.grads, st.opt_gen);
    st.last_loss_g = est.value;
    elbo_update(st, x, false, true);
  };
  if (cfg_.beta_first) {
    disc_update(st, x);
    theta_phi();
  } else {
    theta_phi();
    disc_update(st, x);
  }
}

void Trainer25G::step3_iteration(TrainState& st, bool update_encoder) {
  Mat x = sample(data_, cfg_.batch, st.data_rng);
  auto theta_phi = [&]() {
    Mat z = st.gen_rng.normal_mat(cfg_.batch, cfg_.nets.d_z);
    double value = 0.0;
    std::vector<Mat> grads = rkl_gen_grads(st, z, &value);
    adam_step(st.gen.trainable(), grads, st.opt_gen);
    st.last_loss_g = value;
    if (update_encoder) elbo_update(st, x, false, true);
  };
  if (cfg_.beta_first) {
    disc_update(st, x);
    theta_phi();
  } else {
    theta_phi();
    disc_update(st, x);
  }
}

void Trainer25G::rkl_iteration(TrainState& st, bool update_encoder) {
  step3_iteration(st, update_encoder);
}

void Trainer25G::push_metrics(MetricsSink* sink, const TrainState& st,
                              const std::string& tag, double alpha, double gamma,
                              long iter) {
  if (!sink) return;
  MetricsRow row = eval_.evaluate(st.gen, cfg_.nets.d_z, cfg_.seed, iter);
  row.step = tag;
  row.alpha = alpha;
  row.gamma = gamma;
  row.loss_g = st.last_loss_g;
  row.loss_d = st.last_loss_d;
  sink->push(row);
}

TrainState Trainer25G::run_bridge(MetricsSink* sink, const std::string& checkpoint_dir,
                                  std::optional<TrainState> resume) {
  TrainState st = resume ? std::move(*resume) : init_state();
  const long s1 = cfg_.steps1, s2 = cfg_.steps2, total = cfg_.total_steps();
  try {
    for (long iter = st.iter + 1; iter <= total; ++iter) {
      std::string tag;
      double alpha = 0.0, gamma = 0.0;
      if (iter <= s1) {
        tag = "I";
        step1_iteration(st);
      } else if (iter <= s1 + s2) {
        tag = "II";
        ScheduleSpec sched = cfg_.schedule;
        sched.num_iters = s2;
        alpha = alpha_at(t_of_iter(iter - s1, sched), sched);
        gamma = gamma_at(alpha, sched);
        bridge_step2_iteration(st, iter - s1, s2);
      } else {
        tag = "III";
        alpha = 1.0;
        gamma = 1.0;
        step3_iteration(st, true);
      }
      st.iter = iter;
      if (!std::isfinite(st.last_loss_g) || !std::isfinite(st.last_loss_d))
        throw Error("non-finite loss");
      const bool boundary = iter == s1 || iter == s1 + s2 || iter == total;
      if (iter % cfg_.metric_cadence == 0 || boundary)
        push_metrics(sink, st, tag, alpha, gamma, iter);
      if (!checkpoint_dir.empty() && boundary) {
        const char* name = iter == s1 ? "step1.bin" : (iter == s1 + s2 ? "step2.bin" : "step3.bin");
        save_checkpoint(st, cfg_, checkpoint_dir + "/" + name);
      }
    }
  } catch (const Error&) {
    st.nan_iter = st.iter;
    st.status = "nan_abort";
  }
  return st;
}

TrainState Trainer25G::run_baseline(BaselineKind kind, MetricsSink* sink) {
  if (kind == BaselineKind::kRklSn && cfg_.reg != Regularizer::kSpectralNorm)
    throw Error("RKL-SN baseline needs the SN regularizer configured");
  if (kind == BaselineKind::kRklGp && cfg_.reg != Regularizer::kGradientPenalty)
    throw Error("RKL-GP baseline needs the GP regularizer configured");
  TrainState st = init_state();
  const long total = cfg_.total_steps();
  const long s1 = cfg_.steps1, s2 = cfg_.steps2;
  ScheduleSpec whole = cfg_.schedule;
  whole.num_iters = total;
  ScheduleSpec mid = cfg_.schedule;
  mid.num_iters = std::max<long>(s2, 2);

  try {
    for (long iter = 1; iter <= total; ++iter) {
      double alpha = 0.0, gamma = 0.0;
      switch (kind) {
        case BaselineKind::kMle:
          step1_iteration(st);
          break;
        case BaselineKind::kRklSn:
        case BaselineKind::kRklGp:
          alpha = 1.0;
          gamma = 1.0;
          step3_iteration(st, false);
          break;
        case BaselineKind::kFR:
        case BaselineKind::kFRw: {
          gamma = 0.5;
          if (kind == BaselineKind::kFRw) {
            alpha = alpha_at(t_of_iter(iter, whole), whole);
            gamma = gamma_at(alpha, whole);
          }
          Mat x = sample(data_, cfg_.batch, st.data_rng);
          auto theta_phi = [&]() {
            Mat eps = st.eps_rng.normal_mat(cfg_.batch, cfg_.nets.d_z);
            Graph g;
            auto nodes =
                elbo_loss_node(g, st.gen, st.enc, x, eps, cfg_.bridge.sigma2, true, true);
            g.backward(nodes.loss);
            std::vector<Mat> fkl_g, enc_g;
            for (int id : nodes.gen_ids) fkl_g.push_back(g.grad(id));
            for (int id : nodes.enc_ids) enc_g.push_back(g.grad(id));
            Mat z = st.gen_rng.normal_mat(cfg_.batch, cfg_.nets.d_z);
            double rkl_value = 0.0;
            std::vector<Mat> rkl_g = rkl_gen_grads(st, z, &rkl_value);
            std::vector<Mat> theta_g =
                kind == BaselineKind::kFR ? add_grads(std::move(fkl_g), rkl_g)
                                          : add_grads(std::move(fkl_g), rkl_g, 1.0 - gamma,
                                                      gamma);
            adam_step(st.gen.trainable(), theta_g, st.opt_gen);
            st.last_loss_g = rkl_value;
            adam_step(st.enc.trainable(), enc_g, st.opt_enc);
          };
          if (cfg_.beta_first) {
            disc_update(st, x);
            theta_phi();
          } else {
            theta_phi();
            disc_update(st, x);
          }
          break;
        }
        case BaselineKind::kFRw3: {
          if (iter <= s1) {
            step1_iteration(st);
          } else if (iter <= s1 + s2) {
            alpha = alpha_at(t_of_iter(iter - s1, mid), mid);
            gamma = gamma_at(alpha, mid);
            Mat x = sample(data_, cfg_.batch, st.data_rng);
            auto theta_phi = [&]() {
              Mat eps = st.eps_rng.normal_mat(cfg_.batch, cfg_.nets.d_z);
              Graph g;
              auto nodes = elbo_loss_node(g, st.gen, st.enc, x, eps, cfg_.bridge.sigma2,
                                          true, true);
              g.backward(nodes.loss);
              std::vector<Mat> fkl_g, enc_g;
              for (int id : nodes.gen_ids) fkl_g.push_back(g.grad(id));
              for (int id : nodes.enc_ids) enc_g.push_back(g.grad(id));
              Mat z = st.gen_rng.normal_mat(cfg_.batch, cfg_.nets.d_z);
              double rkl_value = 0.0;
              std::vector<Mat> rkl_g = rkl_gen_grads(st, z, &rkl_value);
              std::vector<Mat> theta_g =
                  add_grads(std::move(fkl_g), rkl_g, 1.0 - gamma, gamma);
              adam_step(st.gen.trainable(), theta_g, st.opt_gen);
              st.last_loss_g = rkl_value;
              adam_step(st.enc.trainable(), enc_g, st.opt_enc);
            };
            if (cfg_.beta_first) {
              disc_update(st, x);
              theta_phi();
            } else {
              theta_phi();
              disc_update(st, x);
            }
          } else {
            alpha = 1.0;
            gamma = 1.0;
            step3_iteration(st, true);
          }
          break;
        }
      }
      st.iter = iter;
      if (!std::isfinite(st.last_loss_g) || !std::isfinite(st.last_loss_d))
        throw Error("non-finite loss");
      if (iter % cfg_.metric_cadence == 0 || iter == total)
        push_metrics(sink, st, "baseline", alpha, gamma, iter);
    }
  } catch (const Error&) {
    st.nan_iter = st.iter;
    st.status = "nan_abort";
  }
  return st;
}

CoverageTrace forgetting_probe(Trainer25G& trainer, const TrainState& start, long iters,
                               long stride, bool bridge_mode, MetricsSink* sink) {
  const TrainConfig& cfg = trainer.config();
  TrainState st = start;
  CoverageTrace trace;
  const std::string tag = bridge_mode ? "probe-bridge" : "probe-rkl";
  auto record = [&](long i) {
    const int cov = trainer.evaluator().coverage_of(st.gen, cfg.nets.d_z, cfg.seed,
                                                    1000000 + i);
    trace.iters.push_back(i);
    trace.coverage.push_back(cov);
    if (sink) {
      MetricsRow row;
      row.iter = i;
      row.step = tag;
      row.modes = cov;
      row.loss_g = st.last_loss_g;
      row.loss_d = st.last_loss_d;
      sink->push(row);
    }
  };
  record(0);
  for (long i = 1; i <= iters; ++i) {
    if (bridge_mode)
      trainer.bridge_step2_iteration(st, i, iters);
    else
      trainer.rkl_iteration(st, false);
    if (i % stride == 0 || i == iters) record(i);
  }
  return trace;
}

// -- checkpoints --------------------------------------------------------------------

namespace {

void gather(TrainState& st, bool sn, std::vector<Mat*>& mats, std::vector<Vec*>& vecs) {
  for (Mat* m : st.gen.trainable()) mats.push_back(m);
  for (Mat* m : st.enc.trainable()) mats.push_back(m);
  for (Mat* m : st.disc.trainable()) mats.push_back(m);
  if (sn)
    for (auto& l : st.disc.layers) {
      vecs.push_back(&l.u);
      vecs.push_back(&l.v);
    }
  for (auto* opt : {&st.opt_gen, &st.opt_enc, &st.opt_disc}) {
    for (auto& m : opt->m) mats.push_back(&m);
    for (auto& m : opt->v) mats.push_back(&m);
  }
}

}  // namespace

void save_checkpoint(const TrainState& st, const TrainConfig& cfg,
                     const std::string& path) {
  TrainState& mst = const_cast<TrainState&>(st);
  std::vector<Mat*> mats;
  std::vector<Vec*> vecs;
  gather(mst, cfg.reg == Regularizer::kSpectralNorm, mats, vecs);

  json header;
  header["format"] = 1;
  header["iter"] = st.iter;
  header["status"] = st.status;
  header["rng"] = {{"data", st.data_rng.state()},
                   {"disc", st.disc_rng.state()},
                   {"gen", st.gen_rng.state()},
                   {"eps", st.eps_rng.state()}};
  header["opt_t"] = {st.opt_gen.t, st.opt_enc.t, st.opt_disc.t};
  header["data_dim"] = st.gen.spec.out_dim;
  json shapes = json::array();
  for (const Mat* m : mats) shapes.push_back({m->rows(), m->cols()});
  for (const Vec* v : vecs) shapes.push_back({v->size(), 1});
  header["shapes"] = std::move(shapes);
  const std::string htext = header.dump();

  std::vector<double> blob;
  for (const Mat* m : mats) write_row_major(blob, *m);
  for (const Vec* v : vecs)
    for (Index i = 0; i < v->size(); ++i) blob.push_back((*v)(i));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open checkpoint for writing: " + path);
  const char magic[8] = {'A', 'B', 'C', 'K', 'P', 'T', '0', '1'};
  out.write(magic, 8);
  const std::uint64_t hlen = htext.size();
  out.write(reinterpret_cast<const char*>(&hlen), 8);
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  out.write(reinterpret_cast<const char*>(blob.data()),
            static_cast<std::streamsize>(blob.size() * sizeof(double)));
  if (!out) throw Error("short write to checkpoint: " + path);
}

TrainState load_checkpoint(const std::string& path, const TrainConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "ABCKPT01", 8) != 0)
    throw Error("bad checkpoint magic: " + path);
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), 8);
  std::string htext(hlen, '\0');
  in.read(htext.data(), static_cast<std::streamsize>(hlen));
  json header = json::parse(htext);

  // rebuild the net skeletons, then overwrite every tensor
  TrainState st = init_train_state(cfg, header["data_dim"].get<Index>());
  st.iter = header["iter"].get<long>();
  st.status = header["status"].get<std::string>();
  st.data_rng.set_state(header["rng"]["data"].get<std::string>());
  st.disc_rng.set_state(header["rng"]["disc"].get<std::string>());
  st.gen_rng.set_state(header["rng"]["gen"].get<std::string>());
  st.eps_rng.set_state(header["rng"]["eps"].get<std::string>());
  st.opt_gen.t = header["opt_t"][0].get<long>();
  st.opt_enc.t = header["opt_t"][1].get<long>();
  st.opt_disc.t = header["opt_t"][2].get<long>();

  std::vector<Mat*> mats;
  std::vector<Vec*> vecs;
  gather(st, cfg.reg == Regularizer::kSpectralNorm, mats, vecs);
  const auto& shapes = header["shapes"];
  if (shapes.size() != mats.size() + vecs.size())
    throw Error("checkpoint does not match the configured architecture");
  size_t idx = 0;
  std::vector<double> blob;
  {
    std::vector<char> rest((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    blob.resize(rest.size() / sizeof(double));
    std::memcpy(blob.data(), rest.data(), blob.size() * sizeof(double));
  }
  const double* cur = blob.data();
  const double* end = blob.data() + blob.size();
  for (Mat* m : mats) {
    const auto& sh = shapes[idx++];
    if (m->rows() != sh[0].get<Index>() || m->cols() != sh[1].get<Index>())
      throw Error("checkpoint tensor shape mismatch");
    if (cur + m->size() > end) throw Error("checkpoint blob truncated");
    read_row_major(cur, *m);
    cur += m->size();
  }
  for (Vec* v : vecs) {
    const auto& sh = shapes[idx++];
    if (v->size() != sh[0].get<Index>()) throw Error("checkpoint vector shape mismatch");
    for (Index i = 0; i < v->size(); ++i) (*v)(i) = *cur++;
  }
  if (cur != end) throw Error("checkpoint blob has trailing data");
  return st;
}

}  // namespace ab
