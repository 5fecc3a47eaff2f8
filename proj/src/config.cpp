#include "ab/config.hpp"

#include <fstream>
#include <set>

namespace ab {

using nlohmann::json;

namespace {

json hidden_to_json(const std::vector<Index>& v) {
  json a = json::array();
  for (Index x : v) a.push_back(x);
  return a;
}

std::vector<Index> hidden_from_json(const json& a) {
  std::vector<Index> out;
  for (const auto& x : a) out.push_back(x.get<Index>());
  return out;
}

}  // namespace

json default_config_json(const std::string& scale) {
  const bool desk = scale == "desk";
  if (!desk && scale != "paper") throw ConfigError("scale must be \"paper\" or \"desk\"");
  json hidden = json::array();
  for (int i = 0; i < 4; ++i) hidden.push_back(desk ? 64 : 400);
  json clf_hidden = json::array();
  for (int i = 0; i < 4; ++i) clf_hidden.push_back(desk ? 64 : 128);

  json j;
  j["experiment"] = "bridge-25g";
  j["seeds"] = {1, 2, 3, 4, 5};
  j["out_dir"] = "out";
  j["scale"] = scale;
  j["baseline_kind"] = "RKL-SN";
  j["data"] = {{"kind", "grid25"}, {"spacing", 2.0}, {"component_var", 2e-4}};
  j["train"] = {{"steps", desk ? json{2000, 2000, 6000} : json{7500, 7500, 25000}},
                {"batch", 50},
                {"lr", 2e-4},
                {"adam_beta1", 0.1},
                {"adam_beta2", 0.999},
                {"regularizer", "SN"},
                {"metric_cadence", desk ? 250 : 500},
                {"disc_steps", 1},
                {"update_order", "beta_first"}};
  j["nets"] = {{"d_z", 2},
               {"gen_hidden", hidden},
               {"disc_hidden", hidden},
               {"enc_hidden", hidden}};
  j["schedule"] = {{"alpha_family", "sigmoid"}, {"gamma_family", "sigmoid"},
                   {"a", 20.0},  {"b", -10.0},
                   {"c", 20.0},  {"d", -10.0},
                   {"eps", 1e-3}};
  j["bridge"] = {{"sigma2", 1e-4}, {"exp_clamp", 10.0}, {"gp_gamma", 10.0}};
  j["metrics"] = {{"kde_samples", 5000},
                  {"kde_var", 2e-4},
                  {"held_out", 5000},
                  {"coverage_radius", 4.0 * std::sqrt(2e-4)},
                  {"coverage_min_count", 20},
                  {"classifier_data", 10000},
                  {"classifier_hidden", clf_hidden},
                  {"classifier_max_epochs", 400}};
  j["variance"] = {{"mu", 3.0},
                   {"sigma", 1.0},
                   {"alphas", {0.1, 0.3, 0.5, 0.7, 0.9}},
                   {"trials", 100}};
  j["gmm1d"] = {{"methods", {"FR", "FRw", "FRw3", "alpha-bridge"}},
                {"components", 2},
                {"data_means", {6.0, -1.0, 1.0}},
                {"data_sigmas", {0.3, 0.3, 0.3}},
                {"steps", {600, 1200, 600}},
                {"lr", 0.03},
                {"adam_beta1", 0.5},
                {"adam_beta2", 0.999},
                {"grid", {-20.0, 25.0, 4097}},
                {"init_mean_range", {-2.0, 7.0}},
                {"init_log_sigma", 0.0},
                {"success_tol", 0.3},
                {"trace_cadence", 25}};
  j["forgetting"] = {{"probe_iters", 200}, {"stride", 20}};
  return j;
}

namespace {

// every user key must exist in the defaults with a compatible type
void check_unknown_keys(const json& user, const json& defaults, const std::string& path) {
  if (!user.is_object()) return;
  if (!defaults.is_object())
    throw ConfigError("config: unexpected object at " + (path.empty() ? "/" : path));
  for (const auto& [key, val] : user.items()) {
    const std::string here = path + "/" + key;
    if (!defaults.contains(key)) throw ConfigError("config: unknown key " + here);
    const json& dv = defaults.at(key);
    if (val.is_object()) {
      check_unknown_keys(val, dv, here);
    } else if (val.is_array() != dv.is_array()) {
      throw ConfigError("config: wrong type at " + here);
    } else if (!val.is_array() && !dv.is_null()) {
      const bool both_num = val.is_number() && dv.is_number();
      const bool both_str = val.is_string() && dv.is_string();
      const bool both_bool = val.is_boolean() && dv.is_boolean();
      if (!(both_num || both_str || both_bool))
        throw ConfigError("config: wrong type at " + here);
    }
  }
}

void deep_merge(json& base, const json& user) {
  if (!user.is_object()) {
    base = user;
    return;
  }
  for (const auto& [key, val] : user.items()) {
    if (val.is_object() && base.contains(key) && base[key].is_object())
      deep_merge(base[key], val);
    else
      base[key] = val;
  }
}

template <typename T>
T need_pos(const json& j, const std::string& path) {
  T v = j.get<T>();
  if (!(v > 0)) throw ConfigError("config: " + path + " must be positive");
  return v;
}

}  // namespace

GaussianMixture RunConfig::gmm1d_truth() const {
  GaussianMixture m;
  const Index k = static_cast<Index>(gmm1d.data_means.size());
  m.weights = Vec::Constant(k, 1.0 / static_cast<double>(k));
  m.means.resize(k, 1);
  m.vars.resize(k);
  for (Index i = 0; i < k; ++i) {
    m.means(i, 0) = gmm1d.data_means[static_cast<size_t>(i)];
    const double s = gmm1d.data_sigmas[static_cast<size_t>(i)];
    m.vars(i) = s * s;
  }
  m.validate();
  return m;
}

RunConfig parse_run_config(const json& user) {
  std::string scale = "paper";
  if (user.contains("scale")) {
    if (!user["scale"].is_string()) throw ConfigError("config: /scale must be a string");
    scale = user["scale"].get<std::string>();
  }
  json merged = default_config_json(scale);
  check_unknown_keys(user, merged, "");
  deep_merge(merged, user);

  RunConfig rc;
  rc.echo = merged;
  rc.experiment = merged["experiment"].get<std::string>();
  static const std::set<std::string> kExperiments = {
      "variance-study", "bridge-25g", "baseline-25g", "gmm1d-suite", "forgetting"};
  if (!kExperiments.count(rc.experiment))
    throw ConfigError("config: /experiment unknown value " + rc.experiment);
  rc.seeds.clear();
  for (const auto& s : merged["seeds"]) rc.seeds.push_back(s.get<std::uint64_t>());
  if (rc.seeds.empty()) throw ConfigError("config: /seeds must not be empty");
  rc.out_dir = merged["out_dir"].get<std::string>();
  rc.scale = merged["scale"].get<std::string>();
  rc.baseline_kind = merged["baseline_kind"].get<std::string>();
  baseline_from(rc.baseline_kind);  // validates

  const json& data = merged["data"];
  if (data["kind"].get<std::string>() != "grid25")
    throw ConfigError("config: /data/kind must be grid25");
  rc.data_spacing = need_pos<double>(data["spacing"], "/data/spacing");
  rc.data_component_var = need_pos<double>(data["component_var"], "/data/component_var");

  const json& t = merged["train"];
  if (!t["steps"].is_array() || t["steps"].size() != 3)
    throw ConfigError("config: /train/steps must be [I, II, III]");
  rc.train.steps1 = t["steps"][0].get<long>();
  rc.train.steps2 = t["steps"][1].get<long>();
  rc.train.steps3 = t["steps"][2].get<long>();
  if (rc.train.steps1 < 0 || rc.train.steps2 < 0 || rc.train.steps3 < 0)
    throw ConfigError("config: /train/steps entries must be >= 0");
  rc.train.batch = need_pos<long>(t["batch"], "/train/batch");
  rc.train.lr = need_pos<double>(t["lr"], "/train/lr");
  rc.train.adam_beta1 = t["adam_beta1"].get<double>();
  if (!(rc.train.adam_beta1 >= 0.0 && rc.train.adam_beta1 < 1.0))
    throw ConfigError("config: /train/adam_beta1 must be in [0,1)");
  rc.train.adam_beta2 = t["adam_beta2"].get<double>();
  if (!(rc.train.adam_beta2 >= 0.0 && rc.train.adam_beta2 < 1.0))
    throw ConfigError("config: /train/adam_beta2 must be in [0,1)");
  rc.train.reg = regularizer_from(t["regularizer"].get<std::string>());
  rc.train.metric_cadence = need_pos<long>(t["metric_cadence"], "/train/metric_cadence");
  rc.train.disc_steps = need_pos<long>(t["disc_steps"], "/train/disc_steps");
  const std::string order = t["update_order"].get<std::string>();
  if (order != "beta_first" && order != "theta_first")
    throw ConfigError("config: /train/update_order must be beta_first or theta_first");
  rc.train.beta_first = order == "beta_first";

  const json& n = merged["nets"];
  rc.train.nets.d_z = need_pos<Index>(n["d_z"], "/nets/d_z");
  rc.train.nets.gen_hidden = hidden_from_json(n["gen_hidden"]);
  rc.train.nets.disc_hidden = hidden_from_json(n["disc_hidden"]);
  rc.train.nets.enc_hidden = hidden_from_json(n["enc_hidden"]);
  for (const auto* h : {&rc.train.nets.gen_hidden, &rc.train.nets.disc_hidden,
                        &rc.train.nets.enc_hidden}) {
    if (h->empty()) throw ConfigError("config: /nets hidden lists must not be empty");
    for (Index w : *h)
      if (w < 1) throw ConfigError("config: /nets hidden sizes must be positive");
  }

  const json& s = merged["schedule"];
  rc.train.schedule.alpha_family = alpha_family_from(s["alpha_family"].get<std::string>());
  rc.train.schedule.gamma_family = gamma_family_from(s["gamma_family"].get<std::string>());
  rc.train.schedule.a = s["a"].get<double>();
  rc.train.schedule.b = s["b"].get<double>();
  rc.train.schedule.c = s["c"].get<double>();
  rc.train.schedule.d = s["d"].get<double>();
  rc.train.schedule.eps = s["eps"].get<double>();
  if (!(rc.train.schedule.eps > 0.0 && rc.train.schedule.eps < 0.1))
    throw ConfigError("config: /schedule/eps must be in (0, 0.1)");

  const json& b = merged["bridge"];
  rc.train.bridge.sigma2 = need_pos<double>(b["sigma2"], "/bridge/sigma2");
  rc.train.bridge.exp_clamp = need_pos<double>(b["exp_clamp"], "/bridge/exp_clamp");
  rc.train.bridge.gp_gamma = b["gp_gamma"].get<double>();
  rc.train.bridge.mc_batch = rc.train.batch;

  const json& m = merged["metrics"];
  rc.train.metrics.kde_samples = need_pos<long>(m["kde_samples"], "/metrics/kde_samples");
  rc.train.metrics.kde_var = need_pos<double>(m["kde_var"], "/metrics/kde_var");
  rc.train.metrics.held_out = need_pos<long>(m["held_out"], "/metrics/held_out");
  rc.train.metrics.coverage_radius =
      need_pos<double>(m["coverage_radius"], "/metrics/coverage_radius");
  rc.train.metrics.coverage_min_count = m["coverage_min_count"].get<int>();
  if (rc.train.metrics.coverage_min_count < 1)
    throw ConfigError("config: /metrics/coverage_min_count must be positive");
  rc.train.metrics.classifier_data =
      need_pos<long>(m["classifier_data"], "/metrics/classifier_data");
  rc.train.metrics.classifier.hidden = hidden_from_json(m["classifier_hidden"]);
  rc.train.metrics.classifier.max_epochs =
      need_pos<long>(m["classifier_max_epochs"], "/metrics/classifier_max_epochs");

  const json& v = merged["variance"];
  rc.variance.mu = v["mu"].get<double>();
  rc.variance.sigma = need_pos<double>(v["sigma"], "/variance/sigma");
  rc.variance.alphas.clear();
  for (const auto& a : v["alphas"]) {
    const double av = a.get<double>();
    if (!(av > 0.0 && av < 1.0))
      throw ConfigError("config: /variance/alphas entries must be in (0,1)");
    rc.variance.alphas.push_back(av);
  }
  rc.variance.trials = need_pos<long>(v["trials"], "/variance/trials");
  if (rc.variance.trials < 2) throw ConfigError("config: /variance/trials must be >= 2");

  const json& g = merged["gmm1d"];
  rc.gmm1d.methods.clear();
  for (const auto& mm : g["methods"]) {
    const std::string name = mm.get<std::string>();
    combine_method_from(name);  // validates
    rc.gmm1d.methods.push_back(name);
  }
  rc.gmm1d.train.components = g["components"].get<int>();
  if (rc.gmm1d.train.components < 1)
    throw ConfigError("config: /gmm1d/components must be positive");
  rc.gmm1d.data_means.clear();
  for (const auto& x : g["data_means"]) rc.gmm1d.data_means.push_back(x.get<double>());
  rc.gmm1d.data_sigmas.clear();
  for (const auto& x : g["data_sigmas"]) {
    const double sv = x.get<double>();
    if (!(sv > 0.0)) throw ConfigError("config: /gmm1d/data_sigmas must be positive");
    rc.gmm1d.data_sigmas.push_back(sv);
  }
  if (rc.gmm1d.data_means.size() != rc.gmm1d.data_sigmas.size() ||
      rc.gmm1d.data_means.empty())
    throw ConfigError("config: /gmm1d data_means and data_sigmas must match");
  if (!g["steps"].is_array() || g["steps"].size() != 3)
    throw ConfigError("config: /gmm1d/steps must be [I, II, III]");
  rc.gmm1d.train.steps1 = g["steps"][0].get<long>();
  rc.gmm1d.train.steps2 = g["steps"][1].get<long>();
  rc.gmm1d.train.steps3 = g["steps"][2].get<long>();
  if (rc.gmm1d.train.total_steps() < 1)
    throw ConfigError("config: /gmm1d/steps must total >= 1");
  rc.gmm1d.train.lr = need_pos<double>(g["lr"], "/gmm1d/lr");
  rc.gmm1d.train.adam_beta1 = g["adam_beta1"].get<double>();
  rc.gmm1d.train.adam_beta2 = g["adam_beta2"].get<double>();
  rc.gmm1d.train.schedule = rc.train.schedule;
  if (!g["grid"].is_array() || g["grid"].size() != 3)
    throw ConfigError("config: /gmm1d/grid must be [lo, hi, n]");
  rc.gmm1d.train.grid_lo = g["grid"][0].get<double>();
  rc.gmm1d.train.grid_hi = g["grid"][1].get<double>();
  rc.gmm1d.train.grid_n = g["grid"][2].get<Index>();
  if (!(rc.gmm1d.train.grid_lo < rc.gmm1d.train.grid_hi) || rc.gmm1d.train.grid_n < 33)
    throw ConfigError("config: /gmm1d/grid malformed");
  rc.gmm1d.train.init_mean_lo = g["init_mean_range"][0].get<double>();
  rc.gmm1d.train.init_mean_hi = g["init_mean_range"][1].get<double>();
  if (!(rc.gmm1d.train.init_mean_lo < rc.gmm1d.train.init_mean_hi))
    throw ConfigError("config: /gmm1d/init_mean_range malformed");
  rc.gmm1d.train.init_log_sigma = g["init_log_sigma"].get<double>();
  rc.gmm1d.train.success_tol = need_pos<double>(g["success_tol"], "/gmm1d/success_tol");
  rc.gmm1d.trace_cadence = need_pos<long>(g["trace_cadence"], "/gmm1d/trace_cadence");

  const json& f = merged["forgetting"];
  rc.forgetting.probe_iters = need_pos<long>(f["probe_iters"], "/forgetting/probe_iters");
  rc.forgetting.stride = need_pos<long>(f["stride"], "/forgetting/stride");

  rc.train.validate();
  return rc;
}

void apply_override(json& tree, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set expects key.path=value, got: " + spec);
  const std::string path = spec.substr(0, eq);
  const std::string raw = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;  // bare strings are allowed unquoted
  }
  json* cur = &tree;
  size_t pos = 0;
  while (true) {
    const size_t dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (key.empty()) throw ConfigError("--set has an empty path segment: " + spec);
    if (dot == std::string::npos) {
      (*cur)[key] = value;
      break;
    }
    cur = &(*cur)[key];
    pos = dot + 1;
  }
}

RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json user;
  try {
    user = json::parse(text);
  } catch (const json::parse_error& e) {
    // translate the byte offset into line:column
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": " + e.what());
  }
  for (const auto& ov : overrides) apply_override(user, ov);
  return parse_run_config(user);
}

}  // namespace ab
