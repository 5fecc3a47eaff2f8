#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ab/gmm1d.hpp"
#include "ab/trainer.hpp"

namespace ab {

// config-file problems carry the offending location (json pointer-ish path or
// line:col for parse errors)
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct VarianceConfig {
  double mu = 3.0;
  double sigma = 1.0;
  std::vector<double> alphas = {0.1, 0.3, 0.5, 0.7, 0.9};
  long trials = 100;
};

struct ForgettingConfig {
  long probe_iters = 200;
  long stride = 20;
};

struct Gmm1dSuiteConfig {
  std::vector<std::string> methods = {"FR", "FRw", "FRw3", "alpha-bridge"};
  Gmm1dConfig train;
  std::vector<double> data_means = {6.0, -1.0, 1.0};
  std::vector<double> data_sigmas = {0.3, 0.3, 0.3};
  long trace_cadence = 25;
};

struct RunConfig {
  std::string experiment = "bridge-25g";
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string out_dir = "out";
  std::string scale = "paper";  // "paper" or "desk"
  std::string baseline_kind = "RKL-SN";
  // data (25-Gaussians grid)
  double data_spacing = 2.0;
  double data_component_var = 2e-4;
  TrainConfig train;  // seed field filled per run
  VarianceConfig variance;
  Gmm1dSuiteConfig gmm1d;
  ForgettingConfig forgetting;

  nlohmann::json echo;  // the fully-merged effective config

  GaussianMixture data25() const {
    return GaussianMixture::grid25(data_spacing, data_component_var);
  }
  GaussianMixture gmm1d_truth() const;
};

// the complete default tree for a scale ("paper" bakes in the published values)
nlohmann::json default_config_json(const std::string& scale = "paper");

// parse + merge over defaults + validate; rejects unknown keys
RunConfig parse_run_config(const nlohmann::json& user);

// file loader with line-precise parse errors; applies dotted --set overrides
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides);

// apply "a.b.c=json-literal" onto a tree
void apply_override(nlohmann::json& tree, const std::string& spec);

}  // namespace ab
