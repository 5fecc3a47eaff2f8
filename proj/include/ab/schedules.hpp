#pragma once

#include <string>

#include "ab/tensor.hpp"

namespace ab {

enum class AlphaFamily { kLinear, kSigmoid, kX5 };
enum class GammaFamily { kLinear, kSigmoid, kCosine, kSquare };

AlphaFamily alpha_family_from(const std::string& s);
GammaFamily gamma_family_from(const std::string& s);
std::string to_string(AlphaFamily f);
std::string to_string(GammaFamily f);

// alpha(t) and gamma_alpha families with their hyperparameters, plus the
// iteration-to-t mapping over NumIters steps.
struct ScheduleSpec {
  AlphaFamily alpha_family = AlphaFamily::kSigmoid;
  GammaFamily gamma_family = GammaFamily::kSigmoid;
  double a = 20.0, b = -10.0;  // alpha sigmoid
  double c = 20.0, d = -10.0;  // gamma sigmoid
  double eps = 1e-3;
  long num_iters = 2;

  void validate() const;
};

// t = eps + (iter-1)(1-2 eps)/(NumIters-1), iter in [1, NumIters]
double t_of_iter(long iter, const ScheduleSpec& spec);

// monotone nondecreasing, strictly inside (0,1) for t in [eps, 1-eps]
double alpha_at(double t, const ScheduleSpec& spec);

// gamma_0 = 0 and gamma_1 = 1 exactly for every family
double gamma_at(double alpha, const ScheduleSpec& spec);

}  // namespace ab
