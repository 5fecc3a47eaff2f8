#pragma once

#include <vector>

#include "ab/tensor.hpp"

namespace ab {

// Adam with bias correction. First/second moments mirror the parameter
// shapes; t counts completed steps.
struct AdamState {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
  long t = 0;
  std::vector<Mat> m;
  std::vector<Mat> v;

  AdamState() = default;
  AdamState(double lr_, double b1, double b2, double eps_ = 1e-8)
      : lr(lr_), beta1(b1), beta2(b2), eps(eps_) {}
};

void adam_step(std::vector<Mat*> params, const std::vector<Mat>& grads, AdamState& state);

}  // namespace ab
