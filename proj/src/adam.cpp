#include "ab/adam.hpp"

#include <cmath>

namespace ab {

void adam_step(std::vector<Mat*> params, const std::vector<Mat>& grads, AdamState& state) {
  if (params.size() != grads.size()) throw Error("adam_step: params/grads count mismatch");
  if (state.m.empty()) {
    for (const Mat* p : params) {
      state.m.push_back(Mat::Zero(p->rows(), p->cols()));
      state.v.push_back(Mat::Zero(p->rows(), p->cols()));
    }
  }
  if (state.m.size() != params.size()) throw Error("adam_step: state size mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (size_t i = 0; i < params.size(); ++i) {
    Mat& p = *params[i];
    const Mat& g = grads[i];
    if (!same_shape(p, g) || !same_shape(p, state.m[i]))
      throw Error("adam_step: shape mismatch");
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g.cwiseProduct(g);
    const Mat mhat = state.m[i] / bc1;
    const Mat vhat = state.v[i] / bc2;
    p.array() -= state.lr * mhat.array() / (vhat.array().sqrt() + state.eps);
  }
}

}  // namespace ab
