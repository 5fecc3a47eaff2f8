#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ab/nets.hpp"
#include "testutil.hpp"

using namespace ab;

namespace {

MlpSpec spec_of(Index in, std::vector<Index> hidden, Index out, bool sn = false) {
  MlpSpec s;
  s.in_dim = in;
  s.hidden = std::move(hidden);
  s.out_dim = out;
  s.spectral_norm = sn;
  return s;
}

// smallest |preactivation| across the net; finite-difference checks on the
// piecewise-linear net are only valid away from the kinks
double min_preact(const MlpParams& p, const Mat& X) {
  double m = 1e300;
  Mat h = X;
  for (size_t k = 0; k < p.layers.size(); ++k) {
    Mat pre = h * p.layers[k].W;
    pre.rowwise() += p.layers[k].b.row(0);
    m = std::min(m, pre.cwiseAbs().minCoeff());
    if (k + 1 < p.layers.size())
      h = (pre.array() > 0.0).select(pre, p.spec.lrelu_slope * pre);
    else
      h = pre;
  }
  return m;
}

}  // namespace

TEST_CASE("initialization contract") {
  Rng rng(1);
  MlpParams p = mlp_init(spec_of(400, {400}, 2), rng);
  CHECK(p.layers.back().b.cwiseAbs().maxCoeff() == 0.0);
  const Mat& W = p.layers[0].W;
  const double std_emp = std::sqrt(W.array().square().mean());
  CHECK(std::abs(std_emp - std::sqrt(2.0 / 400.0)) < 0.1 * std::sqrt(2.0 / 400.0));

  Rng r2(77), r3(77);
  MlpParams a = mlp_init(spec_of(8, {16}, 4), r2);
  MlpParams b = mlp_init(spec_of(8, {16}, 4), r3);
  CHECK((a.layers[0].W - b.layers[0].W).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward basics") {
  Rng rng(2);
  {
    MlpParams p = mlp_init(spec_of(3, {4}, 2), rng);
    for (auto& l : p.layers) l.W.setZero();
    CHECK(mlp_eval(p, rng.normal_mat(5, 3)).cwiseAbs().maxCoeff() == 0.0);
  }
  {
    MlpParams p = mlp_init(spec_of(3, {}, 3), rng);
    p.layers[0].W = Mat::Identity(3, 3);
    p.layers[0].b.setZero();
    Mat x = rng.normal_mat(4, 3);
    CHECK((mlp_eval(p, x) - x).cwiseAbs().maxCoeff() == 0.0);
  }
  {
    MlpParams gen = mlp_init(spec_of(2, {400, 400, 400, 400}, 2), rng);
    Mat z = rng.normal_mat(50, 2);
    Mat out = mlp_eval(gen, z);
    CHECK(out.rows() == 50);
    CHECK(out.cols() == 2);
  }
}

TEST_CASE("graph forward equals plain forward") {
  Rng rng(4);
  MlpParams p = mlp_init(spec_of(3, {8, 8}, 2), rng);
  Mat x = rng.normal_mat(6, 3);
  Graph g;
  Value out = mlp_node(g, p, g.constant(x), true);
  CHECK((out.val() - mlp_eval(p, x)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mlp gradients match finite differences") {
  Rng rng(6);
  int done = 0;
  while (done < 20) {
    MlpParams p = mlp_init(spec_of(2, {16, 16}, 1), rng);
    Mat x = rng.normal_mat(8, 2);
    if (min_preact(p, x) < 1e-4) continue;  // too close to a kink for h=1e-5
    auto eval = [&]() {
      Graph g;
      Value out = mlp_node(g, p, g.constant(x), true);
      return mean_all(square(out)).val()(0, 0);
    };
    Graph g;
    Value out = mlp_node(g, p, g.constant(x), true);
    g.backward(mean_all(square(out)));
    std::vector<Mat> fd = abtest::finite_diff(eval, p.trainable());
    CHECK(abtest::max_rel_err(g.param_grads(), fd) < 1e-5);
    ++done;
  }
}

TEST_CASE("spectral normalization against the SVD oracle") {
  Rng rng(8);
  {
    MlpParams p = mlp_init(spec_of(6, {}, 6, true), rng);
    p.layers[0].W = 3.0 * Mat::Identity(6, 6);
    for (int i = 0; i < 5; ++i) spectral_normalize(p);
    CHECK(top_singular_value(p.layers[0].W) == doctest::Approx(1.0).epsilon(1e-6));
  }
  {
    // a weight already at sigma_max = 1 stays put once u converges
    MlpParams p = mlp_init(spec_of(5, {}, 5, true), rng);
    Mat W = rng.normal_mat(5, 5);
    W /= top_singular_value(W);
    p.layers[0].W = W;
    for (int i = 0; i < 50; ++i) spectral_normalize(p);
    Mat Wc = p.layers[0].W;
    spectral_normalize(p);
    CHECK((p.layers[0].W - Wc).cwiseAbs().maxCoeff() < 1e-6);
  }
  {
    // Power-iteration estimate vs exact SVD on a large random weight. The top
    // singular gap of a square Gaussian matrix scales like n^(-2/3), so ten
    // iterations land near 3% here; convergence to the oracle follows.
    Rng r(123);
    Mat W = r.normal_mat(400, 400, 1.0 / 20.0);
    const double exact = top_singular_value(W);
    Vec u = r.normal_mat(400, 1).col(0).normalized();
    Vec v(400);
    double est = 0.0;
    int iters = 0;
    auto iterate = [&](int upto) {
      for (; iters < upto; ++iters) {
        v = (W * u).normalized();
        u = (W.transpose() * v).normalized();
        est = v.dot(W * u);
      }
    };
    iterate(10);
    CHECK(est <= exact + 1e-12);  // the estimate approaches from below
    CHECK(std::abs(est - exact) / exact < 0.05);
    iterate(100);
    CHECK(std::abs(est - exact) / exact < 0.01);
  }
}

TEST_CASE("spectral normalization keeps top singular values near one during training") {
  Rng rng(9);
  MlpParams p = mlp_init(spec_of(4, {32, 32}, 1, true), rng);
  for (int step = 0; step < 30; ++step) {
    spectral_normalize(p);
    for (auto& l : p.layers) {
      CHECK(top_singular_value(l.W) <= 1.05);
      CHECK(l.u.norm() == doctest::Approx(1.0));
      CHECK(l.v.norm() == doctest::Approx(1.0));
    }
    // drift the weights at an optimizer-step scale
    for (auto& l : p.layers) l.W += rng.normal_mat(l.W.rows(), l.W.cols(), 0.002);
  }
}

TEST_CASE("encoder heads and reparameterization") {
  Rng rng(10);
  EncoderParams e = encoder_init(2, {32, 32}, 2, 0.2, rng);
  e.mu_head.W.setZero();
  e.logsig_head.W.setZero();
  Mat x = rng.normal_mat(50, 2);
  auto [mu, logsig] = encoder_eval(e, x);
  CHECK(mu.rows() == 50);
  CHECK(mu.cols() == 2);
  CHECK(logsig.rows() == 50);
  CHECK(logsig.cols() == 2);
  CHECK(mu.cwiseAbs().maxCoeff() == 0.0);
  CHECK(logsig.cwiseAbs().maxCoeff() == 0.0);  // sigma = 1
  // z = mu + sigma .* eps with eps = 0 is mu
  Mat z = mu.array() + logsig.array().exp() * Mat::Zero(50, 2).array();
  CHECK((z - mu).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("input gradient expression") {
  Rng rng(12);
  {
    // linear f(x) = w^T x + b has input gradient w
    MlpParams p = mlp_init(spec_of(3, {}, 1), rng);
    Mat x = rng.normal_mat(4, 3);
    Graph g;
    Value grad = input_gradient_node(g, p, x, false);
    for (int i = 0; i < 4; ++i)
      CHECK((grad.val().row(i).transpose() - p.layers[0].W.col(0)).cwiseAbs().maxCoeff() <
            1e-14);
  }
  {
    // one lReLU layer with all preactivations negative: grad = 0.2 * W w_out
    MlpParams p = mlp_init(spec_of(2, {8}, 1), rng);
    p.layers[0].b = Mat::Constant(1, 8, -100.0);  // force the negative side
    Mat x = rng.normal_mat(3, 2, 0.1);
    Graph g;
    Value grad = input_gradient_node(g, p, x, false);
    Mat expect = 0.2 * p.layers[0].W * p.layers[1].W;  // 2 x 1
    for (int i = 0; i < 3; ++i)
      CHECK((grad.val().row(i).transpose() - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
  {
    // expression value vs finite differences of f in x
    int done = 0;
    while (done < 10) {
      MlpParams p = mlp_init(spec_of(2, {16, 16}, 1), rng);
      Mat x = rng.normal_mat(5, 2);
      if (min_preact(p, x) < 1e-4) continue;
      Graph g;
      Value grad = input_gradient_node(g, p, x, false);
      const double h = 1e-5;
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 2; ++j) {
          Mat xp = x, xm = x;
          xp(i, j) += h;
          xm(i, j) -= h;
          const double fd = (mlp_eval(p, xp)(i, 0) - mlp_eval(p, xm)(i, 0)) / (2 * h);
          CHECK(abtest::rel_err(grad.val()(i, j), fd, 1e-3) < 1e-5);
        }
      ++done;
    }
  }
}
