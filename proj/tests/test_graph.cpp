#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ab/adam.hpp"
#include "ab/graph.hpp"
#include "ab/rng.hpp"
#include "testutil.hpp"

using namespace ab;

TEST_CASE("square and product derivatives") {
  {
    Graph g;
    Value x = g.param(scalar_mat(3.0));
    Value y = square(x);
    auto [val, grads] = forward_backward(g, y);
    CHECK(val == doctest::Approx(9.0));
    CHECK(grads[0](0, 0) == doctest::Approx(6.0));
  }
  {
    Graph g;
    Value x = g.param(scalar_mat(2.0));
    Value y = g.param(scalar_mat(5.0));
    auto [val, grads] = forward_backward(g, mul(x, y));
    CHECK(val == doctest::Approx(10.0));
    CHECK(grads[0](0, 0) == doctest::Approx(5.0));
    CHECK(grads[1](0, 0) == doctest::Approx(2.0));
  }
}

TEST_CASE("stop gradient blocks every path but keeps the value") {
  {
    Graph g;
    Value x = g.param(scalar_mat(4.0));
    Value s = stop_gradient(x);
    CHECK(s.val()(0, 0) == 4.0);
    // d/dx [sg(x) * x] = sg(x) = 4
    auto [val, grads] = forward_backward(g, mul(s, x));
    CHECK(val == doctest::Approx(16.0));
    CHECK(grads[0](0, 0) == doctest::Approx(4.0));
  }
  {
    Graph g;
    Value x = g.param(scalar_mat(4.0));
    Value y = square(stop_gradient(x));
    g.backward(y);
    CHECK(g.grad(x)(0, 0) == 0.0);
  }
}

TEST_CASE("seed must be scalar") {
  Graph g;
  Value x = g.param(Mat::Ones(2, 2));
  CHECK_THROWS_AS(g.backward(square(x)), Error);
}

TEST_CASE("backward does not mutate cached values") {
  Graph g;
  Rng rng(7);
  Value x = g.param(rng.normal_mat(3, 2));
  Mat before = x.val();
  Value loss = mean_all(square(leaky_relu(x, 0.2)));
  g.backward(loss);
  CHECK((x.val() - before).cwiseAbs().maxCoeff() == 0.0);
}

// one composite touching every differentiable op, checked against central
// finite differences
TEST_CASE("all ops against finite differences") {
  Rng rng(42);
  std::vector<Mat> hold = {rng.normal_mat(4, 3), rng.normal_mat(3, 2),
                           rng.normal_mat(1, 2), scalar_mat(0.7)};

  auto build = [&](Graph& g) {
    Value a = g.param(hold[0]);
    Value b = g.param(hold[1]);
    Value v = g.param(hold[2]);
    Value s = g.param(hold[3]);
    Value m = matmul(a, b);                        // 4x2
    Value mb = matmul_bt(m, b);                    // 4x3
    Value t1 = leaky_relu(add_rowvec(m, v), 0.2);  // 4x2
    Value t2 = softplus(mul_rowvec(m, v));
    Value t3 = exp(clamp(t1, -2.0, 2.0));
    Value t4 = log(add_scalar(square(t2), 1.0));
    Value t5 = mul_bscalar(add(t3, t4), s);
    Value t6 = add_bscalar(sub_bscalar(t5, s), s);
    Value t7 = logsumexp_rows(t6);  // 4x1
    Value t8 = add(rowsum(sub(t6, scale(t6, 0.5))), t7);
    Value t9 = add(t8, rowsum(tile_cols(t7, 3)));
    Value t10 = add(sum_all(mb), mean_all(square(t9)));
    return add(t10, sum_all(neg(m)));
  };

  Graph g;
  Value loss = build(g);
  g.backward(loss);
  std::vector<Mat> ad = g.param_grads();

  auto eval = [&]() {
    Graph g2;
    return build(g2).val()(0, 0);
  };
  std::vector<Mat*> ptrs = {&hold[0], &hold[1], &hold[2], &hold[3]};
  std::vector<Mat> fd = abtest::finite_diff(eval, ptrs);
  CHECK(abtest::max_rel_err(ad, fd) < 1e-5);
}

TEST_CASE("clamp counts boundary hits") {
  Graph g;
  Mat m(1, 4);
  m << -3.0, -1.0, 1.0, 3.0;
  clamp(g.constant(m), -2.0, 2.0);
  CHECK(g.clamp_hits() == 2);
}

TEST_CASE("adam first step and zero-gradient identity") {
  {
    Mat p = scalar_mat(1.0);
    AdamState st(1e-3, 0.9, 0.999);
    adam_step({&p}, {scalar_mat(1.0)}, st);
    CHECK(p(0, 0) == doctest::Approx(0.999).epsilon(1e-6));
  }
  {
    Mat p = scalar_mat(1.5);
    AdamState st(1e-3, 0.9, 0.999);
    adam_step({&p}, {scalar_mat(0.0)}, st);
    CHECK(p(0, 0) == 1.5);
  }
}

TEST_CASE("adam trajectories are bitwise deterministic") {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    Mat p = rng.normal_mat(3, 3);
    AdamState st(1e-2, 0.9, 0.999);
    for (int i = 0; i < 25; ++i) {
      Graph g;
      Value x = g.param(p);
      Value loss = mean_all(square(add_scalar(x, -0.3)));
      g.backward(loss);
      adam_step({&p}, g.param_grads(), st);
    }
    return p;
  };
  Mat a = run(11), b = run(11);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gradients match finite differences on random graphs") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Mat x = rng.normal_mat(5, 3);
    std::vector<Mat> hold = {rng.normal_mat(3, 3, 0.7)};
    auto eval = [&]() {
      Graph g;
      Value w = g.param(hold[0]);
      Value h = leaky_relu(matmul(g.constant(x), w), 0.2);
      return mean_all(square(h)).val()(0, 0);
    };
    Graph g;
    Value w = g.param(hold[0]);
    Value h = leaky_relu(matmul(g.constant(x), w), 0.2);
    g.backward(mean_all(square(h)));
    std::vector<Mat> fd = abtest::finite_diff(eval, {&hold[0]});
    CHECK(abtest::max_rel_err(g.param_grads(), fd) < 1e-5);
  }
}

TEST_CASE("rng state round-trips") {
  Rng a(123);
  (void)a.normal();
  std::string s = a.state();
  Rng b(0);
  b.set_state(s);
  for (int i = 0; i < 10; ++i) CHECK(a.normal() == b.normal());
}
