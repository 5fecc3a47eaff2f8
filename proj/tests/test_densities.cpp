#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ab/densities.hpp"
#include "testutil.hpp"

using namespace ab;

namespace {
Gaussian g1(double mu, double var) {
  return Gaussian::isotropic(Vec::Constant(1, mu), var);
}
LogDensity1d as_fn(const Gaussian& d) {
  return [d](double x) { return logpdf(d, Vec::Constant(1, x)); };
}
}  // namespace

TEST_CASE("standard normal log density at the mode") {
  CHECK(logpdf(Gaussian::standard(1), Vec::Zero(1)) ==
        doctest::Approx(-0.5 * std::log(2.0 * 3.14159265358979323846)));
}

TEST_CASE("degenerate two-component mixture equals its component") {
  GaussianMixture m;
  m.weights = Vec::Constant(2, 0.5);
  m.means = Mat::Zero(2, 1);
  m.vars = Vec::Constant(2, 1.0);
  m.validate();
  const Vec x = Vec::Constant(1, 0.7);
  CHECK(logpdf(m, x) == doctest::Approx(logpdf(Gaussian::standard(1), x)).epsilon(1e-12));
}

TEST_CASE("grid density normalizes over a fine grid") {
  GaussianMixture m = GaussianMixture::grid25(2.0, 2e-4);
  m.validate();
  // components barely overlap (sigma ~ 0.014 vs spacing 2), so the total mass
  // is the sum of per-component cell quadratures
  const Index n = 101;
  double total = 0.0;
  for (int c = 0; c < 25; ++c) {
    const double s = std::sqrt(m.vars(c));
    const double lo0 = m.means(c, 0) - 8 * s, lo1 = m.means(c, 1) - 8 * s;
    const double h = 16 * s / (n - 1);
    double cell = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        Vec x(2);
        x << lo0 + h * i, lo1 + h * j;
        double w = 1.0;
        if (i == 0 || i == n - 1) w *= 0.5;
        if (j == 0 || j == n - 1) w *= 0.5;
        cell += w * std::exp(logpdf(m, x));
      }
    total += cell * h * h;
  }
  CHECK(std::abs(total - 1.0) < 1e-4);
}

TEST_CASE("sampling statistics and determinism") {
  Rng rng(5);
  Mat x = sample(Gaussian::standard(1), 1000000, rng);
  CHECK(std::abs(x.mean()) < 0.005);
  const double var = (x.array() - x.mean()).square().sum() / (x.size() - 1);
  CHECK(std::abs(var - 1.0) < 0.01);

  GaussianMixture m;
  m.weights = Vec(2);
  m.weights << 1.0, 0.0;
  m.means = Mat(2, 1);
  m.means << 5.0, -5.0;
  m.vars = Vec::Constant(2, 1e-4);
  Rng r2(9);
  Mat y = sample(m, 200, r2);
  CHECK((y.array() > 4.0).all());

  Rng r3(17), r4(17);
  Mat a = sample(m, 50, r3), b = sample(m, 50, r4);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("closed-form KL between Gaussians") {
  CHECK(kl_gaussian(g1(0, 1), g1(0, 1)) == 0.0);
  CHECK(kl_gaussian(g1(3, 1), g1(0, 1)) == doctest::Approx(4.5));
  CHECK(kl_gaussian(g1(0, 4), g1(0, 1)) ==
        doctest::Approx(0.5 * (4.0 - 1.0 - std::log(4.0))));
}

TEST_CASE("closed-form alpha divergence") {
  CHECK(alpha_div_gaussian(g1(2, 1.3), g1(2, 1.3), 0.37) == doctest::Approx(0.0));
  CHECK(alpha_div_gaussian(g1(3, 1), g1(0, 1), 0.5) ==
        doctest::Approx(4.0 * (1.0 - std::exp(-9.0 / 8.0))));
  // limit alpha -> 0 is KL(q || p)
  CHECK(std::abs(alpha_div_gaussian(g1(3, 1), g1(0, 1), 1e-6) - 4.5) < 1e-4);
  // limit alpha -> 1 is KL(p || q)
  CHECK(std::abs(alpha_div_gaussian(g1(3, 1), g1(0, 1), 1.0 - 1e-6) - 4.5) < 1e-4);
  CHECK_THROWS_AS(alpha_div_gaussian(g1(0, 1), g1(0, 1), 1.2), Error);
}

TEST_CASE("quadrature oracle agrees with the closed form") {
  {
    const Gaussian p = g1(0, 1), q = g1(0, 1);
    const double d = alpha_div_quadrature(as_fn(p), as_fn(q), 0.3, grid_for(p, q));
    CHECK(std::abs(d) < 1e-10);
  }
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Gaussian p = g1(rng.uniform(-4, 4), rng.uniform(0.3, 3.0));
    const Gaussian q = g1(rng.uniform(-4, 4), rng.uniform(0.3, 3.0));
    const double a = rng.uniform(0.05, 0.95);
    const double dq = alpha_div_quadrature(as_fn(p), as_fn(q), a, grid_for(p, q));
    CHECK(std::abs(dq - alpha_div_gaussian(p, q, a)) < 1e-8);
  }
  // limit alpha -> 1 recovers KL(p || q)
  const Gaussian p = g1(1.0, 1.5), q = g1(0, 1);
  const double d = alpha_div_quadrature(as_fn(p), as_fn(q), 1.0 - 1e-6, grid_for(p, q));
  CHECK(std::abs(d - kl_gaussian(p, q)) < 1e-4);
}

TEST_CASE("quadrature flags a grid that is too coarse") {
  const Gaussian p = g1(0, 1e-4), q = g1(0, 1);
  QuadGrid bad{-8.0, 8.0, 65};
  CHECK_THROWS_AS(alpha_div_quadrature(as_fn(p), as_fn(q), 0.5, bad), Error);
}

TEST_CASE("optimal log ratio") {
  const Gaussian q = g1(0, 1), p = g1(3, 1);
  CHECK(optimal_log_ratio(q, q, Vec::Constant(1, 1.2)) == 0.0);
  CHECK(optimal_log_ratio(q, p, Vec::Constant(1, 1.5)) == doctest::Approx(0.0));
  CHECK(optimal_log_ratio(q, p, Vec::Zero(1)) == doctest::Approx(4.5));
}

TEST_CASE("alpha divergence is nonnegative, zero only at p=q") {
  Rng rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const Gaussian p = g1(rng.uniform(-3, 3), rng.uniform(0.3, 2.5));
    const Gaussian q = g1(rng.uniform(-3, 3), rng.uniform(0.3, 2.5));
    const double a = rng.uniform(0.05, 0.95);
    const double d = alpha_div_gaussian(p, q, a);
    CHECK(d >= -1e-12);
    const bool same = (p.mean - q.mean).norm() < 1e-12 && (p.var - q.var).norm() < 1e-12;
    if (!same) CHECK(d > 0.0);
  }
}

TEST_CASE("alpha divergence is continuous in alpha") {
  const Gaussian p = g1(3, 1), q = g1(0, 1);
  for (double a = 1e-4; a < 1.0 - 2e-4; a += 1e-3) {
    CHECK(std::abs(alpha_div_gaussian(p, q, a) - alpha_div_gaussian(p, q, a + 1e-4)) <
          1e-2);
  }
}

TEST_CASE("quadrature gradient oracle matches finite differences of the closed form") {
  const Gaussian q = g1(0, 1);
  for (double a : {0.1, 0.5, 0.9}) {
    const double mu = 1.7, sigma = 1.2;
    const auto grid = grid_for(g1(mu, sigma * sigma), q);
    const AlphaGradOracle o = alpha_div_grad_quadrature(mu, sigma, q, a, grid);
    const double h = 1e-6;
    auto d = [&](double m, double s) {
      return alpha_div_gaussian(g1(m, s * s), q, a);
    };
    const double fd_mu = (d(mu + h, sigma) - d(mu - h, sigma)) / (2 * h);
    const double fd_sig = (d(mu, sigma + h) - d(mu, sigma - h)) / (2 * h);
    CHECK(abtest::rel_err(o.d_mu, fd_mu) < 1e-6);
    CHECK(abtest::rel_err(o.d_sigma, fd_sig) < 1e-6);
  }
}
