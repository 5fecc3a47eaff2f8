#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ab/schedules.hpp"

using namespace ab;

TEST_CASE("iteration-to-t mapping") {
  ScheduleSpec s;
  s.eps = 1e-3;
  s.num_iters = 3;
  CHECK(t_of_iter(1, s) == doctest::Approx(s.eps));
  CHECK(t_of_iter(3, s) == doctest::Approx(1.0 - s.eps));
  CHECK(t_of_iter(2, s) == doctest::Approx(0.5));
  CHECK_THROWS_AS(t_of_iter(0, s), Error);
  CHECK_THROWS_AS(t_of_iter(4, s), Error);
}

TEST_CASE("alpha families") {
  ScheduleSpec s;
  s.alpha_family = AlphaFamily::kLinear;
  CHECK(alpha_at(0.25, s) == doctest::Approx(0.25));
  s.alpha_family = AlphaFamily::kX5;
  CHECK(alpha_at(0.5, s) == doctest::Approx(0.5));
  s.alpha_family = AlphaFamily::kSigmoid;
  const double sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); }(0.0);
  const double expect = (sig - 1.0 / (1.0 + std::exp(10.0))) /
                        (1.0 / (1.0 + std::exp(-10.0)) - 1.0 / (1.0 + std::exp(10.0)));
  CHECK(alpha_at(0.5, s) == doctest::Approx(expect));
  CHECK(alpha_at(0.5, s) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("gamma families hit the endpoints exactly") {
  ScheduleSpec s;
  for (auto fam : {GammaFamily::kLinear, GammaFamily::kSigmoid, GammaFamily::kCosine,
                   GammaFamily::kSquare}) {
    s.gamma_family = fam;
    CHECK(std::abs(gamma_at(0.0, s)) <= 1e-12);
    CHECK(std::abs(gamma_at(1.0, s) - 1.0) <= 1e-12);
  }
  s.gamma_family = GammaFamily::kCosine;
  CHECK(gamma_at(0.5, s) == doctest::Approx(0.5));
  s.gamma_family = GammaFamily::kSquare;
  CHECK(gamma_at(0.5, s) == doctest::Approx(0.75));
}

TEST_CASE("schedules are monotone on a 1000-point grid") {
  ScheduleSpec s;
  for (auto af : {AlphaFamily::kLinear, AlphaFamily::kSigmoid, AlphaFamily::kX5}) {
    s.alpha_family = af;
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = 1e-3 + (1.0 - 2e-3) * i / 1000.0;
      const double a = alpha_at(t, s);
      CHECK(a >= prev);
      CHECK(a > 0.0);
      CHECK(a < 1.0);
      prev = a;
    }
  }
  for (auto gf : {GammaFamily::kLinear, GammaFamily::kSigmoid, GammaFamily::kCosine,
                  GammaFamily::kSquare}) {
    s.gamma_family = gf;
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double g = gamma_at(i / 1000.0, s);
      CHECK(g >= prev);
      prev = g;
    }
  }
}

TEST_CASE("spec validation") {
  ScheduleSpec s;
  s.eps = 0.5;
  CHECK_THROWS_AS(s.validate(), Error);
  s.eps = 1e-3;
  s.num_iters = 1;
  CHECK_THROWS_AS(s.validate(), Error);
}
