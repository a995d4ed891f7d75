#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lpgcn/errors.hpp"
#include "lpgcn/kernels.hpp"
#include "lpgcn/prox.hpp"
#include "lpgcn/rng.hpp"
#include "oracles.hpp"

using namespace lpgcn;

namespace {
const double kPGrid[] = {1.001, 1.149, 1.32, 1.516, 1.741, 2.0};
}

TEST_CASE("prox_lp fixed points") {
  // p = 2 closed form: v / (1 + 2*lam).
  CHECK(prox_lp_scalar(3.0, 0.5, 2.0) == doctest::Approx(1.5).epsilon(1e-15));

  // Stationarity: 1 + 1*1.5*1^0.5 = 2.5.
  CHECK(prox_lp_scalar(2.5, 1.0, 1.5) == doctest::Approx(1.0).epsilon(1e-10));

  CHECK(prox_lp_scalar(0.0, 1.0, 1.5) == 0.0);
  const std::vector<double> zeros(5, 0.0);
  CHECK(prox_lp(zeros, 0.3, 1.7) == zeros);

  CHECK_THROWS_AS(prox_lp_scalar(1.0, 0.0, 1.5), InputError);
  CHECK_THROWS_AS(prox_lp_scalar(1.0, 1.0, 1.0), InputError);
  CHECK_THROWS_AS(prox_lp_scalar(1.0, 1.0, 2.5), InputError);
}

TEST_CASE("prox_lp matches the grid-search oracle") {
  std::mt19937_64 rng(3);
  for (double p : kPGrid) {
    for (int rep = 0; rep < 60; ++rep) {
      const double v = uniform_real(rng, -2.0, 2.0);
      const double lam = uniform_real(rng, 0.01, 2.0);
      const double mine = prox_lp_scalar(v, lam, p);
      const double grid = oracles::prox_grid_search(v, lam, p);
      CHECK(std::abs(mine - grid) <= 2e-4);
    }
  }
}

TEST_CASE("p=2 closed form to 1e-10") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const double v = uniform_real(rng, -10.0, 10.0);
    const double lam = uniform_real(rng, 1e-4, 3.0);
    CHECK(std::abs(prox_lp_scalar(v, lam, 2.0) - v / (1.0 + 2.0 * lam)) <= 1e-10);
  }
}

TEST_CASE("contraction, sign preservation, no hard zeros") {
  std::mt19937_64 rng(7);
  for (double p : kPGrid) {
    for (int rep = 0; rep < 300; ++rep) {
      const double v = uniform_real(rng, -5.0, 5.0);
      const double lam = uniform_real(rng, 1e-3, 3.0);
      const double w = prox_lp_scalar(v, lam, p);

      const double cap = std::pow(std::abs(v) / (lam * p), 1.0 / (p - 1.0));
      CHECK(std::abs(w) <= std::abs(v));
      CHECK(std::abs(w) <= cap);
      if (v != 0.0) {
        // Soft sparsity only: the root is positive in exact arithmetic, but
        // for p near 1 it can sit below the smallest denormal (the cap is
        // ratio^(1/(p-1))), where 0 is the correctly rounded value.
        if (cap > 1e-290) CHECK(w != 0.0);
        CHECK(std::signbit(w) == std::signbit(v));
      }
    }
  }
  // Extreme magnitudes.
  CHECK(std::abs(prox_lp_scalar(1e-14, 0.5, 1.5)) <=
        std::pow(1e-14 / (0.5 * 1.5), 2.0));
  CHECK(prox_lp_scalar(1e-14, 0.5, 1.5) > 0.0);
}

TEST_CASE("firm nonexpansiveness on random pairs") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t d = 1 + bounded_uint(rng, 12);
    const double p = uniform_real(rng, 1.001, 2.0);
    const double lam = uniform_real(rng, 0.01, 1.0);
    std::vector<double> u(d), v(d);
    for (auto& x : u) x = uniform_real(rng, -3.0, 3.0);
    for (auto& x : v) x = uniform_real(rng, -3.0, 3.0);
    const auto pu = prox_lp(u, lam, p);
    const auto pv = prox_lp(v, lam, p);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      lhs += (pu[i] - pv[i]) * (pu[i] - pv[i]);
      rhs += (u[i] - v[i]) * (u[i] - v[i]);
    }
    CHECK(std::sqrt(lhs) <= std::sqrt(rhs) + 1e-12);
  }
}

TEST_CASE("soft-threshold limit as p -> 1") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 400; ++rep) {
    const double v = uniform_real(rng, -10.0, 10.0);
    const double lam = uniform_real(rng, 0.01, 1.0);
    const double mine = prox_lp_scalar(v, lam, 1.001);
    const double soft = std::copysign(std::max(std::abs(v) - lam, 0.0), v);
    CHECK(std::abs(mine - soft) <= 1e-2);
  }
}

TEST_CASE("project_ball") {
  SUBCASE("outside the ball is normalized") {
    std::vector<double> v = {1.2, 1.6};  // norm 2
    const auto out = project_ball(v, 1.0);
    CHECK(out[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(0.8).epsilon(1e-15));
  }

  SUBCASE("inside the ball is untouched bitwise") {
    const std::vector<double> v = {0.3, -0.4};
    CHECK(project_ball(v, 1.0) == v);
  }

  SUBCASE("zero radius collapses to the origin") {
    const std::vector<double> v = {2.0, 1.0};
    const auto out = project_ball(v, 0.0);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);
  }

  SUBCASE("computed norm never exceeds the radius") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 2000; ++rep) {
      const std::size_t d = 1 + bounded_uint(rng, 40);
      std::vector<double> v(d);
      for (auto& x : v) x = uniform_real(rng, -10.0, 10.0);
      const double radius = uniform_real(rng, 0.0, 3.0);
      project_ball_inplace(v, radius);
      CHECK(std::sqrt(kernels::sum_sq(v.data(), d)) <= radius);
    }
  }

  SUBCASE("negative radius is rejected") {
    std::vector<double> v = {1.0};
    CHECK_THROWS_AS(project_ball_inplace(v, -1.0), InputError);
  }
}
