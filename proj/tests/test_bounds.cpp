#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lpgcn/bounds.hpp"
#include "lpgcn/errors.hpp"
#include "lpgcn/rng.hpp"

using namespace lpgcn;

namespace {
const double kPGrid[] = {1.001, 1.149, 1.32, 1.516, 1.741, 2.0};

BoundInputs random_inputs(std::mt19937_64& rng) {
  BoundInputs in;
  in.a_l = uniform_real(rng, 0.1, 2.0);
  in.a_sigma = uniform_real(rng, 0.1, 2.0);
  in.lambda_g_max = uniform_real(rng, 0.1, 5.0);
  in.g_e = uniform_real(rng, 0.1, 5.0);
  in.eta = uniform_real(rng, 1e-4, 0.5);
  in.n = 20 + bounded_uint(rng, 2000);
  in.T = 1 + bounded_uint(rng, 200);
  in.p = uniform_real(rng, 1.001, 2.0);
  in.lambda = uniform_real(rng, 1e-4, 1.0);
  // Realistic regimes have B >= lambda (B is a loss bound, lambda a small
  // regularization weight); the monotonicity in p needs B/lambda >= 1.
  in.B = in.lambda * uniform_real(rng, 1.0, 2000.0);
  in.lambda_t = in.eta * in.lambda;
  in.delta = uniform_real(rng, 0.01, 0.5);
  return in;
}
}  // namespace

TEST_CASE("minimizer_radius") {
  CHECK(minimizer_radius(0.7, 0.7, 1.3) == doctest::Approx(1.0));
  CHECK(minimizer_radius(1.0, 1e-3, 2.0) == doctest::Approx(31.6227766).epsilon(1e-6));
  // 1000^(1/1.001)
  CHECK(minimizer_radius(1.0, 1e-3, 1.001) == doctest::Approx(993.1229018).epsilon(1e-6));
  CHECK_THROWS_AS(minimizer_radius(1.0, 0.0, 1.5), InputError);
  CHECK_THROWS_AS(minimizer_radius(1.0, 1.0, 2.5), InputError);
}

TEST_CASE("c_p_lambda") {
  CHECK(c_p_lambda(2.0, 1.0, 1.0, 1.0) == doctest::Approx(14.0));
  CHECK(c_p_lambda(2.0, 1e-3, 1e-4, 1.0) == doctest::Approx(4.42719e6).epsilon(1e-5));
  // Diverges towards p = 1 (B >= lambda regime).
  CHECK(c_p_lambda(1.001, 1e-3, 1e-4, 1.0) > c_p_lambda(1.5, 1e-3, 1e-4, 1.0));
  CHECK(c_p_lambda(1.5, 1e-3, 1e-4, 1.0) > c_p_lambda(2.0, 1e-3, 1e-4, 1.0));
}

TEST_CASE("stability_beta closed cases") {
  SUBCASE("T = 1 is the bare prefactor") {
    BoundInputs in;
    in.a_l = 1.0;
    in.a_sigma = 1.0;
    in.lambda_g_max = 1.0;
    in.g_e = 1.0;
    in.eta = 0.1;
    in.n = 100;
    in.T = 1;
    in.p = 2.0;
    in.lambda = 1e-3;
    in.lambda_t = 1e-4;
    in.B = 1.0;
    const auto beta = stability_beta(in);
    CHECK(beta.value == doctest::Approx(4427.19).epsilon(1e-4));
    CHECK_FALSE(beta.saturated);
  }

  SUBCASE("doubling n halves beta") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 50; ++rep) {
      BoundInputs in = random_inputs(rng);
      BoundInputs in2 = in;
      in2.n = in.n * 2;
      const auto b1 = stability_beta(in);
      const auto b2 = stability_beta(in2);
      CHECK(b2.log_value == doctest::Approx(b1.log_value - std::log(2.0)).epsilon(1e-10));
    }
  }

  SUBCASE("saturation at large T is reported, not hidden") {
    BoundInputs in;
    in.T = 100000;
    in.p = 1.001;
    in.lambda = 1e-3;
    in.lambda_t = 1e-4;
    in.B = 1.0;
    in.n = 100;
    in.eta = 0.1;
    const auto beta = stability_beta(in);
    CHECK(beta.saturated);
    CHECK(std::isinf(beta.value));
    CHECK(std::isfinite(beta.log_value));
  }
}

TEST_CASE("stability_beta equals the unrolled recursion sum") {
  // Large lambda_t keeps the geometric ratio small enough that the direct
  // term-by-term summation does not overflow.
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 500; ++rep) {
    BoundInputs in;
    in.a_l = uniform_real(rng, 0.2, 1.5);
    in.a_sigma = uniform_real(rng, 0.2, 1.5);
    in.lambda_g_max = uniform_real(rng, 0.2, 3.0);
    in.g_e = uniform_real(rng, 0.2, 3.0);
    in.eta = uniform_real(rng, 1e-3, 0.3);
    in.n = 10 + bounded_uint(rng, 500);
    in.T = 1 + bounded_uint(rng, 40);
    in.p = uniform_real(rng, 1.2, 2.0);
    in.lambda = uniform_real(rng, 0.3, 1.0);
    in.B = in.lambda * uniform_real(rng, 1.0, 3.0);
    in.lambda_t = uniform_real(rng, 5.0, 50.0);

    const double c = c_p_lambda(in.p, in.lambda, in.lambda_t, in.B);
    const double q =
        c * (1.0 + (in.a_sigma * in.a_sigma + in.a_l) * in.eta * in.g_e * in.g_e);
    double sum = 0.0, term = 1.0;
    for (std::size_t t = 1; t <= in.T; ++t) {
      sum += term;
      term *= q;
    }
    const double direct = in.a_l * in.a_l * in.a_sigma * in.a_sigma * in.lambda_g_max *
                          in.eta * c * in.g_e / static_cast<double>(in.n) * sum;
    const auto beta = stability_beta(in);
    CHECK_FALSE(beta.saturated);
    CHECK(beta.value == doctest::Approx(direct).epsilon(1e-11));
  }
}

TEST_CASE("stability_beta monotonicity") {
  std::mt19937_64 rng(7);

  SUBCASE("non-increasing in p over the grid") {
    for (int rep = 0; rep < 100; ++rep) {
      BoundInputs in = random_inputs(rng);
      double prev = std::numeric_limits<double>::infinity();
      for (double p : kPGrid) {
        in.p = p;
        const double lv = stability_beta(in).log_value;
        CHECK(lv <= prev + 1e-9);
        prev = lv;
      }
    }
  }

  SUBCASE("strictly increasing in lambda_g_max") {
    for (int rep = 0; rep < 100; ++rep) {
      BoundInputs in = random_inputs(rng);
      BoundInputs bigger = in;
      bigger.lambda_g_max = in.lambda_g_max * uniform_real(rng, 1.1, 4.0);
      CHECK(stability_beta(bigger).log_value > stability_beta(in).log_value);
    }
  }
}

TEST_CASE("generalization_bound") {
  CHECK(generalization_bound(0.0, 1.0, 50, std::exp(-1.0)) == doctest::Approx(0.1));
  CHECK(generalization_bound(0.01, 1.0, 100, 0.05) ==
        doctest::Approx(0.6319).epsilon(1e-3));
  // beta_n = 0 leaves only the B term.
  CHECK(generalization_bound(0.0, 2.0, 200, 0.1) ==
        doctest::Approx(2.0 * std::sqrt(std::log(10.0) / 400.0)));

  SUBCASE("increasing in beta, decreasing in delta") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 100; ++rep) {
      const double beta = uniform_real(rng, 0.0, 1.0);
      const double B = uniform_real(rng, 0.1, 5.0);
      const std::size_t n = 10 + bounded_uint(rng, 1000);
      const double delta = uniform_real(rng, 0.05, 0.5);
      CHECK(generalization_bound(beta + 0.1, B, n, delta) >
            generalization_bound(beta, B, n, delta));
      CHECK(generalization_bound(beta, B, n, delta * 0.5) >
            generalization_bound(beta, B, n, delta));
    }
  }

  CHECK_THROWS_AS(generalization_bound(0.1, 1.0, 10, 0.0), InputError);
  CHECK_THROWS_AS(generalization_bound(0.1, 1.0, 10, 1.0), InputError);
}

TEST_CASE("check_strong_convexity") {
  CHECK(check_strong_convexity(0.7, 0.7, 1.5) == doctest::Approx(0.0));

  SUBCASE("p = 2 identity") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 1000; ++rep) {
      const double a = uniform_real(rng, -10.0, 10.0);
      const double b = uniform_real(rng, -10.0, 10.0);
      CHECK(std::abs(check_strong_convexity(a, b, 2.0)) <= 1e-12);
    }
  }

  SUBCASE("one-sided inequality on random samples") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 100000; ++rep) {
      const double a = uniform_real(rng, -10.0, 10.0);
      const double b = uniform_real(rng, -10.0, 10.0);
      const double p = uniform_real(rng, 1.001, 2.0);
      if (a == 0.0 && b == 0.0) continue;
      CHECK(check_strong_convexity(a, b, p) >= -1e-12);
    }
  }

  CHECK_THROWS_AS(check_strong_convexity(0.0, 0.0, 1.5), InputError);
}
