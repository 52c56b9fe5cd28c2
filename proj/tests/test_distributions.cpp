#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "vip/distributions.hpp"
#include "vip/error.hpp"

using vip::LoadRatio;
using vip::SurfingParams;

TEST_CASE("geometric_pmf point values") {
  CHECK(vip::geometric_pmf(LoadRatio(0.0), 0) == 1.0);
  CHECK(vip::geometric_pmf(LoadRatio(0.0), 3) == 0.0);
  CHECK(vip::geometric_pmf(LoadRatio(1.0), 2) == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("geometric_pmf rejects bad input") {
  CHECK_THROWS_AS(vip::geometric_pmf(LoadRatio(1.0), -1), vip::Error);
  CHECK_THROWS_AS(LoadRatio{-0.5}, vip::Error);
  CHECK_THROWS_AS(LoadRatio{std::nan("")}, vip::Error);
  CHECK_THROWS_AS(LoadRatio{INFINITY}, vip::Error);
}

TEST_CASE("geometric partial sums match the closed form") {
  for (const double rho : {0.0, 0.3, 1.0, 7.5, 40.0, 1e3}) {
    for (const std::int64_t lmax : {0, 1, 5, 60, 500}) {
      double sum = 0.0;
      for (std::int64_t L = 0; L <= lmax; ++L) sum += vip::geometric_pmf(LoadRatio(rho), L);
      const double closed = 1.0 - std::pow(rho / (1.0 + rho), static_cast<double>(lmax + 1));
      CHECK(sum == doctest::Approx(closed).epsilon(1e-12));
    }
  }
}

TEST_CASE("ig_density point values") {
  // sqrt(14 / (2 pi 14^3)) with a vanishing exponent.
  CHECK(vip::ig_density({14.0, 14.0}, 14.0) == doctest::Approx(0.0284958771715309).epsilon(1e-13));
  CHECK(vip::ig_density({1.0, 1.0}, 1.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(vip::ig_density({14.0, 14.0}, 1e-6) < 1e-100);
  CHECK_THROWS_AS(vip::ig_density({14.0, 14.0}, 0.0), vip::Error);
  CHECK_THROWS_AS(vip::ig_density({14.0, 14.0}, -1.0), vip::Error);
}

TEST_CASE("ig_density integrates to one") {
  for (const auto& p : {SurfingParams{14.0, 14.0}, SurfingParams{1.0, 50.0}, SurfingParams{50.0, 1.0}}) {
    CHECK(oracle::ig_upper_quadrature(p.mu, p.lambda, 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("surfing params report the inverse-Gaussian variance") {
  const SurfingParams p{14.0, 7.0};
  CHECK(p.variance() == doctest::Approx(14.0 * 14.0 * 14.0 / 7.0));
  CHECK_THROWS_AS((SurfingParams{0.0, 1.0}.validate()), vip::Error);
  CHECK_THROWS_AS((SurfingParams{1.0, -1.0}.validate()), vip::Error);
}

TEST_CASE("ig_upper_cdf point values") {
  const SurfingParams p{14.0, 14.0};
  CHECK(vip::ig_upper_cdf(p, 0.0) == 1.0);
  // mpmath quadrature at 40 digits.
  CHECK(std::abs(vip::ig_upper_cdf(p, 14.0) - 0.331897998776829393) < 1e-12);
  CHECK(std::abs(vip::ig_upper_cdf(p, 14.0) - oracle::ig_upper_quadrature(14.0, 14.0, 14.0)) < 1e-8);
  CHECK(vip::ig_upper_cdf(p, 1e6) < 1e-12);
  CHECK(vip::ig_upper_cdf(p, INFINITY) == 0.0);
  CHECK_THROWS_AS(vip::ig_upper_cdf(p, -1e-9), vip::Error);
}

TEST_CASE("ig_upper_cdf is non-increasing and matches quadrature on a wide grid") {
  for (const double mu : {0.5, 1.0, 7.0, 14.0, 50.0, 200.0}) {
    for (const double lam : {0.2, 1.0, 14.0, 50.0, 400.0}) {
      const SurfingParams p{mu, lam};
      double prev = 1.0;
      for (double x = 0.0; x < 2000.0; x = x * 1.3 + 0.05) {
        const double u = vip::ig_upper_cdf(p, x);
        CHECK(u <= prev);
        CHECK(u >= 0.0);
        prev = u;
      }
      for (const double x : {0.1, 1.0, 10.0, 100.0}) {
        CHECK(std::abs(vip::ig_upper_cdf(p, x) - oracle::ig_upper_quadrature(mu, lam, x)) < 1e-7);
      }
    }
  }
}

TEST_CASE("log_normal_cdf is continuous across its branches") {
  for (const double x : {-29.999, -30.0, -30.001}) {
    const double direct = std::log(0.5 * std::erfc(-x / std::sqrt(2.0)));
    CHECK(vip::log_normal_cdf(x) == doctest::Approx(direct).epsilon(1e-10));
  }
  CHECK(vip::log_normal_cdf(-200.0) == doctest::Approx(-20006.2172808981904).epsilon(1e-13));
  CHECK(vip::log_normal_cdf(10.0) < 0.0);
  CHECK(vip::log_normal_cdf(0.0) == doctest::Approx(std::log(0.5)));
}

TEST_CASE("visibility point values") {
  const SurfingParams p{14.0, 14.0};
  CHECK(vip::visibility(LoadRatio(0.0), p).value == 1.0);
  CHECK(vip::visibility(LoadRatio(1000.0), p).value < 0.05);
  // mpmath brute-force sums at 40 digits.
  CHECK(vip::visibility(LoadRatio(1.0), p).value == doctest::Approx(0.97860899948153317).epsilon(1e-12));
  CHECK(vip::visibility(LoadRatio(20.0), p, 100000).value ==
        doctest::Approx(0.43022734204476729).epsilon(1e-12));
  CHECK(vip::visibility(LoadRatio(1000.0), p).value ==
        doctest::Approx(0.014293034018365457).epsilon(1e-11));
  const double brute = static_cast<double>(oracle::visibility_bruteforce(20.0, 14.0, 14.0, 100000));
  CHECK(vip::visibility(LoadRatio(20.0), p).value == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("visibility is in (0, 1] and non-increasing in rho") {
  for (const auto& p : {SurfingParams{14.0, 14.0}, SurfingParams{3.0, 30.0}, SurfingParams{50.0, 2.0}}) {
    double prev = 1.0;
    for (double rho = 0.0; rho <= 1e4; rho = rho * 1.5 + 0.1) {
      const auto res = vip::visibility(LoadRatio(rho), p);
      CHECK(res.converged);
      CHECK(res.value > 0.0);
      CHECK(res.value <= 1.0);
      CHECK(res.value <= prev);
      prev = res.value;
    }
  }
}

TEST_CASE("visibility flags a truncation that leaves too much mass") {
  const SurfingParams p{14.0, 14.0};
  const auto short_sum = vip::visibility(LoadRatio(50.0), p, 3);
  CHECK_FALSE(short_sum.converged);
  CHECK(short_sum.tail_bound > 0.5);
  CHECK(short_sum.last_term == 3);
  // The bound is honest: the true value lies within it.
  const double full = vip::visibility(LoadRatio(50.0), p).value;
  CHECK(full - short_sum.value <= short_sum.tail_bound);
  CHECK(full >= short_sum.value);
  CHECK_THROWS_AS(vip::visibility(LoadRatio(1.0), p, 0), vip::Error);
}
