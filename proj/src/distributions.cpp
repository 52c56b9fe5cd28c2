#include "vip/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vip/error.hpp"

namespace vip {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

}  // namespace

void SurfingParams::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw Error("surfing mu must be positive and finite, got " + std::to_string(mu));
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error("surfing lambda must be positive and finite, got " + std::to_string(lambda));
  }
}

LoadRatio::LoadRatio(double rho) : rho_(rho) {
  if (!std::isfinite(rho) || rho < 0.0) {
    throw Error("load ratio must be finite and non-negative, got " + std::to_string(rho));
  }
}

double geometric_pmf(LoadRatio rho, std::int64_t count) {
  if (count < 0) throw Error("geometric_pmf: negative count " + std::to_string(count));
  const double r = rho.value();
  const double p = 1.0 / (1.0 + r);
  const double q = r / (1.0 + r);
  return std::pow(q, static_cast<double>(count)) * p;
}

double ig_density(const SurfingParams& params, double x) {
  params.validate();
  if (!(x > 0.0)) throw Error("ig_density: x must be positive, got " + std::to_string(x));
  const double mu = params.mu;
  const double lam = params.lambda;
  const double log_norm = 0.5 * std::log(lam / (2.0 * std::numbers::pi * x * x * x));
  const double d = x - mu;
  return std::exp(log_norm - lam * d * d / (2.0 * mu * mu * x));
}

double log_normal_cdf(double x) {
  if (x > 0.0) return std::log1p(-0.5 * std::erfc(x * kInvSqrt2));
  if (x > -30.0) return std::log(normal_cdf(x));
  // Asymptotic expansion of the Mills ratio; relative error below 1e-12 here.
  const double z2 = 1.0 / (x * x);
  const double series = 1.0 - z2 * (1.0 - 3.0 * z2 * (1.0 - 5.0 * z2 * (1.0 - 7.0 * z2)));
  return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double ig_upper_cdf(const SurfingParams& params, double x) {
  params.validate();
  if (!(x >= 0.0)) throw Error("ig_upper_cdf: x must be non-negative, got " + std::to_string(x));
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double mu = params.mu;
  const double lam = params.lambda;
  const double s = std::sqrt(lam / x);
  const double a = s * (x / mu - 1.0);
  const double b = s * (x / mu + 1.0);
  // 1 - F(x) = Phi(-a) - exp(2 lam / mu) Phi(-b); the second product is
  // formed in log space since exp(2 lam / mu) alone can overflow.
  const double upper = normal_cdf(-a) - std::exp(2.0 * lam / mu + log_normal_cdf(-b));
  return std::clamp(upper, 0.0, 1.0);
}

VisibilityResult visibility(LoadRatio rho, const SurfingParams& params, std::int64_t max_terms,
                            double tail_tolerance) {
  params.validate();
  if (max_terms < 1) throw Error("visibility: max_terms must be >= 1");
  const double r = rho.value();
  const double p = 1.0 / (1.0 + r);
  const double q = r / (1.0 + r);

  VisibilityResult out;
  double sum = 0.0;
  double weight = p;  // p q^L
  double tail = q;    // q^(L+1), the geometric mass beyond L
  for (std::int64_t count = 0; count <= max_terms; ++count) {
    const double upper = ig_upper_cdf(params, static_cast<double>(count));
    sum += weight * upper;
    // Remaining terms are bounded by upper(L) * q^(L+1) since upper is
    // non-increasing in L.
    const double bound = upper * tail;
    out.last_term = count;
    out.tail_bound = bound;
    if (bound <= 1e-17 * sum || bound == 0.0) break;
    weight *= q;
    tail *= q;
  }
  out.value = sum;
  out.converged = out.tail_bound <= tail_tolerance;
  return out;
}

}  // namespace vip
