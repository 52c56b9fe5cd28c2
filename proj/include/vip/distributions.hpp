#pragma once

#include <cstdint>

namespace vip {

// Inverse-Gaussian "law of surfing": how many stream items a user inspects
// before leaving. mu is the mean, lambda the shape.
struct SurfingParams {
  double mu = 14.0;
  double lambda = 14.0;

  void validate() const;
  double variance() const { return mu * mu * mu / lambda; }
};

// Expected number of new stream messages between two visits of one user.
class LoadRatio {
 public:
  LoadRatio() = default;
  explicit LoadRatio(double rho);

  double value() const { return rho_; }

 private:
  double rho_ = 0.0;
};

// P(L newer messages arrived since the item) for a geometric law with
// success probability 1/(1+rho).
double geometric_pmf(LoadRatio rho, std::int64_t count);

// Inverse-Gaussian density at x > 0.
double ig_density(const SurfingParams& params, double x);

// P(X >= x) for the inverse-Gaussian. Equals 1 at x = 0.
double ig_upper_cdf(const SurfingParams& params, double x);

// log of the standard normal CDF, accurate deep into the lower tail.
double log_normal_cdf(double x);

struct VisibilityResult {
  double value = 0.0;
  // Upper bound on the mass of the terms that were not summed.
  double tail_bound = 0.0;
  // Index of the last summed term.
  std::int64_t last_term = 0;
  bool converged = true;
};

inline constexpr std::int64_t kDefaultVisibilityTerms = 100000;
inline constexpr double kDefaultVisibilityTailTolerance = 1e-10;

// Probability that a user with load rho views a given item in the stream:
//   sum_{L=0}^{max_terms} geometric_pmf(rho, L) * ig_upper_cdf(params, L).
// Summation stops early once the remaining terms cannot change the result.
// `converged` is false when the bound on the neglected mass exceeds
// tail_tolerance.
VisibilityResult visibility(LoadRatio rho, const SurfingParams& params,
                            std::int64_t max_terms = kDefaultVisibilityTerms,
                            double tail_tolerance = kDefaultVisibilityTailTolerance);

}  // namespace vip
