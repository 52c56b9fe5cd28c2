#pragma once

#include <cstddef>
#include <cstdint>

#include "vip/data.hpp"
#include "vip/model.hpp"

namespace vip {

// Generation priors giving O(1) relevance and fitness on a five-topic space.
inline HyperParams default_synthetic_prior() {
  HyperParams h;
  h.topics = 5;
  h.lambda_u = 2.5;
  h.lambda_theta = 2.5;
  h.lambda_eta = 2.0;
  return h;
}

struct SyntheticConfig {
  std::size_t n_users = 200;
  std::size_t n_items = 500;
  // Priors the latent factors are drawn from. Only topics, the three lambdas
  // and visibility_terms are read.
  HyperParams prior = default_synthetic_prior();
  SurfingParams surfing{};
  double rho_min = 0.0;
  double rho_max = 100.0;
  // When positive, every user and item is assigned one topic uniformly at
  // random; its profile gains planted_strength on that coordinate and loses
  // planted_strength / K on every coordinate.
  double planted_strength = 0.0;
  // Probability that a given (user, item) pair reaches the user's stream.
  double exposure_density = 0.1;
  // Precision of the Gaussian noise on the latent adoption signal.
  double noise_precision = 25.0;
  // A sampled signal strictly above this cut becomes an adoption.
  double threshold = 0.5;
  // Observed post count given to every synthetic user; friend counts are
  // derived from the sampled rho and rounded.
  std::int64_t posts_per_user = 50;
  RhoCoefficients coeffs{};
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticDataset {
  AdoptionDataset data;
  ModelState truth;
};

// Samples profiles, fitness and load for every user and item, then the
// adoption of every exposed pair:
//   u_i ~ N(0, I / lambda_u), theta_j ~ N(0, I / lambda_theta),
//   eta_j ~ N(0, 1 / lambda_eta), rho_i ~ U[rho_min, rho_max],
//   plus the centered planted-topic offset on u_i and theta_j,
//   r_ij = v_i (u_i.theta_j + eta_j) + noise, adopted iff r_ij > threshold.
// Only exposed pairs can be adopted. The stored rho is re-estimated from the
// emitted metadata so the dataset is consistent with load_events.
SyntheticDataset generate_synthetic(const SyntheticConfig& config);

}  // namespace vip
