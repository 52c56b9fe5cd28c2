#include "vip/synthetic.hpp"

#include <cmath>
#include <random>
#include <string>

#include "vip/error.hpp"
#include "vip/rng.hpp"

namespace vip {

namespace {

std::string padded_id(char prefix, std::size_t index, std::size_t count) {
  std::string digits = std::to_string(index);
  const std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
  return std::string(1, prefix) + std::string(width - digits.size(), '0') + digits;
}

}  // namespace

void SyntheticConfig::validate() const {
  if (n_users < 1 || n_items < 1) throw Error("synthetic data needs at least one user and one item");
  if (prior.topics < 1) throw Error("synthetic topics must be >= 1");
  if (!(prior.lambda_u > 0.0) || !(prior.lambda_theta > 0.0) || !(prior.lambda_eta > 0.0)) {
    throw Error("synthetic prior precisions must be positive");
  }
  surfing.validate();
  coeffs.validate();
  if (!(rho_min >= 0.0) || !(rho_max >= rho_min) || rho_max > 1e4) {
    throw Error("rho range must satisfy 0 <= rho_min <= rho_max <= 1e4");
  }
  if (!(exposure_density > 0.0) || exposure_density > 1.0) {
    throw Error("exposure density must be in (0, 1]");
  }
  if (!(planted_strength >= 0.0)) throw Error("planted strength must be non-negative");
  if (!(noise_precision > 0.0)) throw Error("noise precision must be positive");
  if (posts_per_user < 1) throw Error("posts_per_user must be >= 1");
}

SyntheticDataset generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  const std::size_t n = config.n_users;
  const std::size_t m = config.n_items;
  const int k = config.prior.topics;

  SyntheticDataset out;
  ModelState& truth = out.truth;
  truth = ModelState::zeros(n, m, k);

  Rng factor_rng(substream_seed(config.seed, "sim-factors"));
  std::normal_distribution<double> std_normal(0.0, 1.0);
  const double su = 1.0 / std::sqrt(config.prior.lambda_u);
  const double st = 1.0 / std::sqrt(config.prior.lambda_theta);
  const double se = 1.0 / std::sqrt(config.prior.lambda_eta);
  for (Eigen::Index c = 0; c < truth.U.cols(); ++c) {
    for (Eigen::Index r = 0; r < k; ++r) truth.U(r, c) = su * std_normal(factor_rng);
  }
  for (Eigen::Index c = 0; c < truth.Theta.cols(); ++c) {
    for (Eigen::Index r = 0; r < k; ++r) truth.Theta(r, c) = st * std_normal(factor_rng);
    truth.eta[c] = se * std_normal(factor_rng);
  }

  if (config.planted_strength > 0.0) {
    Rng topic_rng(substream_seed(config.seed, "sim-topics"));
    std::uniform_int_distribution<int> topic(0, k - 1);
    // Centered so the population mean profile stays zero.
    const double shift = config.planted_strength / static_cast<double>(k);
    auto plant = [&](Eigen::MatrixXd& profiles) {
      for (Eigen::Index c = 0; c < profiles.cols(); ++c) {
        profiles.col(c).array() -= shift;
        profiles(topic(topic_rng), c) += config.planted_strength;
      }
    };
    plant(truth.U);
    plant(truth.Theta);
  }

  AdoptionDataset& data = out.data;
  data.user_ids.reserve(n);
  data.item_ids.reserve(m);
  for (std::size_t i = 0; i < n; ++i) data.user_ids.push_back(padded_id('u', i, n));
  for (std::size_t j = 0; j < m; ++j) data.item_ids.push_back(padded_id('i', j, m));

  Rng load_rng(substream_seed(config.seed, "sim-load"));
  std::uniform_real_distribution<double> load(config.rho_min, config.rho_max);
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = load(load_rng);
    UserMeta meta;
    meta.user_id = data.user_ids[i];
    meta.n_posts = config.posts_per_user;
    meta.n_friends = std::llround(rho * config.coeffs.visit_rate *
                                  static_cast<double>(config.posts_per_user) /
                                  config.coeffs.post_rate);
    data.rho.push_back(estimate_rho(meta, config.coeffs).rho.value());
    data.meta.push_back(std::move(meta));
  }
  truth.v = compute_visibility(data.rho, config.surfing, config.prior.visibility_terms);

  Rng pair_rng(substream_seed(config.seed, "sim-pairs"));
  std::bernoulli_distribution exposed(config.exposure_density);
  const double noise_sd = 1.0 / std::sqrt(config.noise_precision);
  std::vector<std::pair<Index, Index>> adopted_pairs, exposed_pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!exposed(pair_rng)) continue;
      exposed_pairs.emplace_back(static_cast<Index>(i), static_cast<Index>(j));
      const double signal = predict(truth, i, j) + noise_sd * std_normal(pair_rng);
      if (signal > config.threshold) {
        adopted_pairs.emplace_back(static_cast<Index>(i), static_cast<Index>(j));
      }
    }
  }
  data.adoptions = SparseBinary::from_pairs(n, m, std::move(adopted_pairs));
  data.exposure = SparseBinary::from_pairs(n, m, std::move(exposed_pairs));
  data.validate();
  return out;
}

}  // namespace vip
