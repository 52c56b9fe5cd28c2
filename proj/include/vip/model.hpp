#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vip/data.hpp"
#include "vip/distributions.hpp"
#include "vip/sparse.hpp"

namespace vip {

struct HyperParams {
  int topics = 30;
  double lambda_u = 1e-3;
  double lambda_theta = 1e-3;
  double lambda_eta = 1e4;
  // Confidence of adopted, exposed-but-not-adopted, and unexposed pairs.
  double conf_a = 1.0;
  double conf_b = 0.03;
  double conf_c = 0.01;
  std::int64_t visibility_terms = kDefaultVisibilityTerms;
  double tol = 1e-6;
  int max_iters = 200;

  void validate() const;
};

// U is K x N and Theta is K x M, both column-major so that every user and
// item profile is a contiguous column.
struct ModelState {
  Eigen::MatrixXd U;
  Eigen::MatrixXd Theta;
  Eigen::VectorXd eta;
  Eigen::VectorXd v;

  static ModelState zeros(std::size_t users, std::size_t items, int topics);

  std::size_t n_users() const { return static_cast<std::size_t>(U.cols()); }
  std::size_t n_items() const { return static_cast<std::size_t>(Theta.cols()); }
  int topics() const { return static_cast<int>(U.rows()); }

  void validate() const;
};

struct ObservedPair {
  Index other;  // item index in a user row, user index in an item column
  double r;
  double c;
};

// The pairs that enter the objective, with their targets and confidences,
// indexed both by user and by item.
class TrainingPairs {
 public:
  struct Triplet {
    Index user;
    Index item;
    double r;
    double c;
  };

  TrainingPairs() = default;
  TrainingPairs(std::size_t users, std::size_t items, std::vector<Triplet> triplets);

  // Adopted pairs get conf_a, exposed non-adopted pairs conf_b, and
  // `negatives_per_user` unexposed non-adopted items per user (sampled
  // without replacement from `seed`) get conf_c.
  static TrainingPairs build(const SparseBinary& adoptions, const SparseBinary& exposure,
                             const HyperParams& hyper, std::size_t negatives_per_user,
                             std::uint64_t seed);

  std::size_t n_users() const { return users_; }
  std::size_t n_items() const { return items_; }
  std::size_t size() const { return by_user_.size(); }

  std::span<const ObservedPair> user(std::size_t i) const {
    return {by_user_.data() + user_ptr_[i], by_user_.data() + user_ptr_[i + 1]};
  }
  std::span<const ObservedPair> item(std::size_t j) const {
    return {by_item_.data() + item_ptr_[j], by_item_.data() + item_ptr_[j + 1]};
  }

 private:
  std::size_t users_ = 0;
  std::size_t items_ = 0;
  std::vector<std::size_t> user_ptr_{0};
  std::vector<std::size_t> item_ptr_{0};
  std::vector<ObservedPair> by_user_;
  std::vector<ObservedPair> by_item_;
};

// u_i . theta_j
double relevance(const ModelState& state, std::size_t user, std::size_t item);

// v_i (u_i . theta_j + eta_j)
double predict(const ModelState& state, std::size_t user, std::size_t item);

// Per-user visibility from the load ratios. Throws NumericError if any
// user's truncated series has not converged.
Eigen::VectorXd compute_visibility(std::span<const double> rho, const SurfingParams& surfing,
                                   std::int64_t terms = kDefaultVisibilityTerms);

// Complete-data log-likelihood:
//   -lu/2 sum|u|^2 - lt/2 sum|theta|^2 - le/2 sum eta^2 + sum_i log v_i
//   - sum_pairs c/2 (r - v_i (u_i.theta_j + eta_j))^2
double log_likelihood(const ModelState& state, const TrainingPairs& pairs,
                      const HyperParams& hyper);

// Exact coordinate maximizers of log_likelihood for one block, with every
// other block held fixed.
Eigen::VectorXd update_user(const ModelState& state, const TrainingPairs& pairs,
                            const HyperParams& hyper, std::size_t user);
Eigen::VectorXd update_item(const ModelState& state, const TrainingPairs& pairs,
                            const HyperParams& hyper, std::size_t item);
double update_fitness(const ModelState& state, const TrainingPairs& pairs,
                      const HyperParams& hyper, std::size_t item);

enum class Block { users, items, fitness };

std::string to_string(Block block);

struct FitOptions {
  // Holds v at 1 and eta at 0; the trainer then fits plain confidence-weighted
  // matrix factorization.
  bool clamp_visibility = false;
  bool clamp_fitness = false;
  std::array<Block, 3> order{Block::users, Block::items, Block::fitness};
  std::uint64_t init_seed = 0;
  double init_stddev = 0.1;
  unsigned threads = 1;
};

struct FitResult {
  ModelState state;
  // trace[0] is the objective at initialization, trace[k] after sweep k.
  std::vector<double> trace;
  int sweeps = 0;
  bool converged = false;
};

// Random initial state: U and Theta entries ~ Normal(0, init_stddev^2), eta = 0.
ModelState initial_state(std::size_t users, std::size_t items, int topics, const FitOptions& options);

// Coordinate ascent from initial_state until the relative change of the
// objective drops below hyper.tol or hyper.max_iters sweeps ran.
FitResult fit(const TrainingPairs& pairs, const Eigen::VectorXd& visibility,
              const HyperParams& hyper, const FitOptions& options = {});

// Same, starting from a caller-supplied state (visibility taken from it).
FitResult fit_from(const TrainingPairs& pairs, ModelState state, const HyperParams& hyper,
                   const FitOptions& options = {});

}  // namespace vip
