#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vip/baselines.hpp"
#include "vip/data.hpp"
#include "vip/model.hpp"

namespace vip {

enum class Recommender { vip, random, fitness, relevance };

std::string to_string(Recommender model);
std::optional<Recommender> parse_recommender(std::string_view name);

// |top-X(ranked) ∩ adopted| / |adopted|; nullopt when adopted is empty.
std::optional<double> recall_at_x(std::span<const Index> ranked, const std::set<Index>& adopted,
                                  std::size_t x);

// Assignment of each user's adoptions to folds: fold_of[i][k] is the fold of
// the k-th entry of adoptions.row(i).
struct FoldSplit {
  int fold_count = 5;
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> fold_of;

  // Adoptions outside `fold` (train) and inside it (test).
  SparseBinary train(const SparseBinary& adoptions, int fold) const;
  SparseBinary test(const SparseBinary& adoptions, int fold) const;
};

// Shuffles each user's adoption list with a seeded generator and deals it
// round-robin to the folds.
FoldSplit make_folds(const SparseBinary& adoptions, int fold_count, std::uint64_t seed);

struct EvalRecord {
  Index user = 0;
  int fold = 0;
  std::size_t train_activity = 0;
  std::vector<double> recall;  // parallel to EvalReport::xs
};

struct EvalReport {
  std::string model_tag;
  std::vector<std::size_t> xs;
  // Mean over users of per_user; per_user is the mean over a user's folds.
  std::vector<double> recall_at;
  std::vector<double> recall_std;
  std::map<Index, std::vector<double>> per_user;
  std::vector<EvalRecord> records;
  // (user, fold) evaluations dropped because the user had no test adoptions.
  std::size_t skipped = 0;

  std::size_t x_index(std::size_t x) const;
  // Recomputes per_user, recall_at and recall_std from records.
  void aggregate();
};

struct CrossValidationOptions {
  int folds = 5;
  std::vector<std::size_t> xs{1, 3, 5, 10};
  std::vector<Recommender> models{Recommender::vip, Recommender::relevance, Recommender::fitness,
                                  Recommender::random};
  std::size_t negatives_per_user = 10;
  std::uint64_t seed = 0;
  FitOptions fit{};
};

// Per fold: fits VIP (and, when asked for, the matrix-factorization model
// used by the relevance baseline) on the remaining folds, then ranks each
// user's candidate stream, i.e. held-out adoptions plus exposed items the
// user never adopted. Held-out adoptions enter training as non-adoptions.
std::vector<EvalReport> cross_validate(const AdoptionDataset& data, const HyperParams& hyper,
                                       const SurfingParams& surfing,
                                       const CrossValidationOptions& options);

// In-sample ranking of every user's full stream with a trained state.
EvalReport evaluate_state(const ModelState& state, const AdoptionDataset& data,
                          std::span<const std::size_t> xs);

struct ActivityBucket {
  std::size_t lo = 0;
  std::optional<std::size_t> hi;  // exclusive; nullopt for the open last bucket
  std::size_t count = 0;
  std::optional<double> mean;
  std::optional<double> stddev;
};

// Groups records by training activity into [b_k, b_{k+1}) buckets (the last
// one open-ended) and summarizes recall@x. Records below b_0 are dropped.
std::vector<ActivityBucket> activity_buckets(const EvalReport& report,
                                             std::span<const std::size_t> boundaries,
                                             std::size_t x = 3);

std::vector<std::size_t> default_activity_boundaries();

// Spearman rank correlation between training activity and recall@x over all
// records. NaN when either side is constant.
double activity_rank_correlation(const EvalReport& report, std::size_t x = 3);

double pearson(std::span<const double> a, std::span<const double> b);
double spearman(std::span<const double> a, std::span<const double> b);

struct ItemDecomposition {
  Index item = 0;
  std::size_t cascade_size = 0;
  double expected_visibility = 0.0;  // E(V)
  double expected_fitness = 0.0;     // E(I)
  double expected_relevance = 0.0;   // E(P)
};

struct DecompositionReport {
  std::vector<ItemDecomposition> items;
  // Pearson correlation of eta with cascade size over adopted items.
  double fitness_cascade_correlation = 0.0;
};

DecompositionReport decompose_items(const ModelState& state, const AdoptionDataset& data);

}  // namespace vip
