#include "vip/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vip/error.hpp"
#include "vip/rng.hpp"

namespace vip {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t e = k;
    while (e + 1 < order.size() && x[order[e + 1]] == x[order[k]]) ++e;
    const double avg = 0.5 * static_cast<double>(k + e) + 1.0;
    for (std::size_t t = k; t <= e; ++t) r[order[t]] = avg;
    k = e + 1;
  }
  return r;
}

SparseBinary select_folds(const FoldSplit& split, const SparseBinary& adoptions, int fold,
                          bool in_fold) {
  if (split.fold_of.size() != adoptions.rows()) throw Error("fold split does not match adoptions");
  std::vector<std::pair<Index, Index>> kept;
  for (std::size_t i = 0; i < adoptions.rows(); ++i) {
    const auto row = adoptions.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if ((split.fold_of[i][k] == fold) == in_fold) kept.emplace_back(static_cast<Index>(i), row[k]);
    }
  }
  return SparseBinary::from_pairs(adoptions.rows(), adoptions.cols(), std::move(kept));
}

}  // namespace

std::string to_string(Recommender model) {
  switch (model) {
    case Recommender::vip:
      return "vip";
    case Recommender::random:
      return "random";
    case Recommender::fitness:
      return "fitness";
    case Recommender::relevance:
      return "relevance";
  }
  return "unknown";
}

std::optional<Recommender> parse_recommender(std::string_view name) {
  if (name == "vip") return Recommender::vip;
  if (name == "random") return Recommender::random;
  if (name == "fitness") return Recommender::fitness;
  if (name == "relevance") return Recommender::relevance;
  return std::nullopt;
}

std::optional<double> recall_at_x(std::span<const Index> ranked, const std::set<Index>& adopted,
                                  std::size_t x) {
  if (x < 1) throw Error("recall@X needs X >= 1");
  if (adopted.empty()) return std::nullopt;
  const std::size_t top = std::min(x, ranked.size());
  std::size_t hits = 0;
  for (std::size_t k = 0; k < top; ++k) hits += adopted.count(ranked[k]);
  return static_cast<double>(hits) / static_cast<double>(adopted.size());
}

SparseBinary FoldSplit::train(const SparseBinary& adoptions, int fold) const {
  return select_folds(*this, adoptions, fold, false);
}

SparseBinary FoldSplit::test(const SparseBinary& adoptions, int fold) const {
  return select_folds(*this, adoptions, fold, true);
}

FoldSplit make_folds(const SparseBinary& adoptions, int fold_count, std::uint64_t seed) {
  if (fold_count < 2) throw Error("cross-validation needs at least 2 folds");
  FoldSplit split;
  split.fold_count = fold_count;
  split.seed = seed;
  split.fold_of.resize(adoptions.rows());
  for (std::size_t i = 0; i < adoptions.rows(); ++i) {
    const std::size_t count = adoptions.row(i).size();
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(substream_seed(seed, "folds", i));
    std::shuffle(order.begin(), order.end(), rng);
    split.fold_of[i].assign(count, 0);
    for (std::size_t k = 0; k < count; ++k) {
      split.fold_of[i][order[k]] = static_cast<int>(k % static_cast<std::size_t>(fold_count));
    }
  }
  return split;
}

std::size_t EvalReport::x_index(std::size_t x) const {
  const auto it = std::find(xs.begin(), xs.end(), x);
  if (it == xs.end()) throw Error("recall@" + std::to_string(x) + " was not evaluated");
  return static_cast<std::size_t>(it - xs.begin());
}

void EvalReport::aggregate() {
  std::map<Index, std::pair<std::vector<double>, std::size_t>> sums;
  for (const auto& rec : records) {
    auto& [sum, count] = sums[rec.user];
    if (sum.empty()) sum.assign(xs.size(), 0.0);
    for (std::size_t k = 0; k < xs.size(); ++k) sum[k] += rec.recall[k];
    ++count;
  }
  per_user.clear();
  for (auto& [user, entry] : sums) {
    for (double& s : entry.first) s /= static_cast<double>(entry.second);
    per_user.emplace(user, std::move(entry.first));
  }
  recall_at.assign(xs.size(), kNaN);
  recall_std.assign(xs.size(), kNaN);
  if (per_user.empty()) return;
  const double n = static_cast<double>(per_user.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double sum = 0.0;
    for (const auto& [user, values] : per_user) sum += values[k];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& [user, values] : per_user) ss += (values[k] - mean) * (values[k] - mean);
    recall_at[k] = mean;
    recall_std[k] = per_user.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
}

std::vector<EvalReport> cross_validate(const AdoptionDataset& data, const HyperParams& hyper,
                                       const SurfingParams& surfing,
                                       const CrossValidationOptions& options) {
  hyper.validate();
  surfing.validate();
  data.validate();
  if (options.models.empty()) throw Error("no models requested for evaluation");
  if (options.xs.empty()) throw Error("no recall cut-offs requested");
  for (const std::size_t x : options.xs) {
    if (x < 1) throw Error("recall cut-offs must be >= 1");
  }
  if (data.adoptions.nnz() == 0) throw Error("dataset has no adoptions to cross-validate");

  const auto wants = [&](Recommender r) {
    return std::find(options.models.begin(), options.models.end(), r) != options.models.end();
  };
  const bool need_vip = wants(Recommender::vip) || wants(Recommender::fitness);
  const bool need_pmf = wants(Recommender::relevance);

  std::vector<EvalReport> reports;
  for (const Recommender r : options.models) {
    EvalReport rep;
    rep.model_tag = to_string(r);
    rep.xs = options.xs;
    reports.push_back(std::move(rep));
  }

  const Eigen::VectorXd vis = compute_visibility(data.rho, surfing, hyper.visibility_terms);
  const FoldSplit split = make_folds(data.adoptions, options.folds, substream_seed(options.seed, "folds"));
  const std::size_t n = data.n_users();

  for (int fold = 0; fold < options.folds; ++fold) {
    const SparseBinary train = split.train(data.adoptions, fold);
    const SparseBinary test = split.test(data.adoptions, fold);
    if (test.nnz() == 0) {
      throw Error("fold " + std::to_string(fold) + " has no held-out adoptions");
    }
    const TrainingPairs pairs =
        TrainingPairs::build(train, data.exposure, hyper, options.negatives_per_user,
                             substream_seed(options.seed, "negatives", static_cast<std::uint64_t>(fold)));

    FitOptions fit_opts = options.fit;
    fit_opts.init_seed = substream_seed(options.seed, "init", static_cast<std::uint64_t>(fold));
    std::optional<ModelState> vip_state, pmf_state;
    if (need_vip) vip_state = fit(pairs, vis, hyper, fit_opts).state;
    if (need_pmf) {
      FitOptions pmf_opts = fit_opts;
      pmf_opts.clamp_visibility = true;
      pmf_opts.clamp_fitness = true;
      pmf_state = fit(pairs, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)), hyper, pmf_opts).state;
    }

    for (std::size_t i = 0; i < n; ++i) {
      const auto held = test.row(i);
      if (held.empty()) {
        for (auto& rep : reports) ++rep.skipped;
        continue;
      }
      const std::set<Index> adopted(held.begin(), held.end());
      std::vector<Index> candidates(held.begin(), held.end());
      const auto all_adopted = data.adoptions.row(i);
      for (const Index j : data.exposure.row(i)) {
        if (!std::binary_search(all_adopted.begin(), all_adopted.end(), j)) candidates.push_back(j);
      }
      std::sort(candidates.begin(), candidates.end());

      for (std::size_t m = 0; m < options.models.size(); ++m) {
        std::vector<Index> ranked;
        switch (options.models[m]) {
          case Recommender::vip:
            ranked = score_vip(*vip_state, i, candidates);
            break;
          case Recommender::fitness:
            ranked = score_fitness(*vip_state, candidates);
            break;
          case Recommender::relevance:
            ranked = score_relevance(*pmf_state, i, candidates);
            break;
          case Recommender::random:
            ranked = score_random(candidates, substream_seed(options.seed, "random",
                                                             static_cast<std::uint64_t>(fold) * n + i));
            break;
        }
        EvalRecord rec;
        rec.user = static_cast<Index>(i);
        rec.fold = fold;
        rec.train_activity = train.row(i).size();
        for (const std::size_t x : options.xs) rec.recall.push_back(*recall_at_x(ranked, adopted, x));
        reports[m].records.push_back(std::move(rec));
      }
    }
  }
  for (auto& rep : reports) rep.aggregate();
  return reports;
}

EvalReport evaluate_state(const ModelState& state, const AdoptionDataset& data,
                          std::span<const std::size_t> xs) {
  if (state.n_users() != data.n_users() || state.n_items() != data.n_items()) {
    throw Error("model is " + std::to_string(state.n_users()) + "x" +
                std::to_string(state.n_items()) + " but dataset is " +
                std::to_string(data.n_users()) + "x" + std::to_string(data.n_items()));
  }
  EvalReport rep;
  rep.model_tag = "vip";
  rep.xs.assign(xs.begin(), xs.end());
  for (std::size_t i = 0; i < data.n_users(); ++i) {
    const auto adopted_row = data.adoptions.row(i);
    if (adopted_row.empty()) {
      ++rep.skipped;
      continue;
    }
    const std::set<Index> adopted(adopted_row.begin(), adopted_row.end());
    std::set<Index> stream(adopted);
    for (const Index j : data.exposure.row(i)) stream.insert(j);
    const std::vector<Index> candidates(stream.begin(), stream.end());
    const auto ranked = score_vip(state, i, candidates);
    EvalRecord rec;
    rec.user = static_cast<Index>(i);
    rec.train_activity = adopted.size();
    for (const std::size_t x : xs) rec.recall.push_back(*recall_at_x(ranked, adopted, x));
    rep.records.push_back(std::move(rec));
  }
  rep.aggregate();
  return rep;
}

std::vector<std::size_t> default_activity_boundaries() { return {0, 1, 2, 4, 8, 16, 32, 64, 128}; }

std::vector<ActivityBucket> activity_buckets(const EvalReport& report,
                                             std::span<const std::size_t> boundaries,
                                             std::size_t x) {
  if (boundaries.empty()) throw Error("activity buckets need at least one boundary");
  for (std::size_t k = 1; k < boundaries.size(); ++k) {
    if (boundaries[k] <= boundaries[k - 1]) throw Error("bucket boundaries must be strictly increasing");
  }
  const std::size_t xi = report.x_index(x);
  std::vector<ActivityBucket> buckets(boundaries.size());
  std::vector<std::vector<double>> values(boundaries.size());
  for (std::size_t k = 0; k < boundaries.size(); ++k) {
    buckets[k].lo = boundaries[k];
    if (k + 1 < boundaries.size()) buckets[k].hi = boundaries[k + 1];
  }
  for (const auto& rec : report.records) {
    if (rec.train_activity < boundaries.front()) continue;
    const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), rec.train_activity);
    values[static_cast<std::size_t>(it - boundaries.begin()) - 1].push_back(rec.recall[xi]);
  }
  for (std::size_t k = 0; k < buckets.size(); ++k) {
    const auto& vals = values[k];
    buckets[k].count = vals.size();
    if (vals.empty()) continue;
    const double n = static_cast<double>(vals.size());
    const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / n;
    double ss = 0.0;
    for (const double v : vals) ss += (v - mean) * (v - mean);
    buckets[k].mean = mean;
    buckets[k].stddev = vals.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  return buckets;
}

double activity_rank_correlation(const EvalReport& report, std::size_t x) {
  const std::size_t xi = report.x_index(x);
  std::vector<double> activity, recall;
  for (const auto& rec : report.records) {
    activity.push_back(static_cast<double>(rec.train_activity));
    recall.push_back(rec.recall[xi]);
  }
  return spearman(activity, recall);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("pearson: size mismatch");
  if (a.size() < 2) return kNaN;
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return kNaN;
  return sab / std::sqrt(saa * sbb);
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("spearman: size mismatch");
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  return pearson(ra, rb);
}

DecompositionReport decompose_items(const ModelState& state, const AdoptionDataset& data) {
  if (state.n_users() != data.n_users() || state.n_items() != data.n_items()) {
    throw Error("model is " + std::to_string(state.n_users()) + "x" +
                std::to_string(state.n_items()) + " but dataset is " +
                std::to_string(data.n_users()) + "x" + std::to_string(data.n_items()));
  }
  DecompositionReport out;
  const SparseBinary adopters = data.adoptions.transpose();
  std::vector<double> eta, sizes;
  for (std::size_t j = 0; j < adopters.rows(); ++j) {
    const auto users = adopters.row(j);
    if (users.empty()) continue;
    ItemDecomposition d;
    d.item = static_cast<Index>(j);
    d.cascade_size = users.size();
    const double e = state.eta[static_cast<Eigen::Index>(j)];
    double sv = 0.0, sp = 0.0, si = 0.0;
    for (const Index i : users) {
      sv += state.v[i];
      sp += relevance(state, i, j);
      si += e;
    }
    const double n = static_cast<double>(users.size());
    d.expected_visibility = sv / n;
    d.expected_relevance = sp / n;
    d.expected_fitness = si / n;
    out.items.push_back(d);
    eta.push_back(e);
    sizes.push_back(n);
  }
  out.fitness_cascade_correlation = pearson(eta, sizes);
  return out;
}

}  // namespace vip
