#include <doctest.h>

#include <cmath>
#include <numeric>

#include "vip/error.hpp"
#include "vip/eval.hpp"
#include "vip/synthetic.hpp"

using vip::Index;

namespace {

vip::SyntheticDataset small_synthetic(std::uint64_t seed) {
  vip::SyntheticConfig cfg;
  cfg.n_users = 40;
  cfg.n_items = 80;
  cfg.exposure_density = 0.25;
  cfg.seed = seed;
  return vip::generate_synthetic(cfg);
}

vip::HyperParams small_hyper() {
  vip::HyperParams h;
  h.topics = 3;
  h.lambda_u = 0.3;
  h.lambda_theta = 0.3;
  h.lambda_eta = 1.0;
  h.max_iters = 20;
  return h;
}

}  // namespace

TEST_CASE("recall_at_x hand examples") {
  const std::vector<Index> abc{0, 1, 2}, abcd{0, 1, 2, 3};
  CHECK(*vip::recall_at_x(abc, {0, 1, 2}, 3) == 1.0);
  CHECK(*vip::recall_at_x(abcd, {3}, 3) == 0.0);
  CHECK(*vip::recall_at_x(abcd, {0, 3}, 3) == 0.5);
  CHECK(*vip::recall_at_x(abc, {1}, 10) == 1.0);
  CHECK_FALSE(vip::recall_at_x(abc, {}, 3).has_value());
  CHECK_THROWS_AS(vip::recall_at_x(abc, {1}, 0), vip::Error);
}

TEST_CASE("fold split partitions every user's adoptions") {
  const auto syn = small_synthetic(1);
  const auto& A = syn.data.adoptions;
  const auto split = vip::make_folds(A, 5, 99);
  std::size_t total = 0;
  for (int f = 0; f < 5; ++f) {
    const auto test = split.test(A, f);
    const auto train = split.train(A, f);
    CHECK(test.nnz() + train.nnz() == A.nnz());
    for (const auto& [i, j] : test.entries()) CHECK_FALSE(train.contains(i, j));
    total += test.nnz();
  }
  CHECK(total == A.nnz());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    std::vector<int> per_fold(5, 0);
    for (const int f : split.fold_of[i]) ++per_fold[f];
    const auto [lo, hi] = std::minmax_element(per_fold.begin(), per_fold.end());
    CHECK(*hi - *lo <= 1);
  }
  const auto again = vip::make_folds(A, 5, 99);
  CHECK(again.fold_of == split.fold_of);
  CHECK_THROWS_AS(vip::make_folds(A, 1, 0), vip::Error);
}

TEST_CASE("aggregation equals the mean of per-user values") {
  vip::EvalReport rep;
  rep.xs = {1, 3};
  rep.records = {{0, 0, 2, {0.0, 0.5}}, {0, 1, 2, {1.0, 1.0}}, {2, 0, 5, {0.0, 0.25}}};
  rep.aggregate();
  REQUIRE(rep.per_user.size() == 2);
  CHECK(rep.per_user.at(0) == std::vector<double>{0.5, 0.75});
  CHECK(rep.per_user.at(2) == std::vector<double>{0.0, 0.25});
  CHECK(rep.recall_at[0] == 0.25);
  CHECK(rep.recall_at[1] == 0.5);
  CHECK(rep.x_index(3) == 1);
  CHECK_THROWS_AS(rep.x_index(5), vip::Error);
}

TEST_CASE("cross-validation is deterministic and internally consistent") {
  const auto syn = small_synthetic(3);
  vip::CrossValidationOptions opts;
  opts.seed = 17;
  const auto a = vip::cross_validate(syn.data, small_hyper(), {}, opts);
  const auto b = vip::cross_validate(syn.data, small_hyper(), {}, opts);
  REQUIRE(a.size() == 4);
  for (std::size_t m = 0; m < a.size(); ++m) {
    CHECK(a[m].model_tag == b[m].model_tag);
    CHECK(a[m].recall_at == b[m].recall_at);
    CHECK(a[m].per_user == b[m].per_user);
    for (std::size_t x = 1; x < a[m].xs.size(); ++x) CHECK(a[m].recall_at[x] >= a[m].recall_at[x - 1]);
    for (const auto& rec : a[m].records) {
      for (const double r : rec.recall) {
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
      }
    }
    double sum = 0.0;
    for (const auto& [user, vals] : a[m].per_user) sum += vals[1];
    CHECK(a[m].recall_at[1] == doctest::Approx(sum / a[m].per_user.size()).epsilon(1e-15));
  }
  // Skips plus evaluated records cover every (user, fold).
  CHECK(a[0].records.size() + a[0].skipped == syn.data.n_users() * 5);
}

TEST_CASE("cross-validation honours the model list and rejects degenerate folds") {
  const auto syn = small_synthetic(4);
  vip::CrossValidationOptions opts;
  opts.models = {vip::Recommender::vip, vip::Recommender::random};
  opts.xs = {2};
  const auto reps = vip::cross_validate(syn.data, small_hyper(), {}, opts);
  REQUIRE(reps.size() == 2);
  CHECK(reps[0].model_tag == "vip");
  CHECK(reps[1].model_tag == "random");
  CHECK(reps[0].recall_at.size() == 1);

  // A single adoption cannot fill five folds.
  auto tiny = syn.data;
  tiny.adoptions = vip::SparseBinary::from_pairs(tiny.n_users(), tiny.n_items(), {{0, 0}});
  tiny.exposure = vip::SparseBinary::from_pairs(tiny.n_users(), tiny.n_items(), {{0, 0}, {0, 1}});
  CHECK_THROWS_AS(vip::cross_validate(tiny, small_hyper(), {}, opts), vip::Error);
}

TEST_CASE("activity buckets") {
  vip::EvalReport rep;
  rep.xs = {3};
  rep.records = {{0, 0, 1, {0.2}}, {1, 0, 3, {0.4}}, {2, 0, 3, {0.8}}, {3, 0, 40, {1.0}}};
  rep.aggregate();

  const std::vector<std::size_t> one{0};
  const auto all = vip::activity_buckets(rep, one);
  REQUIRE(all.size() == 1);
  CHECK(all[0].count == 4);
  CHECK(*all[0].mean == doctest::Approx(0.6).epsilon(1e-15));

  const std::vector<std::size_t> bounds{0, 2, 8, 16};
  const auto b = vip::activity_buckets(rep, bounds);
  REQUIRE(b.size() == 4);
  CHECK(b[0].count == 1);
  CHECK(*b[1].mean == doctest::Approx(0.6));
  CHECK(*b[1].stddev == doctest::Approx(std::sqrt(0.08)));
  CHECK(b[2].count == 0);
  CHECK_FALSE(b[2].mean.has_value());
  CHECK_FALSE(b[3].hi.has_value());
  CHECK(*b[3].mean == 1.0);

  const std::vector<std::size_t> bad{0, 4, 4};
  CHECK_THROWS_AS(vip::activity_buckets(rep, bad), vip::Error);
  CHECK(vip::activity_rank_correlation(rep) > 0.0);
}

TEST_CASE("correlation helpers") {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 9}, c{4, 3, 2, 1}, k{5, 5, 5, 5};
  CHECK(vip::pearson(a, a) == doctest::Approx(1.0));
  CHECK(vip::pearson(a, c) == doctest::Approx(-1.0));
  CHECK(vip::spearman(a, b) == doctest::Approx(1.0));
  CHECK(std::isnan(vip::spearman(a, k)));
  const std::vector<double> ties{1, 1, 2, 3};
  // Ranks (1.5, 1.5, 3, 4) against (1, 2, 3, 4).
  CHECK(vip::spearman(ties, a) == doctest::Approx(0.9486832980505138));
}

TEST_CASE("item decomposition") {
  vip::AdoptionDataset data;
  data.user_ids = {"a", "b", "c"};
  data.item_ids = {"x", "y", "z"};
  data.adoptions = vip::SparseBinary::from_pairs(3, 3, {{0, 0}, {1, 1}, {2, 1}, {1, 2}, {2, 2}});
  data.exposure = data.adoptions;
  data.meta = {{"a", 1, 1}, {"b", 1, 1}, {"c", 1, 1}};
  data.rho = {1.0, 1.0, 1.0};
  auto s = vip::ModelState::zeros(3, 3, 1);
  s.U << 1.0, 2.0, -1.0;
  s.Theta << 0.2, 0.5, 0.1;
  s.eta << 0.1, 0.3, 0.4;
  s.v << 0.4, 0.9, 0.5;
  const auto rep = vip::decompose_items(s, data);
  REQUIRE(rep.items.size() == 3);
  CHECK(rep.items[0].cascade_size == 1);
  CHECK(rep.items[0].expected_visibility == doctest::Approx(0.4));
  CHECK(rep.items[0].expected_relevance == doctest::Approx(0.2));
  CHECK(rep.items[0].expected_fitness == doctest::Approx(0.1));
  CHECK(rep.items[1].expected_visibility == rep.items[2].expected_visibility);
  CHECK(rep.items[1].expected_relevance == doctest::Approx(0.5 * (1.0 - 0.5)));
  CHECK(rep.fitness_cascade_correlation == doctest::Approx(vip::pearson(std::vector<double>{0.1, 0.3, 0.4},
                                                                        std::vector<double>{1, 2, 2})));

  auto wrong = vip::ModelState::zeros(3, 4, 1);
  CHECK_THROWS_AS(vip::decompose_items(wrong, data), vip::Error);
}

TEST_CASE("random baseline bucket means agree within two standard errors") {
  vip::SyntheticConfig cfg;
  cfg.prior.lambda_u = 25.0;
  cfg.prior.lambda_theta = 25.0;
  cfg.planted_strength = 2.0;
  cfg.exposure_density = 0.2;
  cfg.seed = 1;
  const auto syn = vip::generate_synthetic(cfg);
  vip::HyperParams h = small_hyper();
  h.topics = 5;
  vip::CrossValidationOptions opts;
  opts.seed = 1;
  opts.xs = {3};
  opts.models = {vip::Recommender::random};
  const auto rep = vip::cross_validate(syn.data, h, cfg.surfing, opts).front();
  std::vector<vip::ActivityBucket> full;
  for (const auto& b : vip::activity_buckets(rep, vip::default_activity_boundaries())) {
    if (b.count >= 30) full.push_back(b);
  }
  REQUIRE(full.size() >= 2);
  for (std::size_t a = 0; a < full.size(); ++a) {
    for (std::size_t b = a + 1; b < full.size(); ++b) {
      const double se = std::hypot(*full[a].stddev / std::sqrt(double(full[a].count)),
                                   *full[b].stddev / std::sqrt(double(full[b].count)));
      CHECK(std::abs(*full[a].mean - *full[b].mean) <= 2.0 * se);
    }
  }
}
