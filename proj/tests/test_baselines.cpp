#include <doctest.h>

#include <algorithm>

#include "vip/baselines.hpp"
#include "vip/synthetic.hpp"

using vip::Index;

namespace {

bool is_permutation_of(std::vector<Index> ranked, std::vector<Index> stream) {
  std::sort(ranked.begin(), ranked.end());
  std::sort(stream.begin(), stream.end());
  return ranked == stream;
}

}  // namespace

TEST_CASE("baseline names round-trip") {
  for (const auto kind : {vip::BaselineKind::random, vip::BaselineKind::fitness, vip::BaselineKind::relevance}) {
    CHECK(vip::parse_baseline(vip::to_string(kind)) == kind);
  }
  CHECK_FALSE(vip::parse_baseline("popularity").has_value());
}

TEST_CASE("random ranking") {
  CHECK(vip::score_random({}, 1).empty());
  const std::vector<Index> one{7};
  CHECK(vip::score_random(one, 1) == one);
  const std::vector<Index> five{3, 9, 1, 4, 12};
  const auto a = vip::score_random(five, 42);
  CHECK(a == vip::score_random(five, 42));
  CHECK(is_permutation_of(a, five));

  // Each of the 5 items lands first roughly a fifth of the time.
  std::vector<int> first(13, 0);
  const int trials = 5000;
  for (int s = 0; s < trials; ++s) ++first[vip::score_random(five, s).front()];
  for (const Index j : five) CHECK(std::abs(first[j] / double(trials) - 0.2) < 0.03);
}

TEST_CASE("fitness ranking") {
  auto s = vip::ModelState::zeros(2, 3, 1);
  s.eta << 0.3, 0.1, 0.5;
  const std::vector<Index> stream{0, 1, 2};
  CHECK(vip::score_fitness(s, stream) == std::vector<Index>{2, 0, 1});
  s.eta.setConstant(0.2);
  CHECK(vip::score_fitness(s, std::vector<Index>{2, 0, 1}) == std::vector<Index>{0, 1, 2});
}

TEST_CASE("relevance ranking") {
  auto s = vip::ModelState::zeros(2, 4, 1);
  s.Theta << 0.2, -1.0, 3.0, 0.5;
  const std::vector<Index> stream{3, 1, 0, 2};
  CHECK(vip::score_relevance(s, 0, stream) == std::vector<Index>{0, 1, 2, 3});
  s.U(0, 1) = 0.7;
  CHECK(vip::score_relevance(s, 1, stream) == std::vector<Index>{2, 3, 0, 1});
}

TEST_CASE("vip ranking uses fitness and relevance together") {
  auto s = vip::ModelState::zeros(1, 3, 1);
  s.U(0, 0) = 1.0;
  s.Theta << 0.5, 0.0, 0.2;
  s.eta << 0.0, 0.6, 0.2;
  s.v[0] = 0.3;
  // Scores 0.15, 0.18, 0.12.
  CHECK(vip::score_vip(s, 0, std::vector<Index>{0, 1, 2}) == std::vector<Index>{1, 0, 2});
}

TEST_CASE("baselines return exactly the stream on generated data") {
  vip::SyntheticConfig cfg;
  cfg.n_users = 30;
  cfg.n_items = 40;
  cfg.seed = 6;
  const auto syn = vip::generate_synthetic(cfg);
  const auto& truth = syn.truth;
  for (std::size_t i = 0; i < 30; ++i) {
    const auto row = syn.data.exposure.row(i);
    const std::vector<Index> stream(row.begin(), row.end());
    CHECK(is_permutation_of(vip::score_random(stream, i), stream));
    CHECK(is_permutation_of(vip::score_fitness(truth, stream), stream));
    CHECK(is_permutation_of(vip::score_relevance(truth, i, stream), stream));
    CHECK(is_permutation_of(vip::score_vip(truth, i, stream), stream));
    CHECK(vip::score_fitness(truth, stream) == vip::score_fitness(truth, stream));
  }
}

TEST_CASE("planted high-fitness item leads every exposed user's fitness ranking") {
  vip::SyntheticConfig cfg;
  cfg.n_users = 50;
  cfg.n_items = 60;
  cfg.seed = 13;
  auto syn = vip::generate_synthetic(cfg);
  const Index planted = 17;
  syn.truth.eta[planted] = syn.truth.eta.maxCoeff() + 1.0;
  std::size_t exposed = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto row = syn.data.exposure.row(i);
    if (!std::binary_search(row.begin(), row.end(), planted)) continue;
    ++exposed;
    CHECK(vip::score_fitness(syn.truth, std::vector<Index>(row.begin(), row.end())).front() == planted);
  }
  CHECK(exposed > 0);
}

TEST_CASE("planted on-topic item outranks off-topic items under relevance") {
  vip::SyntheticConfig cfg;
  cfg.n_users = 20;
  cfg.n_items = 30;
  cfg.planted_strength = 3.0;
  cfg.prior.lambda_u = 400.0;
  cfg.prior.lambda_theta = 400.0;
  cfg.seed = 4;
  const auto syn = vip::generate_synthetic(cfg);
  const auto& s = syn.truth;
  const auto topic_of = [](const Eigen::VectorXd& x) {
    Eigen::Index k;
    x.maxCoeff(&k);
    return k;
  };
  int checked = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const auto ti = topic_of(s.U.col(i));
    std::vector<Index> on, off;
    for (Index j = 0; j < 30; ++j) (topic_of(s.Theta.col(j)) == ti ? on : off).push_back(j);
    if (on.empty() || off.empty()) continue;
    std::vector<Index> stream{on.front()};
    stream.insert(stream.end(), off.begin(), off.end());
    CHECK(vip::score_relevance(s, i, stream).front() == on.front());
    ++checked;
  }
  CHECK(checked > 0);
}
