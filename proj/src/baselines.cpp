#include "vip/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "vip/error.hpp"
#include "vip/rng.hpp"

namespace vip {

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::random:
      return "random";
    case BaselineKind::fitness:
      return "fitness";
    case BaselineKind::relevance:
      return "relevance";
  }
  return "unknown";
}

std::optional<BaselineKind> parse_baseline(std::string_view name) {
  if (name == "random") return BaselineKind::random;
  if (name == "fitness") return BaselineKind::fitness;
  if (name == "relevance") return BaselineKind::relevance;
  return std::nullopt;
}

std::vector<Index> rank_by_score(std::span<const Index> items, std::span<const double> scores) {
  if (items.size() != scores.size()) throw Error("rank_by_score: size mismatch");
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return items[a] < items[b];
  });
  std::vector<Index> out;
  out.reserve(items.size());
  for (const std::size_t k : order) out.push_back(items[k]);
  return out;
}

std::vector<Index> score_random(std::span<const Index> stream, std::uint64_t seed) {
  std::vector<Index> out(stream.begin(), stream.end());
  Rng rng(substream_seed(seed, "random-baseline"));
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

std::vector<Index> score_fitness(const ModelState& state, std::span<const Index> stream) {
  std::vector<double> scores;
  scores.reserve(stream.size());
  for (const Index j : stream) scores.push_back(state.eta[j]);
  return rank_by_score(stream, scores);
}

std::vector<Index> score_relevance(const ModelState& pmf_state, std::size_t user,
                                   std::span<const Index> stream) {
  std::vector<double> scores;
  scores.reserve(stream.size());
  for (const Index j : stream) scores.push_back(relevance(pmf_state, user, j));
  return rank_by_score(stream, scores);
}

std::vector<Index> score_vip(const ModelState& state, std::size_t user,
                             std::span<const Index> stream) {
  std::vector<double> scores;
  scores.reserve(stream.size());
  for (const Index j : stream) scores.push_back(predict(state, user, j));
  return rank_by_score(stream, scores);
}

}  // namespace vip
