#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vip/model.hpp"
#include "vip/sparse.hpp"

namespace vip {

enum class BaselineKind { random, fitness, relevance };

std::string to_string(BaselineKind kind);
std::optional<BaselineKind> parse_baseline(std::string_view name);

// Sorts items by descending score; equal scores keep ascending item order.
std::vector<Index> rank_by_score(std::span<const Index> items, std::span<const double> scores);

// Uniform random permutation of the stream, reproducible from seed.
std::vector<Index> score_random(std::span<const Index> stream, std::uint64_t seed);

// Stream items by learned fitness, highest first.
std::vector<Index> score_fitness(const ModelState& state, std::span<const Index> stream);

// Stream items by u_i . theta_j from a matrix-factorization state.
std::vector<Index> score_relevance(const ModelState& pmf_state, std::size_t user,
                                   std::span<const Index> stream);

// Stream items by the full adoption score v_i (u_i . theta_j + eta_j).
std::vector<Index> score_vip(const ModelState& state, std::size_t user,
                             std::span<const Index> stream);

}  // namespace vip
