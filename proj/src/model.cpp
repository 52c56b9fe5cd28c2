#include "vip/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

#include "vip/error.hpp"
#include "vip/kernels.hpp"
#include "vip/parallel.hpp"
#include "vip/rng.hpp"

namespace vip {

namespace {

std::span<const double> col(const Eigen::MatrixXd& m, std::size_t c) {
  return {m.data() + c * static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.rows())};
}

// Solves (ridge I + sum_k w_k x_k x_k^T) z = sum_k w_k t_k x_k.
class RidgeSystem {
 public:
  RidgeSystem(int dim, double ridge)
      : dim_(static_cast<std::size_t>(dim)), gram_(Eigen::MatrixXd::Zero(dim, dim)),
        rhs_(Eigen::VectorXd::Zero(dim)) {
    gram_.diagonal().setConstant(ridge);
  }

  void add(std::span<const double> x, double weight, double target) {
    kernels::syr(weight, x, {gram_.data(), dim_ * dim_});
    kernels::axpy(weight * target, x, {rhs_.data(), dim_});
  }

  Eigen::VectorXd solve() const {
    Eigen::LLT<Eigen::MatrixXd> llt(gram_);
    if (llt.info() != Eigen::Success) throw NumericError("ridge system is not positive definite");
    return llt.solve(rhs_);
  }

 private:
  std::size_t dim_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd rhs_;
};

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

void HyperParams::validate() const {
  if (topics < 1) throw Error("topics must be >= 1");
  if (!(lambda_u > 0.0) || !(lambda_theta > 0.0) || !(lambda_eta > 0.0)) {
    throw Error("prior precisions lambda_u, lambda_theta, lambda_eta must be positive");
  }
  if (!(conf_a > conf_b && conf_b > conf_c && conf_c > 0.0)) {
    throw Error("confidences must satisfy conf_a > conf_b > conf_c > 0");
  }
  if (visibility_terms < 1) throw Error("visibility_terms must be >= 1");
  if (!(tol > 0.0)) throw Error("tol must be positive");
  if (max_iters < 1) throw Error("max_iters must be >= 1");
}

ModelState ModelState::zeros(std::size_t users, std::size_t items, int topics) {
  ModelState s;
  s.U = Eigen::MatrixXd::Zero(topics, static_cast<Eigen::Index>(users));
  s.Theta = Eigen::MatrixXd::Zero(topics, static_cast<Eigen::Index>(items));
  s.eta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(items));
  s.v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(users));
  return s;
}

void ModelState::validate() const {
  if (Theta.rows() != U.rows()) throw Error("U and Theta disagree on the number of topics");
  if (eta.size() != Theta.cols()) throw Error("eta length does not match the item count");
  if (v.size() != U.cols()) throw Error("visibility length does not match the user count");
  if (!U.allFinite() || !Theta.allFinite() || !eta.allFinite() || !v.allFinite()) {
    throw NumericError("model state has non-finite entries");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0 && v[i] <= 1.0)) throw NumericError("visibility outside (0, 1]");
  }
}

TrainingPairs::TrainingPairs(std::size_t users, std::size_t items, std::vector<Triplet> triplets)
    : users_(users), items_(items), user_ptr_(users + 1, 0), item_ptr_(items + 1, 0) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(a.user, a.item) < std::tie(b.user, b.item);
  });
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (t.user >= users || t.item >= items) throw Error("training pair index out of range");
    if (!(t.c > 0.0) || !std::isfinite(t.r)) throw Error("training pair needs c > 0 and finite r");
    if (k > 0 && triplets[k - 1].user == t.user && triplets[k - 1].item == t.item) {
      throw Error("duplicate training pair");
    }
    ++user_ptr_[t.user + 1];
    ++item_ptr_[t.item + 1];
  }
  for (std::size_t i = 0; i < users; ++i) user_ptr_[i + 1] += user_ptr_[i];
  for (std::size_t j = 0; j < items; ++j) item_ptr_[j + 1] += item_ptr_[j];

  by_user_.resize(triplets.size());
  by_item_.resize(triplets.size());
  std::vector<std::size_t> fill(item_ptr_.begin(), item_ptr_.end() - 1);
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    by_user_[k] = {t.item, t.r, t.c};
    by_item_[fill[t.item]++] = {t.user, t.r, t.c};
  }
}

TrainingPairs TrainingPairs::build(const SparseBinary& adoptions, const SparseBinary& exposure,
                                   const HyperParams& hyper, std::size_t negatives_per_user,
                                   std::uint64_t seed) {
  const std::size_t n = adoptions.rows();
  const std::size_t m = adoptions.cols();
  if (exposure.rows() != n || exposure.cols() != m) throw Error("exposure mask shape mismatch");

  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < n; ++i) {
    const auto adopted = adoptions.row(i);
    const auto exposed = exposure.row(i);
    for (const Index j : adopted) triplets.push_back({static_cast<Index>(i), j, 1.0, hyper.conf_a});
    for (const Index j : exposed) {
      if (!std::binary_search(adopted.begin(), adopted.end(), j)) {
        triplets.push_back({static_cast<Index>(i), j, 0.0, hyper.conf_b});
      }
    }
    if (negatives_per_user == 0) continue;

    // Sample from the complement of adopted-or-exposed items.
    std::vector<Index> taken(adopted.begin(), adopted.end());
    taken.insert(taken.end(), exposed.begin(), exposed.end());
    std::sort(taken.begin(), taken.end());
    taken.erase(std::unique(taken.begin(), taken.end()), taken.end());
    const std::size_t available = m - taken.size();
    const std::size_t want = std::min(negatives_per_user, available);
    if (want == 0) continue;
    Rng rng(substream_seed(seed, "negatives", i));
    std::vector<Index> picked;
    if (want * 2 >= available) {
      std::vector<Index> pool;
      pool.reserve(available);
      for (Index j = 0; j < m; ++j) {
        if (!std::binary_search(taken.begin(), taken.end(), j)) pool.push_back(j);
      }
      std::shuffle(pool.begin(), pool.end(), rng);
      picked.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
    } else {
      std::uniform_int_distribution<Index> pick(0, static_cast<Index>(m - 1));
      while (picked.size() < want) {
        const Index j = pick(rng);
        if (std::binary_search(taken.begin(), taken.end(), j)) continue;
        if (std::find(picked.begin(), picked.end(), j) != picked.end()) continue;
        picked.push_back(j);
      }
    }
    for (const Index j : picked) triplets.push_back({static_cast<Index>(i), j, 0.0, hyper.conf_c});
  }
  return TrainingPairs(n, m, std::move(triplets));
}

double relevance(const ModelState& state, std::size_t user, std::size_t item) {
  return kernels::dot(col(state.U, user), col(state.Theta, item));
}

double predict(const ModelState& state, std::size_t user, std::size_t item) {
  return state.v[static_cast<Eigen::Index>(user)] *
         (relevance(state, user, item) + state.eta[static_cast<Eigen::Index>(item)]);
}

Eigen::VectorXd compute_visibility(std::span<const double> rho, const SurfingParams& surfing,
                                   std::int64_t terms) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(rho.size()));
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const VisibilityResult res = visibility(LoadRatio(rho[i]), surfing, terms);
    if (!res.converged) {
      throw NumericError("visibility series for user " + std::to_string(i) + " (rho=" +
                         format_double(rho[i]) + ") not converged within " +
                         std::to_string(terms) + " terms; tail bound " +
                         format_double(res.tail_bound));
    }
    if (!(res.value > 0.0)) {
      throw NumericError("visibility underflowed to zero for user " + std::to_string(i));
    }
    v[static_cast<Eigen::Index>(i)] = res.value;
  }
  return v;
}

double log_likelihood(const ModelState& state, const TrainingPairs& pairs,
                      const HyperParams& hyper) {
  if (pairs.n_users() != state.n_users() || pairs.n_items() != state.n_items()) {
    throw Error("training pairs do not match model dimensions");
  }
  double ll = -0.5 * hyper.lambda_u * state.U.squaredNorm() -
              0.5 * hyper.lambda_theta * state.Theta.squaredNorm() -
              0.5 * hyper.lambda_eta * state.eta.squaredNorm();
  for (Eigen::Index i = 0; i < state.v.size(); ++i) ll += std::log(state.v[i]);
  double data = 0.0;
  for (std::size_t i = 0; i < pairs.n_users(); ++i) {
    for (const auto& p : pairs.user(i)) {
      const double e = p.r - predict(state, i, p.other);
      data += p.c * e * e;
    }
  }
  return ll - 0.5 * data;
}

// Pair (i, j) contributes c (r - v (u.theta + eta))^2. For fixed theta and eta
// this is c v^2 (t - u.theta)^2 with t = r / v - eta, i.e. weight c v^2 and
// right-hand side c v (r - v eta) theta.
Eigen::VectorXd update_user(const ModelState& state, const TrainingPairs& pairs,
                            const HyperParams& hyper, std::size_t user) {
  const double vi = state.v[static_cast<Eigen::Index>(user)];
  RidgeSystem sys(state.topics(), hyper.lambda_u);
  for (const auto& p : pairs.user(user)) {
    const double eta = state.eta[p.other];
    sys.add(col(state.Theta, p.other), p.c * vi * vi, (p.r - vi * eta) / vi);
  }
  return sys.solve();
}

Eigen::VectorXd update_item(const ModelState& state, const TrainingPairs& pairs,
                            const HyperParams& hyper, std::size_t item) {
  const double eta = state.eta[static_cast<Eigen::Index>(item)];
  RidgeSystem sys(state.topics(), hyper.lambda_theta);
  for (const auto& p : pairs.item(item)) {
    const double vi = state.v[p.other];
    sys.add(col(state.U, p.other), p.c * vi * vi, (p.r - vi * eta) / vi);
  }
  return sys.solve();
}

double update_fitness(const ModelState& state, const TrainingPairs& pairs,
                      const HyperParams& hyper, std::size_t item) {
  double num = 0.0;
  double den = hyper.lambda_eta;
  for (const auto& p : pairs.item(item)) {
    const double vi = state.v[p.other];
    num += p.c * vi * (p.r - vi * relevance(state, p.other, item));
    den += p.c * vi * vi;
  }
  return num / den;
}

std::string to_string(Block block) {
  switch (block) {
    case Block::users:
      return "users";
    case Block::items:
      return "items";
    case Block::fitness:
      return "fitness";
  }
  return "unknown";
}

ModelState initial_state(std::size_t users, std::size_t items, int topics,
                         const FitOptions& options) {
  ModelState s = ModelState::zeros(users, items, topics);
  Rng rng(substream_seed(options.init_seed, "init"));
  std::normal_distribution<double> normal(0.0, options.init_stddev);
  for (Eigen::Index k = 0; k < s.U.size(); ++k) s.U.data()[k] = normal(rng);
  for (Eigen::Index k = 0; k < s.Theta.size(); ++k) s.Theta.data()[k] = normal(rng);
  return s;
}

FitResult fit(const TrainingPairs& pairs, const Eigen::VectorXd& visibility,
              const HyperParams& hyper, const FitOptions& options) {
  hyper.validate();
  if (static_cast<std::size_t>(visibility.size()) != pairs.n_users()) {
    throw Error("visibility vector length does not match the user count");
  }
  ModelState state = initial_state(pairs.n_users(), pairs.n_items(), hyper.topics, options);
  state.v = visibility;
  return fit_from(pairs, std::move(state), hyper, options);
}

FitResult fit_from(const TrainingPairs& pairs, ModelState state, const HyperParams& hyper,
                   const FitOptions& options) {
  hyper.validate();
  if (pairs.size() == 0) throw Error("cannot fit a model without training pairs");
  if (state.topics() != hyper.topics) throw Error("state topic count differs from hyper.topics");
  if (options.clamp_visibility) state.v.setOnes();
  if (options.clamp_fitness) state.eta.setZero();
  state.validate();

  FitResult result;
  const unsigned threads = resolve_threads(options.threads);
  double ll = log_likelihood(state, pairs, hyper);
  if (!std::isfinite(ll)) throw NumericError("objective is not finite at initialization");
  result.trace.push_back(ll);

  for (int sweep = 0; sweep < hyper.max_iters; ++sweep) {
    for (const Block block : options.order) {
      switch (block) {
        case Block::users:
          parallel_for(state.n_users(), threads, [&](std::size_t i) {
            state.U.col(static_cast<Eigen::Index>(i)) = update_user(state, pairs, hyper, i);
          });
          if (!all_finite(state.U)) throw NumericError("non-finite entries after the users block");
          break;
        case Block::items:
          parallel_for(state.n_items(), threads, [&](std::size_t j) {
            state.Theta.col(static_cast<Eigen::Index>(j)) = update_item(state, pairs, hyper, j);
          });
          if (!all_finite(state.Theta)) throw NumericError("non-finite entries after the items block");
          break;
        case Block::fitness:
          if (options.clamp_fitness) break;
          parallel_for(state.n_items(), threads, [&](std::size_t j) {
            state.eta[static_cast<Eigen::Index>(j)] = update_fitness(state, pairs, hyper, j);
          });
          if (!state.eta.allFinite()) throw NumericError("non-finite entries after the fitness block");
          break;
      }
    }
    const double next = log_likelihood(state, pairs, hyper);
    if (!std::isfinite(next)) {
      throw NumericError("objective became non-finite in sweep " + std::to_string(sweep + 1));
    }
    result.trace.push_back(next);
    result.sweeps = sweep + 1;
    const double rel = std::abs(next - ll) / std::max(std::abs(next), 1e-300);
    ll = next;
    if (rel < hyper.tol) {
      result.converged = true;
      break;
    }
  }
  result.state = std::move(state);
  return result;
}

}  // namespace vip
