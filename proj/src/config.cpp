#include "vip/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "vip/error.hpp"
#include "vip/kernels.hpp"

namespace vip {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_as(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error("config key '" + std::string(key) + "': cannot parse '" + std::string(value) + "'");
  }
  return out;
}

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto piece = trim(value.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::size_t> parse_sizes(std::string_view key, std::string_view value) {
  std::vector<std::size_t> out;
  for (const auto piece : split_list(value)) out.push_back(parse_as<std::size_t>(key, piece));
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k > 0) s += ',';
    if constexpr (std::is_same_v<T, Recommender>) {
      s += to_string(xs[k]);
    } else {
      s += std::to_string(xs[k]);
    }
  }
  return s;
}

std::filesystem::path resolve(std::string_view value, const std::filesystem::path& base) {
  std::filesystem::path p{std::string(value)};
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return (base / p).lexically_normal();
}

struct Entry {
  const char* key;
  std::function<void(RunConfig&, std::string_view, const std::filesystem::path&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define VIP_REAL(name, field)                                                                    \
  Entry {                                                                                        \
    name, [](RunConfig& c, std::string_view v, const auto&) { c.field = parse_as<double>(name, v); }, \
        [](const RunConfig& c) { return format_double(c.field); }                                \
  }
#define VIP_INT(name, type, field)                                                               \
  Entry {                                                                                        \
    name, [](RunConfig& c, std::string_view v, const auto&) { c.field = parse_as<type>(name, v); }, \
        [](const RunConfig& c) { return std::to_string(c.field); }                               \
  }
#define VIP_PATH(name, field)                                                                    \
  Entry {                                                                                        \
    name, [](RunConfig& c, std::string_view v, const auto& base) { c.field = resolve(v, base); }, \
        [](const RunConfig& c) { return c.field.string(); }                                      \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      VIP_PATH("events", events),
      VIP_PATH("meta", meta),
      VIP_PATH("dataset", dataset),
      VIP_PATH("out", out),
      VIP_PATH("checkpoint", checkpoint),
      Entry{"seed",
            [](RunConfig& c, std::string_view v, const auto&) {
              c.seed = parse_as<std::uint64_t>("seed", v);
            },
            [](const RunConfig& c) { return c.seed ? std::to_string(*c.seed) : std::string(); }},
      VIP_INT("threads", unsigned, threads),
      Entry{"isa",
            [](RunConfig& c, std::string_view v, const auto&) {
              if (v != "auto" && !kernels::parse_isa(v)) {
                throw Error("config key 'isa': expected auto, scalar or avx2");
              }
              c.isa = std::string(v);
            },
            [](const RunConfig& c) { return c.isa; }},
      VIP_INT("topics", int, hyper.topics),
      VIP_REAL("lambda_u", hyper.lambda_u),
      VIP_REAL("lambda_theta", hyper.lambda_theta),
      VIP_REAL("lambda_eta", hyper.lambda_eta),
      VIP_REAL("conf_a", hyper.conf_a),
      VIP_REAL("conf_b", hyper.conf_b),
      VIP_REAL("conf_c", hyper.conf_c),
      VIP_INT("visibility_terms", std::int64_t, hyper.visibility_terms),
      VIP_REAL("tol", hyper.tol),
      VIP_INT("max_iters", int, hyper.max_iters),
      VIP_REAL("mu", surfing.mu),
      VIP_REAL("lambda", surfing.lambda),
      VIP_REAL("post_rate_coeff", coeffs.post_rate),
      VIP_REAL("visit_rate_coeff", coeffs.visit_rate),
      VIP_INT("negatives_per_user", std::size_t, negatives_per_user),
      VIP_REAL("init_stddev", init_stddev),
      Entry{"sweep_order",
            [](RunConfig& c, std::string_view v, const auto&) {
              const auto parts = split_list(v);
              std::array<Block, 3> order{};
              std::array<bool, 3> seen{};
              if (parts.size() != 3) throw Error("sweep_order needs users,items,fitness in some order");
              for (std::size_t k = 0; k < 3; ++k) {
                if (parts[k] == "users") order[k] = Block::users;
                else if (parts[k] == "items") order[k] = Block::items;
                else if (parts[k] == "fitness") order[k] = Block::fitness;
                else throw Error("sweep_order: unknown block '" + std::string(parts[k]) + "'");
                if (seen[static_cast<int>(order[k])]) throw Error("sweep_order repeats a block");
                seen[static_cast<int>(order[k])] = true;
              }
              c.sweep_order = order;
            },
            [](const RunConfig& c) {
              return to_string(c.sweep_order[0]) + "," + to_string(c.sweep_order[1]) + "," +
                     to_string(c.sweep_order[2]);
            }},
      VIP_INT("folds", int, folds),
      Entry{"x_list",
            [](RunConfig& c, std::string_view v, const auto&) { c.xs = parse_sizes("x_list", v); },
            [](const RunConfig& c) { return join(c.xs); }},
      Entry{"models",
            [](RunConfig& c, std::string_view v, const auto&) {
              c.models.clear();
              for (const auto piece : split_list(v)) {
                const auto m = parse_recommender(piece);
                if (!m) throw Error("models: unknown model '" + std::string(piece) + "'");
                c.models.push_back(*m);
              }
            },
            [](const RunConfig& c) { return join(c.models); }},
      Entry{"buckets",
            [](RunConfig& c, std::string_view v, const auto&) { c.buckets = parse_sizes("buckets", v); },
            [](const RunConfig& c) { return join(c.buckets); }},
      VIP_INT("sim_users", std::size_t, sim.n_users),
      VIP_INT("sim_items", std::size_t, sim.n_items),
      VIP_INT("sim_topics", int, sim.prior.topics),
      VIP_REAL("sim_lambda_u", sim.prior.lambda_u),
      VIP_REAL("sim_lambda_theta", sim.prior.lambda_theta),
      VIP_REAL("sim_lambda_eta", sim.prior.lambda_eta),
      VIP_REAL("sim_rho_min", sim.rho_min),
      VIP_REAL("sim_rho_max", sim.rho_max),
      VIP_REAL("sim_planted_strength", sim.planted_strength),
      VIP_REAL("sim_exposure", sim.exposure_density),
      VIP_REAL("sim_noise_precision", sim.noise_precision),
      VIP_REAL("sim_threshold", sim.threshold),
      VIP_INT("sim_posts_per_user", std::int64_t, sim.posts_per_user),
  };
  return table;
}

#undef VIP_REAL
#undef VIP_INT
#undef VIP_PATH

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value,
                    const std::filesystem::path& base_dir) {
  for (const auto& e : entries()) {
    if (key == e.key) {
      e.set(*this, trim(value), base_dir);
      return;
    }
  }
  throw Error("unknown config key '" + std::string(key) + "'");
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  RunConfig cfg;
  const auto base = path.parent_path();
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t split = line.find('=');
    std::string_view key, value;
    if (split != std::string_view::npos) {
      key = trim(line.substr(0, split));
      value = trim(line.substr(split + 1));
    } else {
      split = line.find_first_of(" \t");
      if (split == std::string_view::npos) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
      }
      key = trim(line.substr(0, split));
      value = trim(line.substr(split + 1));
    }
    try {
      cfg.set(key, value, base);
    } catch (const Error& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> out;
  for (const auto& e : entries()) out.emplace_back(e.key);
  return out;
}

std::string RunConfig::resolved() const {
  std::ostringstream out;
  for (const auto& e : entries()) out << e.key << " = " << e.get(*this) << '\n';
  return out.str();
}

void RunConfig::validate() const {
  if (!seed) throw Error("config is missing a seed (set 'seed' or pass --seed)");
  hyper.validate();
  surfing.validate();
  coeffs.validate();
  if (folds < 2) throw Error("folds must be >= 2");
  if (xs.empty()) throw Error("x_list must not be empty");
  for (const auto x : xs) {
    if (x < 1) throw Error("x_list entries must be >= 1");
  }
  if (models.empty()) throw Error("models must not be empty");
  if (!(init_stddev > 0.0)) throw Error("init_stddev must be positive");
}

SyntheticConfig RunConfig::synthetic() const {
  SyntheticConfig s = sim;
  s.surfing = surfing;
  s.coeffs = coeffs;
  s.prior.visibility_terms = hyper.visibility_terms;
  s.seed = seed.value_or(0);
  return s;
}

FitOptions RunConfig::fit_options() const {
  FitOptions f;
  f.order = sweep_order;
  f.init_seed = seed.value_or(0);
  f.init_stddev = init_stddev;
  f.threads = threads;
  return f;
}

CrossValidationOptions RunConfig::cv_options() const {
  CrossValidationOptions o;
  o.folds = folds;
  o.xs = xs;
  o.models = models;
  o.negatives_per_user = negatives_per_user;
  o.seed = seed.value_or(0);
  o.fit = fit_options();
  return o;
}

}  // namespace vip
