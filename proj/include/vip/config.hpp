#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vip/data.hpp"
#include "vip/distributions.hpp"
#include "vip/eval.hpp"
#include "vip/model.hpp"
#include "vip/synthetic.hpp"

namespace vip {

// Everything a run depends on. Read from a flat `key = value` file (blank
// lines and `#` comments ignored) and overridable key by key.
struct RunConfig {
  std::filesystem::path events;
  std::filesystem::path meta;
  std::filesystem::path dataset;  // a save_dataset directory; used instead of events/meta
  std::filesystem::path out = "out";
  std::filesystem::path checkpoint;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;  // 0: all cores
  std::string isa = "auto";

  HyperParams hyper{};
  SurfingParams surfing{};
  RhoCoefficients coeffs{};
  std::size_t negatives_per_user = 10;
  double init_stddev = 0.1;
  std::array<Block, 3> sweep_order{Block::users, Block::items, Block::fitness};

  int folds = 5;
  std::vector<std::size_t> xs{1, 3, 5, 10};
  std::vector<Recommender> models{Recommender::vip, Recommender::relevance, Recommender::fitness,
                                  Recommender::random};
  std::vector<std::size_t> buckets = default_activity_boundaries();

  SyntheticConfig sim{};

  // Relative paths are resolved against base_dir.
  void set(std::string_view key, std::string_view value,
           const std::filesystem::path& base_dir = {});

  static RunConfig from_file(const std::filesystem::path& path);

  static std::vector<std::string> keys();

  // Every key with its effective value, one `key = value` line each, in a
  // fixed order.
  std::string resolved() const;

  // Seed present and parameters consistent. Does not touch the filesystem.
  void validate() const;

  SyntheticConfig synthetic() const;
  CrossValidationOptions cv_options() const;
  FitOptions fit_options() const;
};

}  // namespace vip
