#pragma once

#include <filesystem>

#include "vip/distributions.hpp"
#include "vip/model.hpp"

namespace vip {

struct Checkpoint {
  ModelState state;
  HyperParams hyper;
  SurfingParams surfing;
};

// Plain-text layout, every number in shortest round-trip form:
//
//   vip-checkpoint 1
//   dims <N> <M> <K>
//   <key> <value>          one line per hyperparameter and surfing parameter
//   U                      followed by K lines of N values (row-major K x N)
//   Theta                  followed by K lines of M values
//   eta                    followed by one line of M values
//   v                      followed by one line of N values
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace vip
