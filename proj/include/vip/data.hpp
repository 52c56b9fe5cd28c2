#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vip/distributions.hpp"
#include "vip/sparse.hpp"

namespace vip {

// One line of an event log. An event normally records an adoption; a line
// with adopted = false records only that the item reached the user's stream.
struct AdoptionEvent {
  std::string user_id;
  std::string item_id;
  std::int64_t timestamp = 0;
  bool exposed = false;
  bool adopted = true;
};

struct UserMeta {
  std::string user_id;
  std::int64_t n_friends = 0;
  std::int64_t n_posts = 0;
};

// Incoming URL posts are modelled as post_rate * n_friends, visits as
// visit_rate * n_posts.
struct RhoCoefficients {
  double post_rate = 1.4;
  double visit_rate = 7.6;

  void validate() const;
};

struct RhoEstimate {
  LoadRatio rho;
  // True when n_posts was zero and the one-post floor was applied.
  bool floored = false;
};

RhoEstimate estimate_rho(const UserMeta& meta, const RhoCoefficients& coeffs = {});

struct LoadStats {
  std::size_t events = 0;
  std::size_t duplicate_events = 0;
  std::size_t floored_users = 0;
};

struct AdoptionDataset {
  std::vector<std::string> user_ids;  // sorted
  std::vector<std::string> item_ids;  // sorted
  SparseBinary adoptions;             // users x items
  SparseBinary exposure;              // users x items, friend-recommended pairs
  std::vector<UserMeta> meta;         // parallel to user_ids
  std::vector<double> rho;            // parallel to user_ids
  LoadStats stats;

  std::size_t n_users() const { return user_ids.size(); }
  std::size_t n_items() const { return item_ids.size(); }

  // Throws when any type invariant is violated.
  void validate() const;
};

// Builds the dataset from in-memory records. Users and items are indexed in
// lexicographic id order; only users that occur in `events` are kept.
AdoptionDataset build_dataset(std::span<const AdoptionEvent> events,
                              std::span<const UserMeta> meta, const RhoCoefficients& coeffs = {});

std::vector<AdoptionEvent> read_events(const std::filesystem::path& path);
std::vector<UserMeta> read_meta(const std::filesystem::path& path);

AdoptionDataset load_events(const std::filesystem::path& events_path,
                            const std::filesystem::path& meta_path,
                            const RhoCoefficients& coeffs = {});

// Writes the dataset as an event log (one line per adopted or exposed pair)
// plus a metadata file, both readable by load_events.
void write_events(const AdoptionDataset& data, const std::filesystem::path& events_path,
                  const std::filesystem::path& meta_path);

// Directory layout:
//   users.tsv      index  user_id  n_friends  n_posts  rho
//   items.tsv      index  item_id
//   adoptions.txt  row col value   (value always 1)
//   exposure.txt   row col value
void save_dataset(const AdoptionDataset& data, const std::filesystem::path& dir);
AdoptionDataset load_dataset(const std::filesystem::path& dir);

// Shared float formatting for every text output: shortest form that
// round-trips to the same double.
std::string format_double(double x);

}  // namespace vip
