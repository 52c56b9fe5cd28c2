#include "vip/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "vip/error.hpp"

namespace vip {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line_no,
                             const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

bool skip_line(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line.empty() || line.front() == '#';
}

bool parse_flag(std::string_view s, bool& out) {
  if (s == "0") {
    out = false;
    return true;
  }
  if (s == "1") {
    out = true;
    return true;
  }
  return false;
}

void read_triplets(const std::filesystem::path& path,
                   std::vector<std::pair<Index, Index>>& entries) {
  auto in = open_in(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto f = split_spaces(line);
    Index r = 0, c = 0;
    double value = 0.0;
    if (f.size() != 3 || !parse_number(f[0], r) || !parse_number(f[1], c) ||
        !parse_number(f[2], value)) {
      parse_fail(path, line_no, "expected 'row col value'");
    }
    if (value != 0.0) entries.emplace_back(r, c);
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

void RhoCoefficients::validate() const {
  if (!(post_rate > 0.0) || !(visit_rate > 0.0) || !std::isfinite(post_rate) ||
      !std::isfinite(visit_rate)) {
    throw Error("rho coefficients must be positive and finite");
  }
}

RhoEstimate estimate_rho(const UserMeta& meta, const RhoCoefficients& coeffs) {
  coeffs.validate();
  if (meta.n_friends < 0 || meta.n_posts < 0) {
    throw Error("user '" + meta.user_id + "' has negative counts");
  }
  RhoEstimate out;
  std::int64_t posts = meta.n_posts;
  if (posts == 0) {
    posts = 1;
    out.floored = true;
  }
  out.rho = LoadRatio((coeffs.post_rate * static_cast<double>(meta.n_friends)) /
                      (coeffs.visit_rate * static_cast<double>(posts)));
  return out;
}

void AdoptionDataset::validate() const {
  const std::size_t n = n_users();
  const std::size_t m = n_items();
  if (adoptions.rows() != n || adoptions.cols() != m || exposure.rows() != n ||
      exposure.cols() != m) {
    throw Error("dataset matrices do not match " + std::to_string(n) + "x" + std::to_string(m));
  }
  if (meta.size() != n || rho.size() != n) throw Error("dataset per-user arrays have wrong length");
  if (!std::is_sorted(user_ids.begin(), user_ids.end()) ||
      std::adjacent_find(user_ids.begin(), user_ids.end()) != user_ids.end()) {
    throw Error("user ids must be unique and sorted");
  }
  if (!std::is_sorted(item_ids.begin(), item_ids.end()) ||
      std::adjacent_find(item_ids.begin(), item_ids.end()) != item_ids.end()) {
    throw Error("item ids must be unique and sorted");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(rho[i]) || rho[i] < 0.0) {
      throw Error("rho for user '" + user_ids[i] + "' is not a finite non-negative number");
    }
    if (meta[i].user_id != user_ids[i]) throw Error("metadata out of order at user " + user_ids[i]);
  }
}

AdoptionDataset build_dataset(std::span<const AdoptionEvent> events,
                              std::span<const UserMeta> meta, const RhoCoefficients& coeffs) {
  coeffs.validate();
  AdoptionDataset data;
  data.stats.events = events.size();

  for (const auto& e : events) {
    if (e.user_id.empty() || e.item_id.empty()) throw Error("event with empty id");
    if (e.timestamp < 0) throw Error("event with negative timestamp for user '" + e.user_id + "'");
    data.user_ids.push_back(e.user_id);
    data.item_ids.push_back(e.item_id);
  }
  for (auto* ids : {&data.user_ids, &data.item_ids}) {
    std::sort(ids->begin(), ids->end());
    ids->erase(std::unique(ids->begin(), ids->end()), ids->end());
  }

  std::unordered_map<std::string_view, Index> user_index, item_index;
  for (Index i = 0; i < data.user_ids.size(); ++i) user_index.emplace(data.user_ids[i], i);
  for (Index j = 0; j < data.item_ids.size(); ++j) item_index.emplace(data.item_ids[j], j);

  std::map<std::pair<Index, Index>, std::pair<bool, bool>> pairs;  // (adopted, exposed)
  for (const auto& e : events) {
    const auto key = std::make_pair(user_index.at(e.user_id), item_index.at(e.item_id));
    auto [it, inserted] = pairs.try_emplace(key, e.adopted, e.exposed);
    if (!inserted) {
      ++data.stats.duplicate_events;
      it->second.first = it->second.first || e.adopted;
      it->second.second = it->second.second || e.exposed;
    }
  }
  std::vector<std::pair<Index, Index>> adopted, exposed;
  for (const auto& [key, flags] : pairs) {
    if (flags.first) adopted.push_back(key);
    if (flags.second) exposed.push_back(key);
  }
  data.adoptions = SparseBinary::from_pairs(data.n_users(), data.n_items(), std::move(adopted));
  data.exposure = SparseBinary::from_pairs(data.n_users(), data.n_items(), std::move(exposed));

  std::unordered_map<std::string_view, const UserMeta*> meta_by_id;
  for (const auto& m : meta) meta_by_id[m.user_id] = &m;
  std::vector<std::string> missing;
  data.meta.reserve(data.n_users());
  data.rho.reserve(data.n_users());
  for (const auto& id : data.user_ids) {
    const auto it = meta_by_id.find(id);
    if (it == meta_by_id.end()) {
      missing.push_back(id);
      continue;
    }
    const RhoEstimate est = estimate_rho(*it->second, coeffs);
    if (est.floored) ++data.stats.floored_users;
    data.meta.push_back(*it->second);
    data.rho.push_back(est.rho.value());
  }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " user(s) in events have no metadata:";
    for (std::size_t k = 0; k < missing.size() && k < 10; ++k) msg += " " + missing[k];
    if (missing.size() > 10) msg += " ...";
    throw Error(msg);
  }
  data.validate();
  return data;
}

std::vector<AdoptionEvent> read_events(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<AdoptionEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto f = split_tabs(line);
    if (f.size() != 4 && f.size() != 5) {
      parse_fail(path, line_no, "expected 4 or 5 tab-separated fields, got " +
                                    std::to_string(f.size()));
    }
    AdoptionEvent e;
    e.user_id = f[0];
    e.item_id = f[1];
    if (e.user_id.empty() || e.item_id.empty()) parse_fail(path, line_no, "empty id");
    if (!parse_number(f[2], e.timestamp) || e.timestamp < 0) {
      parse_fail(path, line_no, "timestamp must be a non-negative integer");
    }
    if (!parse_flag(f[3], e.exposed)) parse_fail(path, line_no, "exposed flag must be 0 or 1");
    if (f.size() == 5 && !parse_flag(f[4], e.adopted)) {
      parse_fail(path, line_no, "adopted flag must be 0 or 1");
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<UserMeta> read_meta(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<UserMeta> meta;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto f = split_tabs(line);
    UserMeta m;
    if (f.size() != 3 || f[0].empty() || !parse_number(f[1], m.n_friends) ||
        !parse_number(f[2], m.n_posts) || m.n_friends < 0 || m.n_posts < 0) {
      parse_fail(path, line_no, "expected 'user_id<TAB>n_friends<TAB>n_posts' with counts >= 0");
    }
    m.user_id = f[0];
    meta.push_back(std::move(m));
  }
  return meta;
}

AdoptionDataset load_events(const std::filesystem::path& events_path,
                            const std::filesystem::path& meta_path,
                            const RhoCoefficients& coeffs) {
  const auto events = read_events(events_path);
  const auto meta = read_meta(meta_path);
  return build_dataset(events, meta, coeffs);
}

void write_events(const AdoptionDataset& data, const std::filesystem::path& events_path,
                  const std::filesystem::path& meta_path) {
  auto ev = open_out(events_path);
  ev << "# user_id\titem_id\ttimestamp\texposed\tadopted\n";
  std::int64_t t = 0;
  for (std::size_t i = 0; i < data.n_users(); ++i) {
    const auto adopted = data.adoptions.row(i);
    const auto exposed = data.exposure.row(i);
    std::vector<Index> items(adopted.begin(), adopted.end());
    items.insert(items.end(), exposed.begin(), exposed.end());
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    for (const Index j : items) {
      const bool a = std::binary_search(adopted.begin(), adopted.end(), j);
      const bool x = std::binary_search(exposed.begin(), exposed.end(), j);
      ev << data.user_ids[i] << '\t' << data.item_ids[j] << '\t' << t++ << '\t' << (x ? 1 : 0)
         << '\t' << (a ? 1 : 0) << '\n';
    }
  }
  auto me = open_out(meta_path);
  me << "# user_id\tn_friends\tn_posts\n";
  for (const auto& m : data.meta) me << m.user_id << '\t' << m.n_friends << '\t' << m.n_posts << '\n';
  if (!ev || !me) throw Error("failed writing event log");
}

void save_dataset(const AdoptionDataset& data, const std::filesystem::path& dir) {
  data.validate();
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "users.tsv");
    out << "# index\tuser_id\tn_friends\tn_posts\trho\n";
    for (std::size_t i = 0; i < data.n_users(); ++i) {
      out << i << '\t' << data.user_ids[i] << '\t' << data.meta[i].n_friends << '\t'
          << data.meta[i].n_posts << '\t' << format_double(data.rho[i]) << '\n';
    }
  }
  {
    auto out = open_out(dir / "items.tsv");
    out << "# index\titem_id\n";
    for (std::size_t j = 0; j < data.n_items(); ++j) out << j << '\t' << data.item_ids[j] << '\n';
  }
  for (const auto& [name, matrix] : {std::pair{"adoptions.txt", &data.adoptions},
                                     std::pair{"exposure.txt", &data.exposure}}) {
    auto out = open_out(dir / name);
    out << "# " << matrix->rows() << ' ' << matrix->cols() << ' ' << matrix->nnz() << '\n';
    for (const auto& [r, c] : matrix->entries()) out << r << ' ' << c << " 1\n";
    if (!out) throw Error("failed writing " + (dir / name).string());
  }
}

AdoptionDataset load_dataset(const std::filesystem::path& dir) {
  AdoptionDataset data;
  std::string line;
  {
    const auto path = dir / "users.tsv";
    auto in = open_in(path);
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (skip_line(line)) continue;
      const auto f = split_tabs(line);
      std::size_t index = 0;
      UserMeta m;
      double rho = 0.0;
      if (f.size() != 5 || !parse_number(f[0], index) || index != data.user_ids.size() ||
          !parse_number(f[2], m.n_friends) || !parse_number(f[3], m.n_posts) ||
          !parse_number(f[4], rho)) {
        parse_fail(path, line_no, "expected 'index user_id n_friends n_posts rho' in index order");
      }
      m.user_id = f[1];
      data.user_ids.push_back(m.user_id);
      data.meta.push_back(std::move(m));
      data.rho.push_back(rho);
    }
  }
  {
    const auto path = dir / "items.tsv";
    auto in = open_in(path);
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (skip_line(line)) continue;
      const auto f = split_tabs(line);
      std::size_t index = 0;
      if (f.size() != 2 || !parse_number(f[0], index) || index != data.item_ids.size()) {
        parse_fail(path, line_no, "expected 'index item_id' in index order");
      }
      data.item_ids.emplace_back(f[1]);
    }
  }
  std::vector<std::pair<Index, Index>> adopted, exposed;
  read_triplets(dir / "adoptions.txt", adopted);
  read_triplets(dir / "exposure.txt", exposed);
  data.adoptions = SparseBinary::from_pairs(data.n_users(), data.n_items(), std::move(adopted));
  data.exposure = SparseBinary::from_pairs(data.n_users(), data.n_items(), std::move(exposed));
  data.validate();
  return data;
}

}  // namespace vip
