#include "vip/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "vip/error.hpp"

namespace vip {

namespace {

void write_row(std::ostream& out, const double* data, Eigen::Index n, Eigen::Index stride) {
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k > 0) out << ' ';
    out << format_double(data[k * stride]);
  }
  out << '\n';
}

void write_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& m) {
  out << name << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) write_row(out, m.data() + r, m.cols(), m.rows());
}

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw Error("cannot open checkpoint " + path.string());
  }

  std::string line() {
    std::string s;
    if (!std::getline(in_, s)) fail("unexpected end of file");
    ++line_no_;
    return s;
  }

  void expect(const std::string& tag) {
    if (line() != tag) fail("expected '" + tag + "'");
  }

  std::vector<double> numbers(std::size_t count) {
    const std::string s = line();
    std::vector<double> out;
    out.reserve(count);
    const char* p = s.data();
    const char* end = s.data() + s.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double x = 0.0;
      const auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc()) fail("malformed number");
      out.push_back(x);
      p = next;
    }
    if (out.size() != count) {
      fail("expected " + std::to_string(count) + " values, got " + std::to_string(out.size()));
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(path_.string() + ":" + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

}  // namespace

void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path) {
  const ModelState& s = cp.state;
  s.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  const HyperParams& h = cp.hyper;
  out << "vip-checkpoint 1\n";
  out << "dims " << s.n_users() << ' ' << s.n_items() << ' ' << s.topics() << '\n';
  out << "lambda_u " << format_double(h.lambda_u) << '\n';
  out << "lambda_theta " << format_double(h.lambda_theta) << '\n';
  out << "lambda_eta " << format_double(h.lambda_eta) << '\n';
  out << "conf_a " << format_double(h.conf_a) << '\n';
  out << "conf_b " << format_double(h.conf_b) << '\n';
  out << "conf_c " << format_double(h.conf_c) << '\n';
  out << "visibility_terms " << h.visibility_terms << '\n';
  out << "tol " << format_double(h.tol) << '\n';
  out << "max_iters " << h.max_iters << '\n';
  out << "mu " << format_double(cp.surfing.mu) << '\n';
  out << "lambda " << format_double(cp.surfing.lambda) << '\n';
  write_matrix(out, "U", s.U);
  write_matrix(out, "Theta", s.Theta);
  out << "eta\n";
  write_row(out, s.eta.data(), s.eta.size(), 1);
  out << "v\n";
  write_row(out, s.v.data(), s.v.size(), 1);
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Reader in(path);
  if (in.line() != "vip-checkpoint 1") in.fail("not a version 1 checkpoint");

  std::size_t n = 0, m = 0;
  int k = 0;
  {
    std::istringstream dims(in.line());
    std::string tag;
    if (!(dims >> tag >> n >> m >> k) || tag != "dims" || k < 1) in.fail("bad dims line");
  }
  std::map<std::string, std::string> values;
  const char* keys[] = {"lambda_u", "lambda_theta", "lambda_eta", "conf_a", "conf_b", "conf_c",
                        "visibility_terms", "tol", "max_iters", "mu", "lambda"};
  for (const char* key : keys) {
    std::istringstream kv(in.line());
    std::string tag, value;
    if (!(kv >> tag >> value) || tag != key) in.fail(std::string("expected '") + key + "'");
    values[tag] = value;
  }
  Checkpoint cp;
  auto num = [&](const char* key) { return std::stod(values.at(key)); };
  cp.hyper.topics = k;
  cp.hyper.lambda_u = num("lambda_u");
  cp.hyper.lambda_theta = num("lambda_theta");
  cp.hyper.lambda_eta = num("lambda_eta");
  cp.hyper.conf_a = num("conf_a");
  cp.hyper.conf_b = num("conf_b");
  cp.hyper.conf_c = num("conf_c");
  cp.hyper.visibility_terms = std::stoll(values.at("visibility_terms"));
  cp.hyper.tol = num("tol");
  cp.hyper.max_iters = std::stoi(values.at("max_iters"));
  cp.surfing.mu = num("mu");
  cp.surfing.lambda = num("lambda");

  cp.state = ModelState::zeros(n, m, k);
  auto read_matrix = [&](const char* tag, Eigen::MatrixXd& mat) {
    in.expect(tag);
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
      const auto row = in.numbers(static_cast<std::size_t>(mat.cols()));
      for (Eigen::Index c = 0; c < mat.cols(); ++c) mat(r, c) = row[static_cast<std::size_t>(c)];
    }
  };
  read_matrix("U", cp.state.U);
  read_matrix("Theta", cp.state.Theta);
  in.expect("eta");
  const auto eta = in.numbers(m);
  cp.state.eta = Eigen::Map<const Eigen::VectorXd>(eta.data(), static_cast<Eigen::Index>(m));
  in.expect("v");
  const auto v = in.numbers(n);
  cp.state.v = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n));
  cp.state.validate();
  return cp;
}

}  // namespace vip
