// vip: train, evaluate, simulate and analyze the visibility / fitness /
// relevance adoption model from the command line.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "vip/checkpoint.hpp"
#include "vip/config.hpp"
#include "vip/data.hpp"
#include "vip/error.hpp"
#include "vip/eval.hpp"
#include "vip/kernels.hpp"
#include "vip/model.hpp"
#include "vip/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalFlags {
  std::string config;
  std::string seed;
  std::string out;
  std::string threads;
  std::string checkpoint;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw vip::Error("cannot write " + path.string());
  return out;
}

vip::RunConfig build_config(const GlobalFlags& flags, const std::vector<std::string>& extras) {
  vip::RunConfig cfg;
  if (!flags.config.empty()) {
    if (!fs::exists(flags.config)) throw vip::Error("config file not found: " + flags.config);
    cfg = vip::RunConfig::from_file(flags.config);
  }
  // --key value overrides, applied in command-line order.
  for (std::size_t k = 0; k < extras.size(); ++k) {
    std::string token = extras[k];
    if (token.rfind("--", 0) != 0) throw vip::Error("unexpected argument '" + token + "'");
    token = token.substr(2);
    std::string value;
    if (const auto eq = token.find('='); eq != std::string::npos) {
      value = token.substr(eq + 1);
      token = token.substr(0, eq);
    } else {
      if (k + 1 >= extras.size()) throw vip::Error("option --" + token + " needs a value");
      value = extras[++k];
    }
    cfg.set(token, value);
  }
  if (!flags.seed.empty()) cfg.set("seed", flags.seed);
  if (!flags.out.empty()) cfg.set("out", flags.out);
  if (!flags.threads.empty()) cfg.set("threads", flags.threads);
  if (!flags.checkpoint.empty()) cfg.set("checkpoint", flags.checkpoint);
  cfg.validate();
  if (cfg.isa != "auto") vip::kernels::force_isa(vip::kernels::parse_isa(cfg.isa));
  return cfg;
}

void require_file(const fs::path& path, const char* what) {
  if (path.empty()) throw vip::Error(std::string("no ") + what + " configured");
  if (!fs::exists(path)) throw vip::Error(std::string(what) + " not found: " + path.string());
}

vip::AdoptionDataset load_data(const vip::RunConfig& cfg) {
  if (!cfg.dataset.empty()) {
    require_file(cfg.dataset, "dataset directory");
    return vip::load_dataset(cfg.dataset);
  }
  require_file(cfg.events, "events file");
  require_file(cfg.meta, "meta file");
  return vip::load_events(cfg.events, cfg.meta, cfg.coeffs);
}

void prepare_out(const vip::RunConfig& cfg) {
  fs::create_directories(cfg.out);
  auto out = open_out(cfg.out / "config.resolved.txt");
  out << cfg.resolved();
}

int cmd_train(const vip::RunConfig& cfg) {
  const auto data = load_data(cfg);
  if (data.n_users() == 0 || data.n_items() == 0) throw vip::Error("dataset is empty");
  prepare_out(cfg);
  const auto pairs = vip::TrainingPairs::build(data.adoptions, data.exposure, cfg.hyper,
                                               cfg.negatives_per_user, *cfg.seed);
  const auto vis = vip::compute_visibility(data.rho, cfg.surfing, cfg.hyper.visibility_terms);
  const auto result = vip::fit(pairs, vis, cfg.hyper, cfg.fit_options());

  vip::save_checkpoint({result.state, cfg.hyper, cfg.surfing}, cfg.out / "checkpoint.txt");
  auto trace = open_out(cfg.out / "trace.tsv");
  trace << "# sweep\tlog_likelihood\n";
  for (std::size_t k = 0; k < result.trace.size(); ++k) {
    trace << k << '\t' << vip::format_double(result.trace[k]) << '\n';
  }
  std::cout << "trained " << data.n_users() << " users x " << data.n_items() << " items, "
            << result.sweeps << " sweeps, " << (result.converged ? "converged" : "not converged")
            << ", log-likelihood " << vip::format_double(result.trace.back()) << '\n';
  return 0;
}

void write_reports(const vip::RunConfig& cfg, const std::vector<vip::EvalReport>& reports) {
  const auto& xs = reports.front().xs;
  auto header = [&](std::ostream& out, const char* first) {
    out << "# " << first;
    for (const auto x : xs) out << "\trecall@" << x;
    out << '\n';
  };
  auto recall = open_out(cfg.out / "recall.tsv");
  auto stddev = open_out(cfg.out / "recall_std.tsv");
  header(recall, "model");
  header(stddev, "model");
  for (const auto& rep : reports) {
    recall << rep.model_tag;
    stddev << rep.model_tag;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      recall << '\t' << vip::format_double(rep.recall_at[k]);
      stddev << '\t' << vip::format_double(rep.recall_std[k]);
    }
    recall << '\n';
    stddev << '\n';
  }

  auto per_user = open_out(cfg.out / "per_user.tsv");
  per_user << "# model\tuser_index";
  for (const auto x : xs) per_user << "\trecall@" << x;
  per_user << '\n';
  for (const auto& rep : reports) {
    for (const auto& [user, values] : rep.per_user) {
      per_user << rep.model_tag << '\t' << user;
      for (const double v : values) per_user << '\t' << vip::format_double(v);
      per_user << '\n';
    }
  }

  auto summary = open_out(cfg.out / "summary.txt");
  const bool has3 = std::find(xs.begin(), xs.end(), std::size_t{3}) != xs.end();
  if (has3) {
    auto activity = open_out(cfg.out / "activity.tsv");
    activity << "# model\tactivity_lo\tactivity_hi\tcount\tmean_recall@3\tstd_recall@3\n";
    for (const auto& rep : reports) {
      for (const auto& b : vip::activity_buckets(rep, cfg.buckets, 3)) {
        activity << rep.model_tag << '\t' << b.lo << '\t' << (b.hi ? std::to_string(*b.hi) : "inf")
                 << '\t' << b.count << '\t' << (b.mean ? vip::format_double(*b.mean) : "NA")
                 << '\t' << (b.stddev ? vip::format_double(*b.stddev) : "NA") << '\n';
      }
    }
  }
  for (const auto& rep : reports) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      summary << rep.model_tag << ".recall@" << xs[k] << " = " << vip::format_double(rep.recall_at[k])
              << '\n';
    }
    summary << rep.model_tag << ".users = " << rep.per_user.size() << '\n';
    summary << rep.model_tag << ".skipped = " << rep.skipped << '\n';
    if (has3) {
      summary << rep.model_tag << ".activity_spearman@3 = "
              << vip::format_double(vip::activity_rank_correlation(rep, 3)) << '\n';
    }
  }
}

int cmd_evaluate(const vip::RunConfig& cfg) {
  const auto data = load_data(cfg);
  std::vector<vip::EvalReport> reports;
  if (!cfg.checkpoint.empty()) {
    require_file(cfg.checkpoint, "checkpoint");
    const auto cp = vip::load_checkpoint(cfg.checkpoint);
    reports.push_back(vip::evaluate_state(cp.state, data, cfg.xs));
  } else {
    reports = vip::cross_validate(data, cfg.hyper, cfg.surfing, cfg.cv_options());
  }
  prepare_out(cfg);
  write_reports(cfg, reports);
  for (const auto& rep : reports) {
    std::cout << rep.model_tag;
    for (std::size_t k = 0; k < rep.xs.size(); ++k) {
      std::cout << "  recall@" << rep.xs[k] << "=" << vip::format_double(rep.recall_at[k]);
    }
    std::cout << '\n';
  }
  return 0;
}

int cmd_simulate(const vip::RunConfig& cfg) {
  const auto sim = vip::generate_synthetic(cfg.synthetic());
  prepare_out(cfg);
  vip::save_dataset(sim.data, cfg.out / "dataset");
  vip::write_events(sim.data, cfg.out / "events.tsv", cfg.out / "meta.tsv");
  vip::HyperParams truth_hyper = cfg.hyper;
  truth_hyper.topics = cfg.sim.prior.topics;
  truth_hyper.lambda_u = cfg.sim.prior.lambda_u;
  truth_hyper.lambda_theta = cfg.sim.prior.lambda_theta;
  truth_hyper.lambda_eta = cfg.sim.prior.lambda_eta;
  vip::save_checkpoint({sim.truth, truth_hyper, cfg.surfing}, cfg.out / "truth.txt");
  std::cout << "simulated " << sim.data.n_users() << " users x " << sim.data.n_items()
            << " items, " << sim.data.adoptions.nnz() << " adoptions, " << sim.data.exposure.nnz()
            << " exposed pairs\n";
  return 0;
}

int cmd_analyze(const vip::RunConfig& cfg) {
  const auto data = load_data(cfg);
  require_file(cfg.checkpoint, "checkpoint");
  const auto cp = vip::load_checkpoint(cfg.checkpoint);
  const auto report = vip::decompose_items(cp.state, data);
  prepare_out(cfg);
  auto table = open_out(cfg.out / "decomposition.tsv");
  table << "# item_id\tcascade_size\tE_V\tE_I\tE_P\n";
  for (const auto& d : report.items) {
    table << data.item_ids[d.item] << '\t' << d.cascade_size << '\t'
          << vip::format_double(d.expected_visibility) << '\t'
          << vip::format_double(d.expected_fitness) << '\t'
          << vip::format_double(d.expected_relevance) << '\n';
  }
  auto summary = open_out(cfg.out / "analysis.txt");
  summary << "items = " << report.items.size() << '\n';
  summary << "fitness_cascade_pearson = " << vip::format_double(report.fitness_cascade_correlation)
          << '\n';
  std::cout << report.items.size() << " adopted items, fitness/cascade-size correlation "
            << vip::format_double(report.fitness_cascade_correlation) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visibility, fitness and relevance model of item adoption in social streams"};
  app.require_subcommand(1);

  GlobalFlags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "Flat key = value config file");
    sub->add_option("--seed", flags.seed, "Seed for every random sub-stream");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
    sub->allow_extras();
  };
  auto* train = app.add_subcommand("train", "Fit the model and write a checkpoint");
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated recall@X for the configured models");
  auto* simulate = app.add_subcommand("simulate", "Sample a synthetic dataset from the generative model");
  auto* analyze = app.add_subcommand("analyze", "Per-item visibility/fitness/relevance decomposition");
  for (auto* sub : {train, evaluate, simulate, analyze}) add_common(sub);
  evaluate->add_option("--checkpoint", flags.checkpoint, "Score this checkpoint in-sample instead");
  analyze->add_option("--checkpoint", flags.checkpoint, "Trained checkpoint");

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();
    const vip::RunConfig cfg = build_config(flags, sub->remaining());
    if (sub == train) return cmd_train(cfg);
    if (sub == evaluate) return cmd_evaluate(cfg);
    if (sub == simulate) return cmd_simulate(cfg);
    return cmd_analyze(cfg);
  } catch (const std::exception& e) {
    std::cerr << "vip: " << e.what() << '\n';
    return 1;
  }
}
