// Command-line front end: runs the mixture, change-point and toy-grid
// experiments with any subset of the samplers, and exposes the independent
// reference computations (exact sampling, exhaustive enumeration) under the
// oracle subcommand. Exit codes: 0 success, 2 bad usage or configuration,
// 3 runtime failure (including --fail-on-diagnostic trips).

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "samc/changepoint.hpp"
#include "samc/experiment.hpp"
#include "samc/mixture.hpp"

namespace {

using namespace samc;

std::vector<AlgoSettings> default_set(ExperimentKind kind) {
  const AlgoSettings base{};
  switch (kind) {
    case ExperimentKind::mixture:
      return {parse_algo_settings("ssamc:kappa=20,t0=25,iters=500000", base),
              parse_algo_settings("samc:t0=500,iters=10000000", base)};
    case ExperimentKind::changepoint:
      return {parse_algo_settings("ssamc:kappa=20,t0=5,iters=100000", base),
              parse_algo_settings("msamc:kappa=20,t0=5,iters=100000", base),
              parse_algo_settings("samc:t0=100,iters=2000000", base),
              parse_algo_settings("plain-mh:iters=2000000", base)};
    case ExperimentKind::toy_check:
      return {parse_algo_settings("ssamc:kappa=10,t0=50,iters=200000", base),
              parse_algo_settings("msamc:kappa=10,t0=50,iters=200000", base),
              parse_algo_settings("samc:t0=500,iters=2000000", base),
              parse_algo_settings("plain-mh:iters=2000000", base)};
  }
  return {};
}

// Options shared by the three experiment subcommands. Each subcommand owns
// its instance so a config file can address them per section.
struct CommonOpts {
  std::vector<std::string> algos;
  std::int64_t kappa = 0;  // 0: keep each algorithm's default
  std::int64_t t0 = 0;
  std::int64_t iters = 0;
  std::int64_t runs = 20;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  int threads = 0;
  bool allow_unequal_budget = false;
  bool fail_on_diagnostic = false;
  double diag_tol = 0.5;
};

void add_common_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--algo", o.algos,
                  "Sampler to run, repeatable: name[:key=value,...] with keys "
                  "kappa, t0, iters; names samc, msamc, ssamc, plain-mh. "
                  "Default: the experiment's standard equal-budget set");
  cmd->add_option("--kappa", o.kappa, "Samples per weight update for every selected sampler");
  cmd->add_option("--t0", o.t0, "Gain-schedule horizon for every selected sampler");
  cmd->add_option("--iters", o.iters, "Weight updates per run for every selected sampler");
  cmd->add_option("--runs", o.runs, "Independent runs per sampler")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Base seed; run r uses a stream derived from (seed, r)")
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory (empty: print the summary to stdout)");
  cmd->add_option("--format", o.format, "Table format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads; 0 = hardware concurrency")
      ->capture_default_str();
  cmd->add_flag("--allow-unequal-budget", o.allow_unequal_budget,
                "Run even when the samplers' evaluation budgets differ");
  cmd->add_flag("--fail-on-diagnostic", o.fail_on_diagnostic,
                "Exit 3 when the cross-run agreement check fails");
  cmd->add_option("--diag-tol", o.diag_tol,
                  "Cross-run sup-norm tolerance on the recentered log weights")
      ->capture_default_str();
}

ExperimentConfig to_config(ExperimentKind kind, const CommonOpts& o) {
  ExperimentConfig cfg;
  cfg.kind = kind;

  if (o.algos.empty()) {
    cfg.algorithms = default_set(kind);
    for (auto& a : cfg.algorithms) {
      if (o.kappa > 0 && a.algo != Algorithm::plain_mh && a.algo != Algorithm::samc)
        a.kappa = o.kappa;
      if (o.t0 > 0) a.t0 = o.t0;
      if (o.iters > 0) a.iterations = o.iters;
    }
  } else {
    AlgoSettings base;
    base.kappa = o.kappa > 0 ? o.kappa : 1;
    base.t0 = o.t0 > 0 ? o.t0 : 100;
    base.iterations = o.iters > 0 ? o.iters : 100000;
    for (const auto& s : o.algos) cfg.algorithms.push_back(parse_algo_settings(s, base));
  }

  cfg.runs = o.runs;
  cfg.seed = o.seed;
  cfg.out_dir = o.out;
  cfg.format = o.format == "json" ? OutputFormat::json : OutputFormat::csv;
  cfg.threads = o.threads;
  cfg.allow_unequal_budget = o.allow_unequal_budget;
  cfg.diag_tolerance = o.diag_tol;
  return cfg;
}

// Shared tail of the experiment subcommands: report, and decide the exit
// code from the diagnostics.
int report(const ExperimentConfig& cfg, const ExperimentOutcome& oc, bool fail_on_diag) {
  for (const auto& a : oc.algos)
    if (a.diagnosed)
      std::cout << "[" << a.settings.label() << "] " << a.diagnostics.text << "\n";

  if (cfg.kind == ExperimentKind::changepoint) {
    const AlgoOutcome* best = nullptr;
    for (const auto& a : oc.algos)
      if (!best || a.map_log_psi > best->map_log_psi) best = &a;
    for (const auto& a : oc.algos) {
      std::cout << a.settings.label() << " best: log_posterior " << a.map_log_psi
                << " k " << a.map_positions.size() << " positions";
      for (int c : a.map_positions) std::cout << " " << c;
      std::cout << "\n";
    }
    if (best) std::cout << "best overall: " << best->settings.label() << "\n";
  }

  if (cfg.out_dir.empty()) {
    if (cfg.format == OutputFormat::json)
      write_summary_json(std::cout, oc.table);
    else
      write_summary_csv(std::cout, oc.table);
  } else {
    for (const auto& f : oc.files_written) std::cout << "wrote " << f << "\n";
  }

  if (!oc.diagnostics_pass) {
    std::cerr << "warning: cross-run agreement check failed\n";
    if (fail_on_diag) return 3;
  }
  return 0;
}

struct OracleOpts {
  std::string experiment;
  std::int64_t samples = 10'000'000;
  std::uint64_t seed = 12345;
  std::string out;
  std::string dataset;
  double alpha = 0.05;
  double beta = 0.05;
  double lambda_rate = 1.0;
};

int run_oracle(const OracleOpts& o) {
  std::vector<double> values;
  int index_base = 1;

  if (o.experiment == "mixture") {
    const MixtureTarget target;
    values = target.true_region_probs(o.samples, o.seed);
  } else {  // changepoint-enum, enforced by the option check
    if (o.dataset.empty())
      throw std::invalid_argument("oracle changepoint-enum needs --dataset");
    std::ifstream in(o.dataset);
    if (!in) throw std::runtime_error("cannot read dataset " + o.dataset);
    const Dataset data = Dataset::read(in);
    const Hyper hyper{o.alpha, o.beta, o.lambda_rate, 0, data.n() - 1};
    values = enumerate_exact_posterior(data, hyper);
    index_base = 0;  // rows are model sizes
  }

  if (o.out.empty()) {
    write_truth_csv(std::cout, values, index_base);
  } else {
    std::ofstream out(o.out);
    if (!out) throw std::runtime_error("cannot write " + o.out);
    write_truth_csv(out, values, index_base);
    std::cout << "wrote " << o.out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive flat-histogram samplers: region-probability and "
               "model-selection experiments with exact reference checks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML file");

  int rc = 0;

  CLI::App* mix = app.add_subcommand(
      "mixture", "Estimate energy-region probabilities of a three-mode Gaussian mixture");
  CommonOpts mix_opts;
  add_common_options(mix, mix_opts);
  std::string truth_path;
  std::int64_t oracle_samples = 10'000'000;
  std::uint64_t oracle_seed = 12345;
  mix->add_option("--truth", truth_path,
                  "Reference region-probability table (default: sample it)");
  mix->add_option("--oracle-samples", oracle_samples,
                  "Draws for the sampled reference table")->capture_default_str();
  mix->add_option("--oracle-seed", oracle_seed, "Seed for the sampled reference table")
      ->capture_default_str();
  mix->callback([&] {
    ExperimentConfig cfg = to_config(ExperimentKind::mixture, mix_opts);
    cfg.truth_path = truth_path;
    cfg.oracle_samples = oracle_samples;
    cfg.oracle_seed = oracle_seed;
    rc = report(cfg, run_experiment(cfg), mix_opts.fail_on_diagnostic);
  });

  CLI::App* chg = app.add_subcommand(
      "changepoint", "Sample multiple change-point models of a Gaussian series");
  CommonOpts chg_opts;
  add_common_options(chg, chg_opts);
  std::string dataset_path;
  std::uint64_t data_seed = 1;
  Hyper hyper{0.05, 0.05, 1.0, 7, 14};
  chg->add_option("--dataset", dataset_path,
                  "Observation series file (default: the built-in 1000-point series)");
  chg->add_option("--data-seed", data_seed, "Seed for the built-in series")
      ->capture_default_str();
  chg->add_option("--alpha", hyper.alpha, "Precision prior shape")->capture_default_str();
  chg->add_option("--beta", hyper.beta, "Precision prior rate")->capture_default_str();
  chg->add_option("--lambda", hyper.lambda_rate, "Model-size prior rate")
      ->capture_default_str();
  chg->add_option("--kmin", hyper.k_min, "Smallest admissible model size")
      ->capture_default_str();
  chg->add_option("--kmax", hyper.k_max, "Largest admissible model size")
      ->capture_default_str();
  chg->callback([&] {
    ExperimentConfig cfg = to_config(ExperimentKind::changepoint, chg_opts);
    cfg.dataset_path = dataset_path;
    cfg.data_seed = data_seed;
    cfg.hyper = hyper;
    rc = report(cfg, run_experiment(cfg), chg_opts.fail_on_diagnostic);
  });

  CLI::App* toy = app.add_subcommand(
      "toy-check", "Exercise every sampler on a small grid with closed-form answers");
  CommonOpts toy_opts;
  add_common_options(toy, toy_opts);
  toy->callback([&] {
    const ExperimentConfig cfg = to_config(ExperimentKind::toy_check, toy_opts);
    rc = report(cfg, run_experiment(cfg), toy_opts.fail_on_diagnostic);
  });

  CLI::App* orc = app.add_subcommand(
      "oracle", "Independent reference computations, written as index,value tables");
  OracleOpts orc_opts;
  orc->add_option("--experiment", orc_opts.experiment,
                  "mixture: region probabilities by exact sampling; "
                  "changepoint-enum: model-size posterior by enumeration")
      ->required()
      ->check(CLI::IsMember({"mixture", "changepoint-enum"}));
  orc->add_option("--samples", orc_opts.samples, "Draws for the mixture reference")
      ->capture_default_str();
  orc->add_option("--seed", orc_opts.seed, "Seed for the mixture reference")
      ->capture_default_str();
  orc->add_option("--out", orc_opts.out, "Output file (empty: stdout)");
  orc->add_option("--dataset", orc_opts.dataset,
                  "Series file for changepoint-enum (2 to 16 points)");
  orc->add_option("--alpha", orc_opts.alpha, "Precision prior shape")->capture_default_str();
  orc->add_option("--beta", orc_opts.beta, "Precision prior rate")->capture_default_str();
  orc->add_option("--lambda", orc_opts.lambda_rate, "Model-size prior rate")
      ->capture_default_str();
  orc->callback([&] { rc = run_oracle(orc_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return rc;
}
