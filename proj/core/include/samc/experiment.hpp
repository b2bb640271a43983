#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "samc/changepoint.hpp"
#include "samc/engine.hpp"
#include "samc/theta.hpp"

namespace samc {

enum class ExperimentKind { mixture, changepoint, toy_check };
enum class OutputFormat { csv, json };

// One algorithm's run parameters within an experiment.
struct AlgoSettings {
  Algorithm algo = Algorithm::ssamc;
  std::int64_t kappa = 1;
  std::int64_t t0 = 1;
  std::int64_t iterations = 1;

  // Target evaluations one run costs; the budget-parity check compares these.
  std::int64_t budget() const {
    return algo == Algorithm::plain_mh ? iterations : kappa * iterations;
  }
  std::string label() const { return algorithm_name(algo); }
};

// Parse "ssamc" or "ssamc:kappa=20,t0=25,iters=500000" on top of defaults.
AlgoSettings parse_algo_settings(const std::string& text, const AlgoSettings& defaults);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::toy_check;
  std::vector<AlgoSettings> algorithms;
  std::int64_t runs = 20;
  std::uint64_t seed = 1;
  std::string out_dir;             // empty: write nothing
  OutputFormat format = OutputFormat::csv;
  bool allow_unequal_budget = false;
  double diag_tolerance = 0.5;
  int threads = 0;                 // 0 = hardware concurrency

  // mixture only
  std::int64_t oracle_samples = 10'000'000;
  std::uint64_t oracle_seed = 12345;
  std::string truth_path;          // load the reference instead of sampling it

  // changepoint only
  std::string dataset_path;        // load the series instead of generating it
  std::uint64_t data_seed = 1;
  Hyper hyper{0.05, 0.05, 1.0, 7, 14};
};

struct EstimateRow {
  std::string algorithm;
  int index = 0;  // region number or model size, depending on the experiment
  double mean = 0.0;
  double sd = 0.0;
  std::optional<double> rmse;  // absent when there is no reference value
  std::int64_t energy_evals = 0;
};

struct SummaryTable {
  std::vector<EstimateRow> rows;
};

// Across-run mean, standard deviation and (when truth is given) RMSE per
// index. Entry j is labeled index_base + j. A single run yields sd = 0.
SummaryTable aggregate(const std::string& algo_label,
                       const std::vector<std::vector<double>>& per_run,
                       const std::optional<std::vector<double>>& truth,
                       std::int64_t energy_evals, int index_base);

// Cross-run agreement check on the adaptive runs: recentered theta vectors
// compared pairwise in sup norm over commonly visited regions (recentered
// again on that common set, since each vector carries an arbitrary shift),
// plus a flag for any pair whose visited-region masks differ.
struct ConvergenceReport {
  bool pass = true;
  double worst_theta_gap = 0.0;
  std::vector<std::pair<int, int>> theta_outlier_pairs;
  std::vector<std::pair<int, int>> mask_mismatch_pairs;
  std::string text;
};

ConvergenceReport diagnose_convergence(const std::vector<ThetaVector>& thetas,
                                       const std::vector<std::vector<bool>>& masks,
                                       double tolerance);

struct AlgoOutcome {
  AlgoSettings settings;
  std::vector<std::vector<double>> estimates;  // run x index
  std::vector<ThetaVector> thetas;             // recentered finals
  std::vector<std::vector<bool>> masks;
  ConvergenceReport diagnostics;
  bool diagnosed = false;  // false for plain-mh, which has nothing to diagnose
  // changepoint only: best posterior state over all runs
  double map_log_psi = 0.0;
  std::vector<int> map_positions;
};

struct ExperimentOutcome {
  std::vector<AlgoOutcome> algos;
  std::optional<std::vector<double>> truth;
  SummaryTable table;
  int index_base = 1;
  bool diagnostics_pass = true;
  std::vector<std::string> files_written;
};

// Run every (algorithm, run) pair, aggregate, and, when out_dir is set,
// write the estimate and summary tables plus the experiment's side files
// (reference values, generated dataset, best-state report, diagnostics).
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

// Table writers, exposed for tests. estimates: one row per (algorithm, run,
// index); summary: one row per (algorithm, index), rmse empty when absent.
void write_estimates_csv(std::ostream& out, const std::vector<AlgoOutcome>& algos,
                         int index_base);
void write_summary_csv(std::ostream& out, const SummaryTable& table);
void write_estimates_json(std::ostream& out, const std::vector<AlgoOutcome>& algos,
                          int index_base);
void write_summary_json(std::ostream& out, const SummaryTable& table);

// Reference-value table round trip (index, value per line).
void write_truth_csv(std::ostream& out, const std::vector<double>& truth, int index_base);
std::vector<double> read_truth_csv(std::istream& in);

}  // namespace samc
