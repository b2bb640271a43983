#include "samc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "samc/mean_field.hpp"
#include "samc/mixture.hpp"
#include "samc/rng.hpp"
#include "samc/toy.hpp"

namespace samc {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Fixed-size work pool over [0, total); item order in memory is fixed by the
// caller's result slots, so scheduling cannot change any output.
void parallel_for(int threads, std::int64_t total,
                  const std::function<void(std::int64_t)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (total < threads) threads = static_cast<int>(total);
  if (threads <= 1) {
    for (std::int64_t i = 0; i < total; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= total) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

SamplerConfig make_sampler_config(const AlgoSettings& s, std::size_t m) {
  return SamplerConfig{s.algo,
                       s.algo == Algorithm::plain_mh ? 1 : s.kappa,
                       s.iterations,
                       GainSchedule{std::max<std::int64_t>(1, s.t0)},
                       DesiredProbs::uniform(m),
                       KernelSpec{},
                       0,
                       0};
}

// Run one algorithm's full set of runs against a shared const model. post
// sees each run's result, indexed so results land in fixed slots.
template <typename M, typename PostFn>
void run_algo(const M& model, const ExperimentConfig& cfg, AlgoOutcome& ao, PostFn&& post) {
  const std::int64_t runs = cfg.runs;
  ao.estimates.assign(static_cast<std::size_t>(runs), {});
  ao.thetas.assign(static_cast<std::size_t>(runs), {});
  ao.masks.assign(static_cast<std::size_t>(runs), {});
  const SamplerConfig base = make_sampler_config(ao.settings, model.region_count());

  parallel_for(cfg.threads, runs, [&](std::int64_t r) {
    SamplerConfig sc = base;
    sc.seed = run_seed(cfg.seed, static_cast<std::uint64_t>(r));
    auto res = run_sampler(model, sc);
    const auto idx = static_cast<std::size_t>(r);
    ao.estimates[idx] = res.p_hat_estimate;
    ao.thetas[idx] = res.final_theta;
    ao.masks[idx] = res.stats.visited_mask();
    post(idx, res);
  });

  if (ao.settings.algo != Algorithm::plain_mh) {
    ao.diagnosed = true;
    ao.diagnostics = diagnose_convergence(ao.thetas, ao.masks, cfg.diag_tolerance);
  } else {
    ao.diagnostics.text = "plain-mh carries no adaptive state; nothing to diagnose";
  }
}

std::ofstream open_out(const fs::path& p, std::vector<std::string>& written) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  written.push_back(p.string());
  return out;
}

void write_tables(const ExperimentConfig& cfg, ExperimentOutcome& oc) {
  if (cfg.out_dir.empty()) return;
  fs::create_directories(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  if (cfg.format == OutputFormat::csv) {
    auto est = open_out(dir / "estimates.csv", oc.files_written);
    write_estimates_csv(est, oc.algos, oc.index_base);
    auto sum = open_out(dir / "summary.csv", oc.files_written);
    write_summary_csv(sum, oc.table);
  } else {
    auto est = open_out(dir / "estimates.json", oc.files_written);
    write_estimates_json(est, oc.algos, oc.index_base);
    auto sum = open_out(dir / "summary.json", oc.files_written);
    write_summary_json(sum, oc.table);
  }
  auto diag = open_out(dir / "diagnostics.txt", oc.files_written);
  for (const auto& a : oc.algos) {
    diag << "[" << a.settings.label() << "]\n"
         << a.diagnostics.text << "\n";
  }
  diag << (oc.diagnostics_pass ? "overall: pass\n" : "overall: FAIL\n");
}

void finish(const ExperimentConfig& cfg, ExperimentOutcome& oc, int index_base) {
  oc.index_base = index_base;
  for (auto& a : oc.algos) {
    SummaryTable t =
        aggregate(a.settings.label(), a.estimates, oc.truth,
                  a.settings.budget(), index_base);
    for (auto& row : t.rows) oc.table.rows.push_back(std::move(row));
    if (a.diagnosed && !a.diagnostics.pass) oc.diagnostics_pass = false;
  }
  write_tables(cfg, oc);
}

ExperimentOutcome run_mixture_experiment(const ExperimentConfig& cfg) {
  ExperimentOutcome oc;
  const MixtureTarget model;

  if (!cfg.truth_path.empty()) {
    std::ifstream in(cfg.truth_path);
    if (!in) throw std::invalid_argument("cannot read truth file " + cfg.truth_path);
    oc.truth = read_truth_csv(in);
    if (oc.truth->size() != model.region_count())
      throw std::invalid_argument("truth file has the wrong number of regions");
  } else {
    oc.truth = model.true_region_probs(cfg.oracle_samples, cfg.oracle_seed);
  }

  for (const auto& s : cfg.algorithms) {
    AlgoOutcome ao;
    ao.settings = s;
    run_algo(model, cfg, ao, [](std::size_t, const auto&) {});
    oc.algos.push_back(std::move(ao));
  }

  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    auto out = open_out(fs::path(cfg.out_dir) / "truth.csv", oc.files_written);
    write_truth_csv(out, *oc.truth, 1);
  }
  finish(cfg, oc, 1);
  return oc;
}

ExperimentOutcome run_changepoint_experiment(const ExperimentConfig& cfg) {
  ExperimentOutcome oc;
  bool generated = false;
  Dataset data = [&] {
    if (!cfg.dataset_path.empty()) {
      std::ifstream in(cfg.dataset_path);
      if (!in) throw std::invalid_argument("cannot read dataset " + cfg.dataset_path);
      return Dataset::read(in);
    }
    generated = true;
    return Dataset::generate_default(cfg.data_seed);
  }();
  const ChangePointTarget model(std::move(data), cfg.hyper);

  for (const auto& s : cfg.algorithms) {
    AlgoOutcome ao;
    ao.settings = s;
    std::vector<double> lp(static_cast<std::size_t>(cfg.runs),
                           -std::numeric_limits<double>::infinity());
    std::vector<std::vector<int>> pos(static_cast<std::size_t>(cfg.runs));
    run_algo(model, cfg, ao, [&](std::size_t r, const RunResult<ChangePointModel>& res) {
      lp[r] = res.map_record.log_psi;
      pos[r] = res.map_record.state.positions;
    });
    ao.map_log_psi = lp[0];
    ao.map_positions = pos[0];
    for (std::size_t r = 1; r < lp.size(); ++r)
      if (lp[r] > ao.map_log_psi) {  // ties keep the earlier run
        ao.map_log_psi = lp[r];
        ao.map_positions = pos[r];
      }
    oc.algos.push_back(std::move(ao));
  }

  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    if (generated) {
      auto out = open_out(fs::path(cfg.out_dir) / "dataset.txt", oc.files_written);
      model.data().write(out, cfg.data_seed);
    }
    auto map = open_out(fs::path(cfg.out_dir) / "map.txt", oc.files_written);
    const AlgoOutcome* best = &oc.algos[0];
    for (const auto& a : oc.algos)
      if (a.map_log_psi > best->map_log_psi) best = &a;
    map << "# best state found, per algorithm and overall\n";
    for (const auto& a : oc.algos) {
      map << a.settings.label() << " log_posterior " << fmt17(a.map_log_psi)
          << " k " << a.map_positions.size() << " positions";
      for (int c : a.map_positions) map << " " << c;
      map << "\n";
    }
    map << "best " << best->settings.label() << "\n";
    if (generated) {
      const auto truth = Dataset::default_true_positions();
      map << "generator_k " << truth.size() << " generator_positions";
      for (int c : truth) map << " " << c;
      map << "\n";
    }
  }
  finish(cfg, oc, cfg.hyper.k_min);
  return oc;
}

ExperimentOutcome run_toy_experiment(const ExperimentConfig& cfg) {
  ExperimentOutcome oc;
  const DiscreteGridTarget model = standard_toy_target();
  oc.truth = model.exact_region_probs();

  for (const auto& s : cfg.algorithms) {
    AlgoOutcome ao;
    ao.settings = s;
    run_algo(model, cfg, ao, [](std::size_t, const auto&) {});
    oc.algos.push_back(std::move(ao));
  }

  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    {
      auto out = open_out(fs::path(cfg.out_dir) / "truth.csv", oc.files_written);
      write_truth_csv(out, *oc.truth, 1);
    }
    auto rep = open_out(fs::path(cfg.out_dir) / "theory.txt", oc.files_written);
    const std::size_t m = model.region_count();
    const DesiredProbs pi = DesiredProbs::uniform(m);
    const std::vector<double> omega = model.exact_omega();

    // Where theta should settle: log(omega/pi), recentered.
    ThetaVector target(m);
    for (std::size_t i = 0; i < m; ++i) target[i] = std::log(omega[i] / pi.pi[i]);
    target = recenter(target);
    rep << "# deviation of recentered theta from log(omega/pi), per algorithm\n";
    for (const auto& a : oc.algos) {
      if (a.settings.algo == Algorithm::plain_mh) continue;
      double worst = 0.0, mean = 0.0;
      for (const auto& th : a.thetas) {
        double d = 0.0;
        for (std::size_t i = 0; i < m; ++i) d = std::max(d, std::abs(th[i] - target[i]));
        worst = std::max(worst, d);
        mean += d;
      }
      mean /= static_cast<double>(a.thetas.size());
      rep << a.settings.label() << " max_dev " << fmt6(worst) << " mean_dev "
          << fmt6(mean) << "\n";
    }

    // Drift-field spot checks at random weight vectors: the descent
    // direction never increases the distance functional, the drift
    // components sum to zero, and the closed-form gradient matches finite
    // differences.
    RngStream rng(run_seed(cfg.seed, 0xD1F7));
    double max_vdot = -std::numeric_limits<double>::infinity();
    double max_sum_h = 0.0, max_fd_err = 0.0;
    for (int rep_i = 0; rep_i < 200; ++rep_i) {
      ThetaVector th(m);
      for (double& v : th) v = 3.0 * rng.normal();
      const auto chk = lyapunov_check(omega, th, pi);
      max_vdot = std::max(max_vdot, chk.v_dot);
      const auto h = mean_field_h(omega, th, pi);
      double sh = 0.0;
      for (double v : h) sh += v;
      max_sum_h = std::max(max_sum_h, std::abs(sh));
      const double eps = 1e-6;
      for (std::size_t i = 0; i < m; ++i) {
        ThetaVector up = th, dn = th;
        up[i] += eps;
        dn[i] -= eps;
        const double fd =
            (lyapunov_check(omega, up, pi).v - lyapunov_check(omega, dn, pi).v) / (2.0 * eps);
        max_fd_err = std::max(max_fd_err, std::abs(fd - chk.grad_v[i]));
      }
    }
    rep << "# drift-field spot checks at 200 random weight vectors\n";
    rep << "max_v_dot " << fmt6(max_vdot) << " (must be <= 0)\n";
    rep << "max_abs_sum_h " << fmt6(max_sum_h) << " (must be ~ 0)\n";
    rep << "max_grad_fd_error " << fmt6(max_fd_err) << "\n";
  }
  finish(cfg, oc, 1);
  return oc;
}

}  // namespace

AlgoSettings parse_algo_settings(const std::string& text, const AlgoSettings& defaults) {
  std::string name = text, rest;
  if (const auto p = text.find(':'); p != std::string::npos) {
    name = text.substr(0, p);
    rest = text.substr(p + 1);
  }
  const auto alg = parse_algorithm(name);
  if (!alg) throw std::invalid_argument("unknown algorithm: " + name);
  AlgoSettings out = defaults;
  out.algo = *alg;

  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("algorithm option needs key=value, got: " + item);
    const std::string key = item.substr(0, eq);
    std::int64_t value = 0;
    try {
      value = std::stoll(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad integer in algorithm option: " + item);
    }
    if (value < 1) throw std::invalid_argument("algorithm option must be >= 1: " + item);
    if (key == "kappa") out.kappa = value;
    else if (key == "t0") out.t0 = value;
    else if (key == "iters") out.iterations = value;
    else throw std::invalid_argument("unknown algorithm option: " + key);
  }
  return out;
}

SummaryTable aggregate(const std::string& algo_label,
                       const std::vector<std::vector<double>>& per_run,
                       const std::optional<std::vector<double>>& truth,
                       std::int64_t energy_evals, int index_base) {
  if (per_run.empty()) throw std::invalid_argument("aggregate: need at least one run");
  const std::size_t m = per_run[0].size();
  for (const auto& run : per_run)
    if (run.size() != m) throw std::invalid_argument("aggregate: ragged estimates");
  if (truth && truth->size() != m)
    throw std::invalid_argument("aggregate: truth size mismatch");

  const auto runs = static_cast<double>(per_run.size());
  SummaryTable table;
  table.rows.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    EstimateRow row;
    row.algorithm = algo_label;
    row.index = index_base + static_cast<int>(j);
    row.energy_evals = energy_evals;

    double mean = 0.0;
    for (const auto& run : per_run) mean += run[j];
    mean /= runs;
    double var = 0.0;
    for (const auto& run : per_run) {
      const double d = run[j] - mean;
      var += d * d;
    }
    // Population variance over the runs actually made; one run gives sd 0.
    row.mean = mean;
    row.sd = std::sqrt(var / runs);
    if (truth) {
      double se = 0.0;
      for (const auto& run : per_run) {
        const double d = run[j] - (*truth)[j];
        se += d * d;
      }
      row.rmse = std::sqrt(se / runs);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ConvergenceReport diagnose_convergence(const std::vector<ThetaVector>& thetas,
                                       const std::vector<std::vector<bool>>& masks,
                                       double tolerance) {
  if (thetas.size() != masks.size())
    throw std::invalid_argument("diagnose_convergence: runs mismatch");
  if (!(tolerance > 0.0)) throw std::invalid_argument("diagnose_convergence: tolerance must be > 0");
  for (std::size_t r = 0; r < thetas.size(); ++r)
    if (thetas[r].size() != masks[r].size())
      throw std::invalid_argument("diagnose_convergence: theta and mask sizes differ");
  ConvergenceReport rep;
  const int runs = static_cast<int>(thetas.size());

  for (int a = 0; a < runs; ++a)
    for (int b = a + 1; b < runs; ++b) {
      if (masks[a] != masks[b]) rep.mask_mismatch_pairs.emplace_back(a, b);
      // Compare on regions both runs visited, recentering each vector on
      // that common set first: each carries its own arbitrary shift.
      std::vector<std::size_t> common;
      for (std::size_t i = 0; i < masks[a].size(); ++i)
        if (masks[a][i] && masks[b][i]) common.push_back(i);
      if (common.empty()) continue;
      double ma = 0.0, mb = 0.0;
      for (std::size_t i : common) {
        ma += thetas[a][i];
        mb += thetas[b][i];
      }
      ma /= static_cast<double>(common.size());
      mb /= static_cast<double>(common.size());
      double gap = 0.0;
      for (std::size_t i : common)
        gap = std::max(gap, std::abs((thetas[a][i] - ma) - (thetas[b][i] - mb)));
      rep.worst_theta_gap = std::max(rep.worst_theta_gap, gap);
      if (gap > tolerance) rep.theta_outlier_pairs.emplace_back(a, b);
    }

  rep.pass = rep.theta_outlier_pairs.empty() && rep.mask_mismatch_pairs.empty();
  std::ostringstream os;
  os << runs << " runs: worst pairwise theta gap " << fmt6(rep.worst_theta_gap)
     << " (tolerance " << fmt6(tolerance) << "); "
     << rep.theta_outlier_pairs.size() << " theta outlier pair(s), "
     << rep.mask_mismatch_pairs.size() << " visited-mask mismatch(es)";
  rep.text = os.str();
  return rep;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("run_experiment: runs must be >= 1");
  if (cfg.algorithms.empty())
    throw std::invalid_argument("run_experiment: no algorithms selected");

  if (!cfg.allow_unequal_budget) {
    const std::int64_t b0 = cfg.algorithms[0].budget();
    for (const auto& a : cfg.algorithms)
      if (a.budget() != b0) {
        std::ostringstream os;
        os << "algorithms have unequal evaluation budgets (";
        for (std::size_t i = 0; i < cfg.algorithms.size(); ++i)
          os << (i ? ", " : "") << cfg.algorithms[i].label() << ": "
             << cfg.algorithms[i].budget();
        os << "); pass --allow-unequal-budget to run anyway";
        throw std::invalid_argument(os.str());
      }
  }

  switch (cfg.kind) {
    case ExperimentKind::mixture: return run_mixture_experiment(cfg);
    case ExperimentKind::changepoint: return run_changepoint_experiment(cfg);
    case ExperimentKind::toy_check: return run_toy_experiment(cfg);
  }
  throw std::logic_error("run_experiment: unreachable");
}

void write_estimates_csv(std::ostream& out, const std::vector<AlgoOutcome>& algos,
                         int index_base) {
  out << "algorithm,run,index,estimate\n";
  for (const auto& a : algos)
    for (std::size_t r = 0; r < a.estimates.size(); ++r)
      for (std::size_t j = 0; j < a.estimates[r].size(); ++j)
        out << a.settings.label() << "," << r << ","
            << index_base + static_cast<int>(j) << ","
            << fmt17(a.estimates[r][j]) << "\n";
}

void write_summary_csv(std::ostream& out, const SummaryTable& table) {
  out << "algorithm,index,mean,sd,rmse,energy_evals\n";
  for (const auto& row : table.rows) {
    out << row.algorithm << "," << row.index << "," << fmt17(row.mean) << ","
        << fmt17(row.sd) << ",";
    if (row.rmse) out << fmt17(*row.rmse);
    out << "," << row.energy_evals << "\n";
  }
}

void write_estimates_json(std::ostream& out, const std::vector<AlgoOutcome>& algos,
                          int index_base) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& a : algos)
    for (std::size_t r = 0; r < a.estimates.size(); ++r)
      for (std::size_t j = 0; j < a.estimates[r].size(); ++j)
        arr.push_back({{"algorithm", a.settings.label()},
                       {"run", r},
                       {"index", index_base + static_cast<int>(j)},
                       {"estimate", a.estimates[r][j]}});
  out << arr.dump(2) << "\n";
}

void write_summary_json(std::ostream& out, const SummaryTable& table) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json o{{"algorithm", row.algorithm},
                     {"index", row.index},
                     {"mean", row.mean},
                     {"sd", row.sd},
                     {"energy_evals", row.energy_evals}};
    o["rmse"] = row.rmse ? nlohmann::json(*row.rmse) : nlohmann::json(nullptr);
    arr.push_back(std::move(o));
  }
  out << arr.dump(2) << "\n";
}

void write_truth_csv(std::ostream& out, const std::vector<double>& truth, int index_base) {
  out << "index,value\n";
  for (std::size_t j = 0; j < truth.size(); ++j)
    out << index_base + static_cast<int>(j) << "," << fmt17(truth[j]) << "\n";
}

std::vector<double> read_truth_csv(std::istream& in) {
  std::vector<double> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {  // header
      first = false;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("read_truth_csv: bad line: " + line);
    out.push_back(std::stod(line.substr(comma + 1)));
  }
  if (out.empty()) throw std::invalid_argument("read_truth_csv: empty table");
  return out;
}

}  // namespace samc
