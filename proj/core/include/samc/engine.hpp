#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "samc/gain.hpp"
#include "samc/rng.hpp"
#include "samc/smoothing.hpp"
#include "samc/theta.hpp"

namespace samc {

// Candidate state plus log q(y -> x) - log q(x -> y). Symmetric proposals
// report 0. A nullopt proposal means the move could not be constructed
// (empty candidate set, step off the support); the chain stays put and the
// attempt counts as a rejection.
template <typename State>
struct Proposal {
  State state;
  double log_ratio = 0.0;
};

// Everything the engine needs to know about one state, from one evaluation
// of the target.
struct StateEval {
  double log_psi = 0.0;
  double lambda = 0.0;
  int region = 0;  // 1-based
};

// A sampling problem: an unnormalized density psi on State, a partition
// statistic lambda, and the induced 1-based region index. evaluate() bundles
// the three so the hot path pays for one density evaluation per proposal.
template <typename M>
concept TargetModel = requires(const M& m, const typename M::State& x, RngStream& rng) {
  typename M::State;
  { m.region_count() } -> std::convertible_to<std::size_t>;
  { m.lambda_scale() } -> std::convertible_to<double>;
  { m.log_psi(x) } -> std::convertible_to<double>;
  { m.lambda_value(x) } -> std::convertible_to<double>;
  { m.region_index(x) } -> std::convertible_to<int>;
  { m.evaluate(x) } -> std::convertible_to<StateEval>;
  { m.initial_state(rng) } -> std::convertible_to<typename M::State>;
  { m.propose(x, rng) } -> std::convertible_to<std::optional<Proposal<typename M::State>>>;
};

enum class Algorithm { samc, msamc, ssamc, plain_mh };

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::samc: return "samc";
    case Algorithm::msamc: return "msamc";
    case Algorithm::ssamc: return "ssamc";
    case Algorithm::plain_mh: return "plain-mh";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& name) {
  if (name == "samc") return Algorithm::samc;
  if (name == "msamc") return Algorithm::msamc;
  if (name == "ssamc") return Algorithm::ssamc;
  if (name == "plain-mh" || name == "plain_mh") return Algorithm::plain_mh;
  return std::nullopt;
}

// One run's knobs. pi must match the model's region count; plain-mh ignores
// gain and pi but the sizes are still validated.
struct SamplerConfig {
  Algorithm algorithm = Algorithm::ssamc;
  std::int64_t kappa = 1;         // chain samples per weight update
  std::int64_t iterations = 1;    // number of weight updates N
  GainSchedule gain{1};
  DesiredProbs pi;                // desired sampling proportions
  KernelSpec kernel{};
  std::uint64_t seed = 0;         // per-run stream seed
  std::int64_t trace_stride = 0;  // record theta every this many updates; 0 = off

  void validate(std::size_t region_count) const {
    if (iterations < 1) throw std::invalid_argument("SamplerConfig: iterations must be >= 1");
    if (kappa < 1) throw std::invalid_argument("SamplerConfig: kappa must be >= 1");
    if (algorithm == Algorithm::samc && kappa != 1)
      throw std::invalid_argument("SamplerConfig: the single-sample algorithm requires kappa = 1");
    if (pi.size() != region_count)
      throw std::invalid_argument("SamplerConfig: pi size does not match the region count");
    if (trace_stride < 0) throw std::invalid_argument("SamplerConfig: trace_stride must be >= 0");
  }
};

// Best state seen so far, by log psi. Ties keep the earlier state.
template <typename State>
struct MapRecord {
  State state;
  double log_psi = 0.0;
};

template <typename State>
struct RunResult {
  ThetaVector final_theta;            // recentered; zeros for plain-mh
  RegionStats stats;                  // visit counts over all kappa * N samples
  std::vector<double> p_hat_estimate; // estimated region probabilities
  std::int64_t energy_evaluations = 0;
  MapRecord<State> map_record;
  std::vector<std::pair<std::int64_t, ThetaVector>> theta_trace;
};

// Current chain position plus its cached evaluation, so a rejected step
// costs nothing beyond the proposal's evaluation.
template <typename State>
struct ChainState {
  State x;
  double log_psi = 0.0;
  double lambda = 0.0;
  int region = 0;
};

namespace detail {

// Log acceptance ratio of one reweighted step. theta enters through the
// regions of the two endpoints only; theta = 0 recovers plain MH on psi.
inline double mh_log_accept(double log_psi_x, double log_psi_y,
                            double theta_x, double theta_y,
                            double log_proposal_ratio) {
  return (log_psi_y - log_psi_x) + (theta_x - theta_y) + log_proposal_ratio;
}

}  // namespace detail

// One MH step targeting the theta-reweighted trial distribution. Returns
// whether the proposal was accepted. map, when given, tracks the best
// evaluated state including rejected proposals.
template <TargetModel M>
bool mh_step(ChainState<typename M::State>& chain, const ThetaVector& theta,
             const M& model, RngStream& rng,
             MapRecord<typename M::State>* map = nullptr) {
  auto prop = model.propose(chain.x, rng);
  if (!prop) return false;

  const StateEval ev = model.evaluate(prop->state);
  if (map && ev.log_psi > map->log_psi) {
    map->state = prop->state;
    map->log_psi = ev.log_psi;
  }

  const double la = detail::mh_log_accept(
      chain.log_psi, ev.log_psi,
      theta[static_cast<std::size_t>(chain.region - 1)],
      theta[static_cast<std::size_t>(ev.region - 1)], prop->log_ratio);
  const bool accept = la >= 0.0 || rng.uniform() < std::exp(la);
  if (accept) {
    chain.x = std::move(prop->state);
    chain.log_psi = ev.log_psi;
    chain.lambda = ev.lambda;
    chain.region = ev.region;
  }
  return accept;
}

// kappa MH steps at frozen theta. Appends nothing; overwrites freq with the
// region counts of the kappa successive chain states and lambda_out with
// their lambda values.
template <TargetModel M>
void run_iteration(ChainState<typename M::State>& chain, const ThetaVector& theta,
                   const M& model, std::int64_t kappa, RngStream& rng,
                   std::vector<std::int64_t>& freq, std::vector<double>& lambda_out,
                   MapRecord<typename M::State>* map = nullptr) {
  std::fill(freq.begin(), freq.end(), std::int64_t{0});
  lambda_out.clear();
  for (std::int64_t l = 0; l < kappa; ++l) {
    mh_step(chain, theta, model, rng, map);
    ++freq[static_cast<std::size_t>(chain.region - 1)];
    lambda_out.push_back(chain.lambda);
  }
}

// Full run of any of the four algorithms. Deterministic: the result is a
// pure function of (model, cfg). Every MH step evaluates the target exactly
// once, so energy_evaluations is kappa * N for the adaptive algorithms and
// N for plain MH.
template <TargetModel M>
RunResult<typename M::State> run_sampler(const M& model, const SamplerConfig& cfg) {
  const std::size_t m = model.region_count();
  cfg.validate(m);

  RngStream rng(cfg.seed);
  RunResult<typename M::State> out{ThetaVector(m, 0.0), RegionStats(m), {}, 0, {}, {}};

  ChainState<typename M::State> chain;
  chain.x = model.initial_state(rng);
  {
    const StateEval ev = model.evaluate(chain.x);
    chain.log_psi = ev.log_psi;
    chain.lambda = ev.lambda;
    chain.region = ev.region;
  }
  MapRecord<typename M::State> map{chain.x, chain.log_psi};

  if (cfg.algorithm == Algorithm::plain_mh) {
    const ThetaVector theta(m, 0.0);
    for (std::int64_t t = 1; t <= cfg.iterations; ++t) {
      mh_step(chain, theta, model, rng, &map);
      out.stats.record(chain.region);
    }
    out.energy_evaluations = cfg.iterations;
    out.p_hat_estimate.resize(m);
    for (std::size_t i = 0; i < m; ++i)
      out.p_hat_estimate[i] = static_cast<double>(out.stats.visits[i]) /
                              static_cast<double>(cfg.iterations);
    out.map_record = std::move(map);
    return out;
  }

  ThetaVector theta(m, 0.0);
  std::vector<std::int64_t> freq(m, 0);
  std::vector<double> lambdas;
  lambdas.reserve(static_cast<std::size_t>(cfg.kappa));

  for (std::int64_t t = 1; t <= cfg.iterations; ++t) {
    // theta is frozen across the kappa steps of this iteration.
    run_iteration(chain, theta, model, cfg.kappa, rng, freq, lambdas, &map);
    for (std::size_t i = 0; i < m; ++i)
      if (freq[i] > 0) out.stats.record(static_cast<int>(i + 1), freq[i]);

    std::vector<double> p_hat;
    if (cfg.algorithm == Algorithm::ssamc) {
      const double h = bandwidth(cfg.gain.gain(t), lambdas, cfg.kappa);
      p_hat = smooth_frequencies(FrequencyVector(freq, cfg.kappa), m,
                                 model.lambda_scale(), h, cfg.kernel);
    } else {
      // Raw frequencies; with kappa = 1 this is the one-hot indicator.
      p_hat.resize(m);
      for (std::size_t i = 0; i < m; ++i)
        p_hat[i] = static_cast<double>(freq[i]) / static_cast<double>(cfg.kappa);
    }

    theta = recenter(update_theta(theta, cfg.gain.gain(t + 1), p_hat, cfg.pi));
    if (cfg.trace_stride > 0 && t % cfg.trace_stride == 0)
      out.theta_trace.emplace_back(t, theta);
  }

  out.final_theta = std::move(theta);
  out.energy_evaluations = cfg.kappa * cfg.iterations;
  out.p_hat_estimate = estimate_probabilities(out.final_theta, cfg.pi, out.stats);
  out.map_record = std::move(map);
  return out;
}

// Named entry points; each checks that cfg agrees with the algorithm.
template <TargetModel M>
RunResult<typename M::State> run_samc(const M& model, SamplerConfig cfg) {
  cfg.algorithm = Algorithm::samc;
  return run_sampler(model, cfg);
}

template <TargetModel M>
RunResult<typename M::State> run_msamc(const M& model, SamplerConfig cfg) {
  cfg.algorithm = Algorithm::msamc;
  return run_sampler(model, cfg);
}

template <TargetModel M>
RunResult<typename M::State> run_ssamc(const M& model, SamplerConfig cfg) {
  cfg.algorithm = Algorithm::ssamc;
  return run_sampler(model, cfg);
}

template <TargetModel M>
RunResult<typename M::State> run_plain_mh(const M& model, SamplerConfig cfg) {
  cfg.algorithm = Algorithm::plain_mh;
  return run_sampler(model, cfg);
}

}  // namespace samc
