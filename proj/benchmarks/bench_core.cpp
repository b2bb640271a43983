// Microbenchmarks for the hot paths: target evaluations, one reweighted MH
// step, the frequency smoother, and a short end-to-end adaptive run.

#include <benchmark/benchmark.h>

#include <vector>

#include "samc/changepoint.hpp"
#include "samc/engine.hpp"
#include "samc/mixture.hpp"
#include "samc/smoothing.hpp"
#include "samc/toy.hpp"

using namespace samc;

static void BM_mixture_log_density(benchmark::State& state) {
  const MixtureTarget model;
  RngStream rng(1);
  MixtureTarget::State x{rng.normal(), rng.normal()};
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.log_psi(x));
    x[0] += 1e-9;  // defeat value caching without leaving the support
  }
}
BENCHMARK(BM_mixture_log_density);

static void BM_mixture_mh_step(benchmark::State& state) {
  const MixtureTarget model;
  RngStream rng(2);
  ThetaVector theta(model.region_count(), 0.0);
  ChainState<MixtureTarget::State> chain;
  chain.x = model.initial_state(rng);
  const StateEval ev = model.evaluate(chain.x);
  chain.log_psi = ev.log_psi;
  chain.lambda = ev.lambda;
  chain.region = ev.region;
  for (auto _ : state) benchmark::DoNotOptimize(mh_step(chain, theta, model, rng));
}
BENCHMARK(BM_mixture_mh_step);

static void BM_changepoint_evaluate(benchmark::State& state) {
  const Dataset data = Dataset::generate_default(7);
  const Hyper hyper{0.05, 0.05, 1.0, 7, 14};
  const ChangePointTarget model(data, hyper);
  const ChangePointModel x{Dataset::default_true_positions()};
  for (auto _ : state) benchmark::DoNotOptimize(model.evaluate(x));
}
BENCHMARK(BM_changepoint_evaluate);

static void BM_changepoint_mh_step(benchmark::State& state) {
  const Dataset data = Dataset::generate_default(7);
  const Hyper hyper{0.05, 0.05, 1.0, 0, 30};
  const ChangePointTarget model(data, hyper);
  RngStream rng(3);
  ThetaVector theta(model.region_count(), 0.0);
  ChainState<ChangePointModel> chain;
  chain.x = model.initial_state(rng);
  const StateEval ev = model.evaluate(chain.x);
  chain.log_psi = ev.log_psi;
  chain.lambda = ev.lambda;
  chain.region = ev.region;
  for (auto _ : state) benchmark::DoNotOptimize(mh_step(chain, theta, model, rng));
}
BENCHMARK(BM_changepoint_mh_step);

static void BM_smoothing_pass(benchmark::State& state) {
  const std::size_t m = 45;
  const std::int64_t kappa = 20;
  RngStream rng(4);
  std::vector<std::int64_t> freq(m, 0);
  for (std::int64_t s = 0; s < kappa; ++s) ++freq[rng.uniform_below(m)];
  const FrequencyVector fv(freq, kappa);
  const KernelSpec kernel{};
  for (auto _ : state)
    benchmark::DoNotOptimize(smooth_frequencies(fv, m, 22.0, 0.05, kernel));
}
BENCHMARK(BM_smoothing_pass);

static void BM_toy_ssamc_run(benchmark::State& state) {
  const DiscreteGridTarget model = standard_toy_target();
  SamplerConfig cfg{Algorithm::ssamc,
                    10,
                    state.range(0),
                    GainSchedule{50},
                    DesiredProbs::uniform(model.region_count()),
                    KernelSpec{},
                    5,
                    0};
  for (auto _ : state) benchmark::DoNotOptimize(run_ssamc(model, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.iterations * cfg.kappa);
}
BENCHMARK(BM_toy_ssamc_run)->Arg(2000);

BENCHMARK_MAIN();
