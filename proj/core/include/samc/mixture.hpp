#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "samc/engine.hpp"
#include "samc/partition.hpp"
#include "samc/rng.hpp"

namespace samc {

// Two-dimensional target made of three equal-weight Gaussian components:
// means (-8,-8), (6,6), (0,0); the first two strongly correlated (rho = 0.9
// and -0.9), the third spherical. The modes sit far apart relative to the
// unit proposal scale, which is what makes plain random-walk MH mix poorly
// here. The energy lambda(x) = -log f(x) is partitioned into 45 cells of
// width 0.5 between 0.5 and 22, with both tails absorbed into the terminal
// cells; cells below the minimum attainable energy (about 2.1) stay empty.
class MixtureTarget {
public:
  using State = std::array<double, 2>;

  MixtureTarget();

  double log_density(const State& x) const;

  std::size_t region_count() const { return partition_.region_count(); }
  double lambda_scale() const { return partition_.lambda_scale(); }
  const PartitionSpec& partition() const { return partition_; }

  double log_psi(const State& x) const { return log_density(x); }
  double lambda_value(const State& x) const { return -log_density(x); }
  int region_index(const State& x) const {
    return partition_.region_for_lambda(lambda_value(x));
  }
  StateEval evaluate(const State& x) const {
    const double lp = log_density(x);
    return StateEval{lp, -lp, partition_.region_for_lambda(-lp)};
  }

  // Chain start: one standard normal draw around the origin.
  State initial_state(RngStream& rng) const {
    return State{rng.normal(), rng.normal()};
  }

  // Random walk with identity covariance; symmetric, so log_ratio = 0.
  std::optional<Proposal<State>> propose(const State& x, RngStream& rng) const {
    return Proposal<State>{State{x[0] + rng.normal(), x[1] + rng.normal()}, 0.0};
  }

  // Exact draw from the mixture (component choice + Cholesky transform).
  State sample(RngStream& rng) const;
  State sample_component(int component, RngStream& rng) const;

  // Monte Carlo reference for the region probabilities: n_samples exact
  // draws classified by region. Work is split into fixed-size shards with
  // seeds derived from (seed, shard index), so the result is independent of
  // how shards are scheduled.
  std::vector<double> true_region_probs(std::int64_t n_samples, std::uint64_t seed) const;

private:
  struct Component {
    double mx, my;       // mean
    double rho;          // correlation
    double inv_det;      // 1 / (1 - rho^2)
    double log_norm;     // -log(2 pi) - 0.5 log(1 - rho^2)
    double chol_yy;      // sqrt(1 - rho^2)
  };

  std::array<Component, 3> comps_;
  PartitionSpec partition_;
};

// Root mean squared error of each run's estimate vector against the truth,
// averaged over runs per index: rmse_i = sqrt(mean_r (est_ri - truth_i)^2).
std::vector<double> rmse(const std::vector<std::vector<double>>& per_run_estimates,
                         const std::vector<double>& truth);

}  // namespace samc
