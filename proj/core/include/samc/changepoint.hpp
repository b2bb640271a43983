#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "samc/engine.hpp"
#include "samc/rng.hpp"
#include "samc/theta.hpp"

namespace samc {

// Hyperparameters of the multiple change-point model: a Gamma(alpha, beta)
// prior on each block's precision, a flat prior on each block mean, a
// truncated Poisson(lambda_rate) prior on the number of change points, and a
// uniform prior on their placement. k is confined to [k_min, k_max].
struct Hyper {
  double alpha = 0.05;
  double beta = 0.05;
  double lambda_rate = 1.0;
  int k_min = 0;
  int k_max = 0;

  void validate(int n) const;
};

// A model: k change-point positions, strictly increasing, each in [1, n-1].
// Position c means the blocks split between z_c and z_{c+1}.
struct ChangePointModel {
  std::vector<int> positions;

  int k() const { return static_cast<int>(positions.size()); }
};

void validate_model(const ChangePointModel& model, int n);

// Observation series with cached prefix sums, so any block's sufficient
// statistics cost O(1).
class Dataset {
public:
  explicit Dataset(std::vector<double> z);

  int n() const { return static_cast<int>(z_.size()); }
  const std::vector<double>& values() const { return z_; }

  // Sum of z_{a+1} ... z_b (1-based, 0 <= a < b <= n).
  double block_sum(int a, int b) const { return pref_[b] - pref_[a]; }
  double block_sum_sq(int a, int b) const { return pref2_[b] - pref2_[a]; }

  // The fixed benchmark series: 1000 points in nine blocks of differing
  // means and variances, with the block layout reported by
  // default_true_positions(). Deterministic in the seed.
  static Dataset generate_default(std::uint64_t seed);
  static std::vector<int> default_true_positions();

  // Text round trip: '#' comment lines (the writer emits "# n=<n>
  // seed=<seed>"), then one value per line.
  static Dataset read(std::istream& in);
  void write(std::ostream& out, std::uint64_t seed) const;

private:
  std::vector<double> z_, pref_, pref2_;
};

// Log marginal posterior of a model given the data, with the block means and
// precisions integrated out in closed form. Defined up to one additive
// constant shared by all models on the same dataset.
double log_marginal_posterior(const ChangePointModel& model, const Dataset& data,
                              const Hyper& hyper);

// Log joint density of (model, block parameters, data): the full Gaussian
// log likelihood plus the log priors, before any integration. block_params
// holds one (mean, variance) pair per block. Shares its additive convention
// with log_marginal_posterior except for the -(n/2) log(2 pi) likelihood
// constant, which the marginal drops.
double log_joint_full(const ChangePointModel& model,
                      const std::vector<std::pair<double, double>>& block_params,
                      const Dataset& data, const Hyper& hyper);

enum class MoveKind { birth, death, simultaneous };

// Move-kind distribution at model size k: simultaneous always gets 1/3
// except at the k_min == k_max degenerate range, and the blocked direction's
// third is given to the opposite jump at the range boundaries.
MoveKind choose_move(int k, const Hyper& hyper, RngStream& rng);

// What the acceptance ratio needs to know about how a proposal was built:
// for a birth, the size of the open gap the new point was drawn from; for a
// death, the size of the merged gap a rebirth would draw from.
struct MoveMeta {
  MoveKind kind = MoveKind::simultaneous;
  int gap_width = 0;
};

// Draw a move of the given kind. nullopt when the move cannot be built (no
// room for a birth next to existing points, nothing to kill, no free slot
// for a jitter); the caller treats that as a rejected step.
std::optional<std::pair<ChangePointModel, MoveMeta>> propose_move(
    const ChangePointModel& current, MoveKind kind, int n, RngStream& rng);

// Full log acceptance ratio of a proposed move, including the biased
// reweighting: theta is indexed by k - k_min and may be empty for the
// unweighted sampler. Built so that the ratio of a move and the ratio of its
// exact reversal sum to zero bit for bit.
double accept_log_ratio(const MoveMeta& meta, const ChangePointModel& current,
                        const ChangePointModel& proposed, const ThetaVector& theta,
                        const Dataset& data, const Hyper& hyper);

// Exact posterior P(k | data) for k = 0 .. n-1 by brute-force enumeration of
// all 2^(n-1) models; requires n <= 16. Ignores the hyper k range.
std::vector<double> enumerate_exact_posterior(const Dataset& data, const Hyper& hyper);

// Engine adapter. lambda(x) is the model size k, regions are k - k_min + 1,
// and psi is the marginal posterior. Block-length tables make the hot path
// free of lgamma calls; its values agree bit for bit with
// log_marginal_posterior.
class ChangePointTarget {
public:
  using State = ChangePointModel;

  ChangePointTarget(Dataset data, Hyper hyper);

  const Dataset& data() const { return data_; }
  const Hyper& hyper() const { return hyper_; }

  std::size_t region_count() const {
    return static_cast<std::size_t>(hyper_.k_max - hyper_.k_min + 1);
  }
  double lambda_scale() const { return static_cast<double>(region_count()); }

  double log_psi(const State& s) const;
  double lambda_value(const State& s) const { return static_cast<double>(s.k()); }
  int region_index(const State& s) const { return s.k() - hyper_.k_min + 1; }
  StateEval evaluate(const State& s) const {
    return StateEval{log_psi(s), static_cast<double>(s.k()), region_index(s)};
  }

  // Start at the smallest admissible size with uniformly placed points.
  State initial_state(RngStream& rng) const;

  std::optional<Proposal<State>> propose(const State& s, RngStream& rng) const;

private:
  Dataset data_;
  Hyper hyper_;
  std::vector<double> lgamma_half_;   // lgamma((L-1)/2 + alpha), indexed by L
  std::vector<double> half_log_len_;  // 0.5 * log(L), indexed by L
  std::vector<double> a_term_;        // size-dependent constant, indexed by k - k_min
};

}  // namespace samc
