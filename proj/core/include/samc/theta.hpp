#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace samc {

// Working log-weight vector. Entry i tracks log(omega_i / pi_i) up to one
// additive constant shared by all entries; only pairwise differences carry
// information, so iterates are recentered to zero mean after every update.
using ThetaVector = std::vector<double>;

// Hard box for theta entries. Recentering keeps iterates many orders of
// magnitude away from it; it exists so the update is provably bounded.
inline constexpr double kThetaBound = 1e100;

// Desired sampling proportions pi over the subregions. All entries strictly
// positive, summing to one.
struct DesiredProbs {
  std::vector<double> pi;

  explicit DesiredProbs(std::vector<double> values);
  static DesiredProbs uniform(std::size_t m);

  std::size_t size() const { return pi.size(); }
};

// Per-region visit counts accumulated over one run.
struct RegionStats {
  std::vector<std::int64_t> visits;

  explicit RegionStats(std::size_t m) : visits(m, 0) {}

  void record(int region_1based, std::int64_t count = 1);
  bool visited(std::size_t i) const { return visits[i] > 0; }
  std::vector<bool> visited_mask() const;
  std::size_t unvisited_count() const;
  std::int64_t total() const;
};

// One stochastic-approximation step: theta + gamma * (p_hat - pi). If the
// raw result leaves the [-kThetaBound, kThetaBound] box, the whole vector is
// shifted by a common constant that brings it back inside; pairwise
// differences are unaffected either way.
ThetaVector update_theta(const ThetaVector& theta, double gamma,
                         const std::vector<double>& p_hat,
                         const DesiredProbs& pi);

// Zero-mean representative of theta's shift class.
ThetaVector recenter(const ThetaVector& theta);

// Invert a converged theta into an estimate of the region probability
// vector. The pi-mass of never-visited regions is redistributed evenly onto
// the visited ones before weighting by e^theta; unvisited regions get
// exactly zero. Computed in the log domain with max subtraction, so any
// finite theta is safe.
std::vector<double> estimate_probabilities(const ThetaVector& theta,
                                           const DesiredProbs& pi,
                                           const RegionStats& stats);

}  // namespace samc
