#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "samc/engine.hpp"
#include "samc/rng.hpp"

namespace samc {

// Finite chain of integer states with tabulated log weights, partitioned
// into contiguous equal-width regions. Everything about it is computable in
// closed form by direct summation, which makes it the reference problem for
// engine tests, the theory checks, and the toy-check experiment. lambda(x)
// is the region label itself, so lambda_scale = m.
class DiscreteGridTarget {
public:
  using State = int;

  DiscreteGridTarget(std::vector<double> log_weights, std::size_t states_per_region,
                     int max_step = 1)
      : log_weights_(std::move(log_weights)), block_(states_per_region),
        max_step_(max_step) {
    if (block_ == 0 || log_weights_.empty() || log_weights_.size() % block_ != 0)
      throw std::invalid_argument("DiscreteGridTarget: state count must be a positive multiple of the region width");
    if (max_step_ < 1)
      throw std::invalid_argument("DiscreteGridTarget: max_step must be >= 1");
    m_ = log_weights_.size() / block_;
  }

  // The standard instance: n states on a quadratic log-weight ridge centered
  // off the middle, so region weights span several orders of magnitude.
  static DiscreteGridTarget quadratic(std::size_t n_states, std::size_t n_regions,
                                      double center, double width, int max_step = 1) {
    if (n_regions == 0 || n_states % n_regions != 0)
      throw std::invalid_argument("DiscreteGridTarget: n_regions must divide n_states");
    std::vector<double> lw(n_states);
    for (std::size_t x = 0; x < n_states; ++x) {
      const double d = static_cast<double>(x) - center;
      lw[x] = -d * d / width;
    }
    return DiscreteGridTarget(std::move(lw), n_states / n_regions, max_step);
  }

  std::size_t state_count() const { return log_weights_.size(); }
  std::size_t region_count() const { return m_; }
  double lambda_scale() const { return static_cast<double>(m_); }

  double log_psi(State x) const { return log_weights_[check(x)]; }
  double lambda_value(State x) const { return static_cast<double>(region_index(x)); }
  int region_index(State x) const { return static_cast<int>(check(x) / block_) + 1; }

  StateEval evaluate(State x) const {
    const std::size_t i = check(x);
    const int region = static_cast<int>(i / block_) + 1;
    return StateEval{log_weights_[i], static_cast<double>(region), region};
  }

  State initial_state(RngStream& rng) const {
    return static_cast<State>(rng.uniform_below(log_weights_.size()));
  }

  // Symmetric random walk with jumps up to max_step sites; stepping off
  // either end is a failed proposal. max_step = 1 draws a single uniform for
  // the sign, wider walks draw the magnitude separately.
  std::optional<Proposal<State>> propose(State x, RngStream& rng) const {
    const int sign = rng.uniform() < 0.5 ? -1 : 1;
    const int mag = max_step_ == 1
                        ? 1
                        : 1 + static_cast<int>(rng.uniform_below(
                                  static_cast<std::uint64_t>(max_step_)));
    const State y = x + sign * mag;
    if (y < 0 || static_cast<std::size_t>(y) >= log_weights_.size()) return std::nullopt;
    return Proposal<State>{y, 0.0};
  }

  // Exact region weights by direct summation over the finite state space.
  std::vector<double> exact_omega() const {
    std::vector<double> w(m_, 0.0);
    for (std::size_t x = 0; x < log_weights_.size(); ++x)
      w[x / block_] += std::exp(log_weights_[x]);
    return w;
  }

  // exact_omega normalized to a probability vector.
  std::vector<double> exact_region_probs() const {
    std::vector<double> w = exact_omega();
    double sum = 0.0;
    for (double v : w) sum += v;
    for (double& v : w) v /= sum;
    return w;
  }

private:
  std::size_t check(State x) const {
    if (x < 0 || static_cast<std::size_t>(x) >= log_weights_.size())
      throw std::out_of_range("DiscreteGridTarget: state outside the grid");
    return static_cast<std::size_t>(x);
  }

  std::vector<double> log_weights_;
  std::size_t block_;
  int max_step_;
  std::size_t m_;
};

// The fixed instance the toy-check experiment and the convergence tests use.
// Jumps span a quarter of the lattice so the walk relaxes in tens of steps;
// with a +-1 walk the region-occupancy autocorrelation time is in the
// thousands and theta keeps a random-walk residual at any practical budget.
inline DiscreteGridTarget standard_toy_target() {
  return DiscreteGridTarget::quadratic(100, 10, 30.0, 450.0, 25);
}

}  // namespace samc
