#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>

namespace samc {

// Gain factor sequence gamma_t = t0 / max(t0, t): equal to 1 through
// iteration t0, then decaying like t0 / t. Positive and nonincreasing by
// construction; this family satisfies the usual step-size summability
// conditions, so nothing is checked at run time beyond the parameters.
struct GainSchedule {
  std::int64_t t0 = 1;

  explicit GainSchedule(std::int64_t t0_in) : t0(t0_in) {
    if (t0 < 1) throw std::invalid_argument("GainSchedule: t0 must be >= 1");
  }

  double gain(std::int64_t t) const {
    if (t < 1) throw std::invalid_argument("GainSchedule: t must be >= 1");
    return static_cast<double>(t0) / static_cast<double>(std::max(t0, t));
  }
};

}  // namespace samc
