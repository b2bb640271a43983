#pragma once

#include <vector>

#include "samc/theta.hpp"

namespace samc {

// Mean drift of the theta update under the stationary law of the reweighted
// target: component i equals S_i / S - pi_i, where S_i = omega_i e^{-theta_i}
// and S is their sum. Computed as a softmax of log(omega_i) - theta_i, so
// large weight ratios are safe. Entries sum to zero; the drift vanishes
// exactly at theta_i = const + log(omega_i / pi_i).
std::vector<double> mean_field_h(const std::vector<double>& omega,
                                 const ThetaVector& theta,
                                 const DesiredProbs& pi);

// Lyapunov diagnostics for the drift field at a given theta.
//
//   v      = 0.5 * sum_i (S_i/S - pi_i)^2
//   grad_v = gradient of v in theta (closed form)
//   v_dot  = grad_v . h(theta), which collapses algebraically to minus the
//            variance of a discrete random variable, hence is never positive
struct LyapunovCheck {
  double v = 0.0;
  std::vector<double> grad_v;
  double v_dot = 0.0;
};

LyapunovCheck lyapunov_check(const std::vector<double>& omega,
                             const ThetaVector& theta,
                             const DesiredProbs& pi);

}  // namespace samc
