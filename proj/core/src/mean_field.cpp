#include "samc/mean_field.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace samc {

namespace {

// Softmax of log(omega_i) - theta_i: the stationary visiting law s.
std::vector<double> visiting_law(const std::vector<double>& omega,
                                 const ThetaVector& theta) {
  const std::size_t m = omega.size();
  if (theta.size() != m) throw std::invalid_argument("mean_field: dimension mismatch");
  std::vector<double> a(m);
  double amax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    if (!(omega[i] > 0.0)) throw std::invalid_argument("mean_field: omega entries must be > 0");
    a[i] = std::log(omega[i]) - theta[i];
    if (a[i] > amax) amax = a[i];
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    a[i] = std::exp(a[i] - amax);
    sum += a[i];
  }
  for (double& v : a) v /= sum;
  return a;
}

}  // namespace

std::vector<double> mean_field_h(const std::vector<double>& omega,
                                 const ThetaVector& theta,
                                 const DesiredProbs& pi) {
  if (pi.size() != omega.size()) throw std::invalid_argument("mean_field: dimension mismatch");
  std::vector<double> s = visiting_law(omega, theta);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] -= pi.pi[i];
  return s;
}

LyapunovCheck lyapunov_check(const std::vector<double>& omega,
                             const ThetaVector& theta,
                             const DesiredProbs& pi) {
  if (pi.size() != omega.size()) throw std::invalid_argument("mean_field: dimension mismatch");
  const std::vector<double> s = visiting_law(omega, theta);
  const std::size_t m = s.size();

  std::vector<double> h(m);
  for (std::size_t i = 0; i < m; ++i) h[i] = s[i] - pi.pi[i];

  LyapunovCheck out;
  for (double hi : h) out.v += 0.5 * hi * hi;

  // d s_k / d theta_i = s_k s_i - delta_ki s_k, so the gradient contracts to
  // s_i * mu - h_i * s_i with mu = sum_k h_k s_k.
  double mu = 0.0;
  for (std::size_t k = 0; k < m; ++k) mu += h[k] * s[k];
  out.grad_v.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.grad_v[i] = s[i] * mu - h[i] * s[i];

  // Literal directional derivative along the drift. Algebraically this is
  // mu^2 - sum_i h_i^2 s_i, minus the variance of h under s.
  out.v_dot = 0.0;
  for (std::size_t i = 0; i < m; ++i) out.v_dot += out.grad_v[i] * h[i];
  return out;
}

}  // namespace samc
