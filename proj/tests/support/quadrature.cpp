#include "support/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Running log-sum-exp accumulator.
struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;

  void add(double v) {
    if (v == -std::numeric_limits<double>::infinity()) return;
    if (v <= max) {
      sum += std::exp(v - max);
    } else {
      sum = sum * std::exp(max - v) + 1.0;
      max = v;
    }
  }
  double value() const { return sum == 0.0 ? -std::numeric_limits<double>::infinity()
                                           : max + std::log(sum); }
};

// Log joint of one block at (mu, tau), summing the squared residuals
// directly over the block's observations.
double log_block_joint(const std::vector<double>& z, double alpha, double beta,
                       double mu, double tau) {
  const auto len = static_cast<double>(z.size());
  double ss = 0.0;
  for (double v : z) ss += (v - mu) * (v - mu);
  const double loglik = 0.5 * len * (std::log(tau) - kLog2Pi) - 0.5 * tau * ss;
  const double logprior = alpha * std::log(beta) - std::lgamma(alpha) +
                          (alpha - 1.0) * std::log(tau) - beta * tau;
  return loglik + logprior;
}

// One Simpson pass with nodes + 1 points per axis (nodes even). tau = e^s on
// [s_lo, s_hi]; mu = z_bar + sinh(w) / sqrt(tau L) on w in [-6, 6], which
// tracks the mean's conditional scale at every tau. Log-domain throughout.
double simpson_pass(const std::vector<double>& z, double alpha, double beta,
                    double z_bar, double s_lo, double s_hi, int nodes) {
  const double hs = (s_hi - s_lo) / nodes;
  const double w_lo = -6.0, w_hi = 6.0;
  const double hw = (w_hi - w_lo) / nodes;
  const auto len = static_cast<double>(z.size());

  const auto simpson_log_coeff = [nodes](int i) {
    if (i == 0 || i == nodes) return 0.0;          // log 1
    return (i % 2 == 1) ? std::log(4.0) : std::log(2.0);
  };

  LogSum total;
  for (int is = 0; is <= nodes; ++is) {
    const double s = s_lo + hs * is;
    const double tau = std::exp(s);
    const double root = std::sqrt(tau * len);
    const double lcs = simpson_log_coeff(is);
    for (int iw = 0; iw <= nodes; ++iw) {
      const double w = w_lo + hw * iw;
      const double mu = z_bar + std::sinh(w) / root;
      // Change of variables: d tau d mu = tau * cosh(w) / sqrt(tau L) ds dw.
      const double log_jac = s + std::log(std::cosh(w) / root);
      total.add(log_block_joint(z, alpha, beta, mu, tau) + log_jac + lcs +
                simpson_log_coeff(iw));
    }
  }
  return total.value() + std::log(hs * hw / 9.0);
}

}  // namespace

double log_block_integral(const std::vector<double>& z, double alpha, double beta) {
  if (z.empty()) throw std::invalid_argument("log_block_integral: empty block");
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("log_block_integral: need alpha, beta > 0");

  const auto len = static_cast<double>(z.size());
  double z_bar = 0.0;
  for (double v : z) z_bar += v;
  z_bar /= len;
  double sse = 0.0;
  for (double v : z) sse += (v - z_bar) * (v - z_bar);

  // The tau profile behaves like a Gamma((L-1)/2 + alpha, beta + sse/2)
  // density: center the log grid near its bulk and stretch the lower end far
  // enough that the truncated tail is ~ e^-45 of the mass.
  const double shape = 0.5 * (len - 1.0) + alpha;
  const double rate = beta + 0.5 * sse;
  const double s_star = std::log(shape / rate);
  const double s_lo = s_star - 45.0 / shape;
  const double s_hi = s_star + 10.0;

  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int nodes = 128; nodes <= 4096; nodes *= 2) {
    const double cur = simpson_pass(z, alpha, beta, z_bar, s_lo, s_hi, nodes);
    if (!std::isnan(prev) && std::abs(cur - prev) < 1e-7) return cur;
    prev = cur;
  }
  return prev;  // converged visually by 4096 nodes in every observed case
}

double log_marginal_by_integration(const samc::ChangePointModel& model,
                                   const samc::Dataset& data,
                                   const samc::Hyper& hyper) {
  const int n = data.n();
  samc::validate_model(model, n);
  const int k = model.k();
  const auto& z = data.values();

  double total = k * std::log(hyper.lambda_rate) +
                 std::lgamma(static_cast<double>(n - k));
  int prev = 0;
  for (int i = 0; i <= k; ++i) {
    const int end = (i < k) ? model.positions[static_cast<std::size_t>(i)] : n;
    const std::vector<double> block(z.begin() + prev, z.begin() + end);
    total += log_block_integral(block, hyper.alpha, hyper.beta);
    prev = end;
  }
  // The closed form drops the flat -(n/2) log(2 pi) likelihood constant.
  return total + 0.5 * n * kLog2Pi;
}

}  // namespace oracle
