#include "samc/theta.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace samc {

DesiredProbs::DesiredProbs(std::vector<double> values) : pi(std::move(values)) {
  if (pi.empty()) throw std::invalid_argument("DesiredProbs: empty vector");
  double sum = 0.0;
  for (double p : pi) {
    if (!(p > 0.0)) throw std::invalid_argument("DesiredProbs: entries must be > 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("DesiredProbs: entries must sum to 1, got " + std::to_string(sum));
}

DesiredProbs DesiredProbs::uniform(std::size_t m) {
  if (m == 0) throw std::invalid_argument("DesiredProbs::uniform: m must be >= 1");
  return DesiredProbs(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

void RegionStats::record(int region_1based, std::int64_t count) {
  if (region_1based < 1 || static_cast<std::size_t>(region_1based) > visits.size())
    throw std::out_of_range("RegionStats::record: region index out of range");
  visits[static_cast<std::size_t>(region_1based - 1)] += count;
}

std::vector<bool> RegionStats::visited_mask() const {
  std::vector<bool> mask(visits.size());
  for (std::size_t i = 0; i < visits.size(); ++i) mask[i] = visits[i] > 0;
  return mask;
}

std::size_t RegionStats::unvisited_count() const {
  std::size_t n = 0;
  for (std::int64_t v : visits) n += (v == 0);
  return n;
}

std::int64_t RegionStats::total() const {
  std::int64_t t = 0;
  for (std::int64_t v : visits) t += v;
  return t;
}

ThetaVector update_theta(const ThetaVector& theta, double gamma,
                         const std::vector<double>& p_hat,
                         const DesiredProbs& pi) {
  const std::size_t m = theta.size();
  if (p_hat.size() != m || pi.size() != m)
    throw std::invalid_argument("update_theta: dimension mismatch");
  ThetaVector out(m);
  for (std::size_t i = 0; i < m; ++i)
    out[i] = theta[i] + gamma * (p_hat[i] - pi.pi[i]);

  // Box check. A violation means theta has drifted ~1e100, which recentered
  // iterates never reach; shifting by -mean restores membership because the
  // update moves each entry by at most |gamma|.
  bool outside = false;
  for (double v : out)
    if (!(std::abs(v) <= kThetaBound)) { outside = true; break; }
  if (outside) {
    double mean = 0.0;
    for (double v : out) mean += v;
    mean /= static_cast<double>(m);
    for (double& v : out) v -= mean;
  }
  return out;
}

ThetaVector recenter(const ThetaVector& theta) {
  if (theta.empty()) return theta;
  double mean = 0.0;
  for (double v : theta) mean += v;
  mean /= static_cast<double>(theta.size());
  ThetaVector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out[i] = theta[i] - mean;
  return out;
}

std::vector<double> estimate_probabilities(const ThetaVector& theta,
                                           const DesiredProbs& pi,
                                           const RegionStats& stats) {
  const std::size_t m = theta.size();
  if (pi.size() != m || stats.visits.size() != m)
    throw std::invalid_argument("estimate_probabilities: dimension mismatch");

  const std::size_t m0 = stats.unvisited_count();
  if (m0 == m) throw std::runtime_error("estimate_probabilities: no region was ever visited");

  // Mass of the unvisited regions, spread evenly over the visited ones.
  double nu = 0.0;
  if (m0 > 0) {
    double missing = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (!stats.visited(i)) missing += pi.pi[i];
    nu = missing / static_cast<double>(m - m0);
  }

  // Normalize e^{theta_i} (pi_i + nu) over visited regions in the log domain.
  std::vector<double> log_w(m, -std::numeric_limits<double>::infinity());
  double log_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    if (!stats.visited(i)) continue;
    log_w[i] = theta[i] + std::log(pi.pi[i] + nu);
    if (log_w[i] > log_max) log_max = log_w[i];
  }
  double sum = 0.0;
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (stats.visited(i)) {
      out[i] = std::exp(log_w[i] - log_max);
      sum += out[i];
    }
  for (std::size_t i = 0; i < m; ++i) out[i] /= sum;
  return out;
}

}  // namespace samc
