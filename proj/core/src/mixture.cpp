#include "samc/mixture.hpp"

#include <cmath>
#include <stdexcept>

namespace samc {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

// Energy cells of width 0.5 on [0.5, 22): cuts 0.5, 1.0, ..., 22.0 give 45
// regions with both tails clamped.
PartitionSpec mixture_partition() {
  std::vector<double> cuts;
  for (int i = 1; i <= 44; ++i) cuts.push_back(0.5 * i);
  return PartitionSpec::energy_grid(std::move(cuts), 22.0);
}

}  // namespace

MixtureTarget::MixtureTarget() : partition_(mixture_partition()) {
  const double means[3][2] = {{-8.0, -8.0}, {6.0, 6.0}, {0.0, 0.0}};
  const double rhos[3] = {0.9, -0.9, 0.0};
  for (int c = 0; c < 3; ++c) {
    Component& k = comps_[c];
    k.mx = means[c][0];
    k.my = means[c][1];
    k.rho = rhos[c];
    const double det = 1.0 - k.rho * k.rho;
    k.inv_det = 1.0 / det;
    k.log_norm = -kLog2Pi - 0.5 * std::log(det);
    k.chol_yy = std::sqrt(det);
  }
}

double MixtureTarget::log_density(const State& x) const {
  // log of the average of the three component densities, via max-subtracted
  // log-sum-exp. The quadratic form groups dx^2 + dy^2 and dx*dy, which
  // keeps the value exactly symmetric under swapping the coordinates (all
  // three means lie on the diagonal, so a swap exchanges dx and dy).
  double lp[3];
  double lmax = -1.0 / 0.0;
  for (int c = 0; c < 3; ++c) {
    const Component& k = comps_[c];
    const double dx = x[0] - k.mx;
    const double dy = x[1] - k.my;
    const double q = ((dx * dx + dy * dy) - 2.0 * k.rho * (dx * dy)) * k.inv_det;
    lp[c] = k.log_norm - 0.5 * q;
    if (lp[c] > lmax) lmax = lp[c];
  }
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) sum += std::exp(lp[c] - lmax);
  return lmax + std::log(sum / 3.0);
}

MixtureTarget::State MixtureTarget::sample_component(int component, RngStream& rng) const {
  if (component < 0 || component > 2)
    throw std::invalid_argument("sample_component: component must be 0, 1 or 2");
  const Component& k = comps_[component];
  const double z1 = rng.normal();
  const double z2 = rng.normal();
  // Cholesky factor of [[1, rho], [rho, 1]] is [[1, 0], [rho, sqrt(1-rho^2)]].
  return State{k.mx + z1, k.my + k.rho * z1 + k.chol_yy * z2};
}

MixtureTarget::State MixtureTarget::sample(RngStream& rng) const {
  return sample_component(static_cast<int>(rng.uniform_below(3)), rng);
}

std::vector<double> MixtureTarget::true_region_probs(std::int64_t n_samples,
                                                     std::uint64_t seed) const {
  if (n_samples < 1) throw std::invalid_argument("true_region_probs: n_samples must be >= 1");
  const std::size_t m = region_count();
  std::vector<std::int64_t> counts(m, 0);

  constexpr std::int64_t kShard = 1'000'000;
  const std::int64_t shards = (n_samples + kShard - 1) / kShard;
  for (std::int64_t s = 0; s < shards; ++s) {
    RngStream rng = RngStream::for_run(seed, static_cast<std::uint64_t>(s));
    const std::int64_t lo = s * kShard;
    const std::int64_t hi = std::min(n_samples, lo + kShard);
    for (std::int64_t i = lo; i < hi; ++i) {
      const State x = sample(rng);
      ++counts[static_cast<std::size_t>(region_index(x) - 1)];
    }
  }

  std::vector<double> probs(m);
  for (std::size_t i = 0; i < m; ++i)
    probs[i] = static_cast<double>(counts[i]) / static_cast<double>(n_samples);
  return probs;
}

std::vector<double> rmse(const std::vector<std::vector<double>>& per_run_estimates,
                         const std::vector<double>& truth) {
  if (per_run_estimates.empty()) throw std::invalid_argument("rmse: need at least one run");
  const std::size_t m = truth.size();
  for (const auto& est : per_run_estimates)
    if (est.size() != m) throw std::invalid_argument("rmse: estimate size mismatch");
  std::vector<double> out(m, 0.0);
  for (const auto& est : per_run_estimates)
    for (std::size_t i = 0; i < m; ++i) {
      const double d = est[i] - truth[i];
      out[i] += d * d;
    }
  for (double& v : out)
    v = std::sqrt(v / static_cast<double>(per_run_estimates.size()));
  return out;
}

}  // namespace samc
