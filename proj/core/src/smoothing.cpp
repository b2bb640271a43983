#include "samc/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace samc {

KernelSpec::KernelSpec(double c) : support_c(c) {
  if (!(c > 0.0)) throw std::invalid_argument("KernelSpec: support must be > 0");
}

double KernelSpec::weight(double z) const {
  if (!(std::abs(z) < support_c)) return 0.0;
  return std::exp(-0.5 * z * z);
}

FrequencyVector::FrequencyVector(std::vector<std::int64_t> counts_in, std::int64_t kappa_in)
    : counts(std::move(counts_in)), kappa(kappa_in) {
  if (counts.empty()) throw std::invalid_argument("FrequencyVector: empty counts");
  if (kappa < 1) throw std::invalid_argument("FrequencyVector: kappa must be >= 1");
  std::int64_t sum = 0;
  for (std::int64_t c : counts) {
    if (c < 0) throw std::invalid_argument("FrequencyVector: negative count");
    sum += c;
  }
  if (sum != kappa) throw std::invalid_argument("FrequencyVector: counts must sum to kappa");
}

FrequencyVector FrequencyVector::zeros(std::size_t m, std::int64_t kappa) {
  std::vector<std::int64_t> c(m, 0);
  c[0] = kappa;  // placeholder mass so the invariant holds; callers overwrite
  return FrequencyVector(std::move(c), kappa);
}

double bandwidth(double gamma_t, const std::vector<double>& lambda_values,
                 std::int64_t kappa) {
  if (kappa < 1) throw std::invalid_argument("bandwidth: kappa must be >= 1");
  if (lambda_values.size() != static_cast<std::size_t>(kappa))
    throw std::invalid_argument("bandwidth: need exactly kappa lambda values");
  if (!(gamma_t > 0.0)) throw std::invalid_argument("bandwidth: gamma_t must be > 0");
  const auto [lo, hi] = std::minmax_element(lambda_values.begin(), lambda_values.end());
  const double range = *hi - *lo;
  const double reference = range / (2.0 * (1.0 + std::log2(static_cast<double>(kappa))));
  return std::min(std::sqrt(gamma_t), reference);
}

std::vector<double> smooth_frequencies(const FrequencyVector& freq,
                                       std::size_t m, double lambda_scale,
                                       double h_t, const KernelSpec& kernel) {
  if (freq.counts.size() != m) throw std::invalid_argument("smooth_frequencies: size mismatch");
  if (!(lambda_scale > 0.0)) throw std::invalid_argument("smooth_frequencies: lambda_scale must be > 0");

  std::vector<double> ratio(m);
  for (std::size_t j = 0; j < m; ++j)
    ratio[j] = static_cast<double>(freq.counts[j]) / static_cast<double>(freq.kappa);
  if (!(h_t > 0.0)) return ratio;  // degenerate bandwidth: identity smoother

  // Kernel argument per unit index offset. Offsets d with d * step >= C get
  // weight zero, so the inner loop is short once the bandwidth shrinks.
  const double step = lambda_scale / (static_cast<double>(m) * h_t);

  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    // Accumulate symmetric offset pairs at equal weight. Adding the pair as
    // one commutative sum makes the result exactly invariant under index
    // reversal, which the tests assert bit for bit.
    double num = ratio[i];  // d = 0, weight 1
    double den = 1.0;
    for (std::size_t d = 1; d < m; ++d) {
      const double w = kernel.weight(static_cast<double>(d) * step);
      if (w == 0.0) break;
      const bool left = d <= i;
      const bool right = i + d < m;
      if (left && right) {
        num += w * (ratio[i - d] + ratio[i + d]);
        den += 2.0 * w;
      } else if (left) {
        num += w * ratio[i - d];
        den += w;
      } else if (right) {
        num += w * ratio[i + d];
        den += w;
      } else {
        break;  // both sides exhausted
      }
    }
    out[i] = num / den;
  }
  return out;
}

}  // namespace samc
