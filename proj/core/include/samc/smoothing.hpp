#pragma once

#include <cstdint>
#include <vector>

namespace samc {

// Double-truncated Gaussian kernel: exp(-z^2 / 2) for |z| < support_c and
// exactly zero outside. support_c = 3 keeps better than 99.7% of the mass.
struct KernelSpec {
  double support_c = 3.0;

  explicit KernelSpec(double c = 3.0);
  double weight(double z) const;
};

// Region-visit counts of the kappa chain samples of one iteration.
struct FrequencyVector {
  std::vector<std::int64_t> counts;
  std::int64_t kappa = 0;

  FrequencyVector(std::vector<std::int64_t> counts_in, std::int64_t kappa_in);
  static FrequencyVector zeros(std::size_t m, std::int64_t kappa);
};

// Data-driven bandwidth: the smaller of sqrt(gamma_t) and the normal
// reference rule range / (2 * (1 + log2(kappa))) computed on the iteration's
// kappa lambda values. A constant batch has range 0 and hence bandwidth 0.
double bandwidth(double gamma_t, const std::vector<double>& lambda_values,
                 std::int64_t kappa);

// Kernel-weighted moving average of the raw frequencies e / kappa along the
// region index axis, with indices rescaled by lambda_scale / m so the kernel
// argument is (lambda_scale / m) * (i - j) / h_t. Each output entry is a
// convex combination of raw entries; weights renormalize over the indices
// that exist, so edges are handled without padding. h_t <= 0 degenerates to
// the identity and returns e / kappa unchanged.
std::vector<double> smooth_frequencies(const FrequencyVector& freq,
                                       std::size_t m, double lambda_scale,
                                       double h_t, const KernelSpec& kernel);

}  // namespace samc
