#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "samc/rng.hpp"
#include "samc/smoothing.hpp"

using namespace samc;

TEST_CASE("kernel: truncated Gaussian weights") {
  const KernelSpec k;
  CHECK(k.weight(0.0) == 1.0);
  CHECK(k.weight(1.0) == std::exp(-0.5));
  CHECK(k.weight(-1.0) == std::exp(-0.5));
  CHECK(k.weight(2.9) > 0.0);
  CHECK(k.weight(3.0) == 0.0);  // support is open: |z| < 3
  CHECK(k.weight(-3.0) == 0.0);
  CHECK(k.weight(100.0) == 0.0);
  CHECK_THROWS_AS(KernelSpec(0.0), std::invalid_argument);
}

TEST_CASE("frequency vector: counts must be a kappa-sample histogram") {
  CHECK_THROWS_AS(FrequencyVector({1, 2}, 4), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyVector({-1, 5}, 4), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyVector({0, 0}, 0), std::invalid_argument);
  const FrequencyVector ok({3, 1}, 4);
  CHECK(ok.counts[0] == 3);
}

TEST_CASE("bandwidth: minimum of the gain rule and the range rule") {
  // Wide spread: the sqrt(gain) term wins.
  std::vector<double> wide(20);
  for (std::size_t i = 0; i < 20; ++i) wide[i] = static_cast<double>(i) * 44.0 / 19.0;
  CHECK(bandwidth(0.01, wide, 20) == doctest::Approx(0.1).epsilon(1e-12));

  // Constant batch: range 0 forces bandwidth 0.
  CHECK(bandwidth(1.0, std::vector<double>(8, 3.25), 8) == 0.0);

  // Two points one apart, kappa = 2: range rule gives exactly 1/4.
  CHECK(bandwidth(1.0, {0.0, 1.0}, 2) == 0.25);

  // A single sample always has range 0.
  CHECK(bandwidth(1.0, {7.0}, 1) == 0.0);

  CHECK_THROWS_AS(bandwidth(1.0, {0.0, 1.0}, 3), std::invalid_argument);
  CHECK_THROWS_AS(bandwidth(0.0, {0.0, 1.0}, 2), std::invalid_argument);
}

TEST_CASE("smooth_frequencies: zero bandwidth is the exact identity") {
  const FrequencyVector freq({2, 0, 5, 3}, 10);
  const auto out = smooth_frequencies(freq, 4, 4.0, 0.0, KernelSpec{});
  CHECK(out[0] == 0.2);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 0.5);
  CHECK(out[3] == 0.3);
}

TEST_CASE("smooth_frequencies: one observation spread over three regions") {
  // Unit step between indices (scale/m = 1) and h = 1: weights 1, e^-1/2,
  // e^-2 at offsets 0, 1, 2.
  const FrequencyVector freq({1, 0, 0}, 1);
  const auto out = smooth_frequencies(freq, 3, 3.0, 1.0, KernelSpec{});
  const double w1 = std::exp(-0.5), w2 = std::exp(-2.0);
  CHECK(std::abs(out[0] - 1.0 / (1.0 + w1 + w2)) < 1e-15);
  CHECK(std::abs(out[1] - w1 / (w1 + 1.0 + w1)) < 1e-15);
  CHECK(std::abs(out[2] - w2 / (w2 + w1 + 1.0)) < 1e-15);
}

TEST_CASE("smooth_frequencies: uniform histogram stays uniform") {
  const FrequencyVector freq({5, 5, 5, 5, 5}, 25);
  const auto out = smooth_frequencies(freq, 5, 5.0, 0.8, KernelSpec{});
  for (double v : out) CHECK(std::abs(v - 0.2) < 1e-14);
}

namespace {

FrequencyVector random_histogram(RngStream& rng, std::size_t m, std::int64_t kappa) {
  std::vector<std::int64_t> counts(m, 0);
  for (std::int64_t i = 0; i < kappa; ++i) ++counts[rng.uniform_below(m)];
  return FrequencyVector(std::move(counts), kappa);
}

}  // namespace

TEST_CASE("smooth_frequencies: convexity, deviation bound, locality, reversal") {
  RngStream rng(21);
  const KernelSpec kernel;
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t m = 2 + rng.uniform_below(59);
    const std::int64_t kappa = 1 + static_cast<std::int64_t>(rng.uniform_below(50));
    const double lambda_scale = (0.5 + 2.5 * rng.uniform()) * static_cast<double>(m);
    const double h = (rep % 7 == 0) ? 0.0 : 1.5 * rng.uniform();
    const FrequencyVector freq = random_histogram(rng, m, kappa);

    std::vector<double> raw(m);
    for (std::size_t j = 0; j < m; ++j)
      raw[j] = static_cast<double>(freq.counts[j]) / static_cast<double>(kappa);
    const double rmin = *std::min_element(raw.begin(), raw.end());
    const double rmax = *std::max_element(raw.begin(), raw.end());

    const auto out = smooth_frequencies(freq, m, lambda_scale, h, kernel);

    // Convex combination of the raw ratios, entry by entry.
    const double bound =
        std::min(1.0, 2.0 * kernel.support_c * static_cast<double>(m) * h / lambda_scale);
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(out[i] >= rmin - 1e-12);
      CHECK(out[i] <= rmax + 1e-12);
      CHECK(std::abs(out[i] - raw[i]) <= bound + 1e-12);
    }

    // Reversal symmetry, bit for bit.
    std::vector<std::int64_t> rev_counts(freq.counts.rbegin(), freq.counts.rend());
    const auto rev_out =
        smooth_frequencies(FrequencyVector(rev_counts, kappa), m, lambda_scale, h, kernel);
    for (std::size_t i = 0; i < m; ++i) CHECK(out[i] == rev_out[m - 1 - i]);

    // Locality: shuffling mass among regions outside the kernel support of
    // index i cannot change entry i at all.
    if (h > 0.0) {
      const double step = lambda_scale / (static_cast<double>(m) * h);
      // One past the support edge, so boundary rounding cannot bite.
      const auto radius = static_cast<std::size_t>(std::ceil(kernel.support_c / step)) + 1;
      const std::size_t i = rng.uniform_below(m);
      std::vector<std::size_t> outside;
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t d = j > i ? j - i : i - j;
        if (d >= radius) outside.push_back(j);
      }
      std::size_t donor = m;
      for (std::size_t j : outside)
        if (freq.counts[j] > 0) {
          donor = j;
          break;
        }
      if (donor < m && outside.size() >= 2) {
        std::vector<std::int64_t> moved = freq.counts;
        const std::size_t sink = outside[donor == outside[0] ? 1 : 0];
        --moved[donor];
        ++moved[sink];
        const auto out2 =
            smooth_frequencies(FrequencyVector(moved, kappa), m, lambda_scale, h, kernel);
        CHECK(out2[i] == out[i]);
      }
    }
  }
}
