#include "samc/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace samc {

std::uint64_t splitmix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t run_index) {
  // Golden-ratio stride, then the finalizer; the standard SplitMix64 stream
  // evaluated at position run_index + 1.
  return splitmix64(base_seed + 0x9E3779B97F4A7C15ULL * (run_index + 1));
}

double RngStream::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller. 1 - u1 is in (0, 1], so the log is finite.
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double a = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be >= 1");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t rem = max % n;
  if (rem == n - 1) return gen_() % n;  // n divides 2^64, no biased tail
  const std::uint64_t bound = max - rem;  // multiple of n
  std::uint64_t r = gen_();
  while (r >= bound) r = gen_();
  return r % n;
}

}  // namespace samc
