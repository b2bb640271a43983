#pragma once

#include <cstdint>
#include <random>

namespace samc {

// SplitMix64 finalizer. Used to turn (base seed, run index) pairs into
// well-separated generator seeds.
std::uint64_t splitmix64(std::uint64_t z);

// Seed for run `run_index` of an experiment with the given base seed.
// Distinct run indices give unrelated seeds even for adjacent base seeds.
std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t run_index);

// Deterministic random stream owned by a single run.
//
// The engine is std::mt19937_64, which the C++ standard pins down bit for
// bit. The distributions are implemented here rather than taken from
// <random> because the standard leaves distribution algorithms unspecified;
// with these, identical seeds give identical streams on every platform:
//
//   uniform():       top 53 bits of one draw, scaled to [0, 1)
//   normal():        Box-Muller on two uniforms; the second value is cached
//   uniform_below(): one draw reduced modulo n, resampling the biased tail
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  static RngStream for_run(std::uint64_t base_seed, std::uint64_t run_index) {
    return RngStream(run_seed(base_seed, run_index));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1).
  double uniform();

  // Standard normal.
  double normal();

  // Uniform on {0, 1, ..., n - 1}; n must be >= 1.
  std::uint64_t uniform_below(std::uint64_t n);

private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace samc
