#include "samc/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace samc {

PartitionSpec PartitionSpec::energy_grid(std::vector<double> cuts, double lambda_scale) {
  if (cuts.empty()) throw std::invalid_argument("energy_grid: need at least one cut");
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (!(cuts[i - 1] < cuts[i]))
      throw std::invalid_argument("energy_grid: cuts must be strictly increasing");
  if (!(lambda_scale > 0.0)) throw std::invalid_argument("energy_grid: lambda_scale must be > 0");
  PartitionSpec p;
  p.grid_ = true;
  p.m_ = cuts.size() + 1;
  p.cuts_ = std::move(cuts);
  p.scale_ = lambda_scale;
  return p;
}

PartitionSpec PartitionSpec::index_range(int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("index_range: lo must be <= hi");
  PartitionSpec p;
  p.grid_ = false;
  p.lo_ = lo;
  p.hi_ = hi;
  p.m_ = static_cast<std::size_t>(hi - lo + 1);
  p.scale_ = static_cast<double>(p.m_);
  return p;
}

int PartitionSpec::region_for_lambda(double lambda) const {
  if (grid_) {
    // Number of cuts <= lambda, plus one. Half-open cells; both tails clamp
    // into the terminal regions.
    const auto it = std::upper_bound(cuts_.begin(), cuts_.end(), lambda);
    return static_cast<int>(it - cuts_.begin()) + 1;
  }
  const double r = std::nearbyint(lambda);
  if (r != lambda || r < lo_ || r > hi_)
    throw std::invalid_argument("region_for_lambda: label outside the index range");
  return static_cast<int>(r) - lo_ + 1;
}

}  // namespace samc
