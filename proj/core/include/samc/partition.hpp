#pragma once

#include <cstddef>
#include <vector>

namespace samc {

// Maps the partition statistic lambda(x) to a 1-based subregion index.
//
// Two layouts cover both applications:
//   energy_grid: half-open energy cells over strictly increasing cut points
//                u_1 < ... < u_{m-1}, i.e. region 1 is lambda < u_1, region i
//                is u_{i-1} <= lambda < u_i, region m absorbs lambda >= u_{m-1}
//   index_range: lambda is itself an integer label in [lo, hi]; region is
//                lambda - lo + 1
class PartitionSpec {
public:
  static PartitionSpec energy_grid(std::vector<double> cuts, double lambda_scale);
  static PartitionSpec index_range(int lo, int hi);

  std::size_t region_count() const { return m_; }

  // Rough range of lambda over the sample space, the Lambda constant of the
  // smoothing kernel's index rescaling.
  double lambda_scale() const { return scale_; }

  // Total on admissible lambda values: the terminal cells of an energy grid
  // absorb both tails, and an index range rejects out-of-range labels.
  int region_for_lambda(double lambda) const;

private:
  PartitionSpec() = default;

  bool grid_ = true;
  std::vector<double> cuts_;  // energy_grid only
  int lo_ = 0, hi_ = 0;       // index_range only
  std::size_t m_ = 0;
  double scale_ = 0.0;
};

}  // namespace samc
