#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "lambda_lab/frequency_set.hpp"

namespace lambda_lab {

struct Cap {
  std::vector<std::int64_t> cell;  // grid cell index per base axis
  std::vector<double> lo;          // base box [lo, hi)
  std::vector<double> hi;
  std::vector<std::size_t> members;
};

/// Partition of the base into equal half-open cells; only nonempty cells are
/// listed, in lexicographic cell order.
struct CapPartition {
  double beta = 1.0;
  std::int64_t cells_per_axis = 1;
  std::vector<Cap> caps;

  double side() const noexcept { return 1.0 / static_cast<double>(cells_per_axis); }
  /// Index of the most populated cap; the first one wins ties.
  std::size_t densest() const;
};

/// Cells of side exactly 1/ceil(R^beta).
CapPartition cap_partition(const FrequencySet& fset, double beta);
/// Cells of side 1/cells_per_axis.
CapPartition cap_grid(const FrequencySet& fset, std::int64_t cells_per_axis);

/// Overlapping family of axis-parallel rectangles of [0,1]² used for the
/// hyperbolic paraboloid: for each level j = 0..k (R = 2^k) the square is
/// partitioned into rectangles of width 2^j/R and height 2^-j.
class DyadicCover {
 public:
  explicit DyadicCover(std::int64_t R);

  std::int64_t R() const noexcept { return R_; }
  int levels() const noexcept { return k_ + 1; }
  std::int64_t rectangles_per_level() const noexcept { return R_; }
  std::size_t rectangle_count() const noexcept {
    return static_cast<std::size_t>(levels()) * static_cast<std::size_t>(R_);
  }

  double width(int level) const;
  double height(int level) const;

  /// Global rectangle id containing the base lattice point (n1, n2) at a level.
  std::size_t rectangle_of(int level, std::int64_t n1, std::int64_t n2) const;
  /// {x_lo, x_hi, y_lo, y_hi} of a rectangle.
  std::array<double, 4> bounds(std::size_t id) const;
  /// One rectangle id per level.
  std::vector<std::size_t> membership(std::int64_t n1, std::int64_t n2) const;
  /// Member indices of every rectangle (indexed by global id).
  std::vector<std::vector<std::size_t>> members(const FrequencySet& fset) const;

 private:
  std::int64_t R_;
  int k_;
};

DyadicCover dyadic_cover(std::int64_t R);

}  // namespace lambda_lab
