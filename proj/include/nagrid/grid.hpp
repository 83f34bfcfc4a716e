// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace nagrid {

/// A d-dimensional processor grid p1 x ... x pd.
///
/// Ranks are linearized with dimension 1 varying fastest (generalized
/// column-major):
///
///   rank = c1 + p1*(c2 + p2*(c3 + ...))
///
/// The rank <-> coordinate conversion is a bijection on [0, p).
class ProcessorGrid {
public:
  explicit ProcessorGrid(std::vector<int> dims);

  int order() const { return static_cast<int>(dims_.size()); }
  std::int64_t size() const { return size_; }
  int dim(int i) const { return dims_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& dims() const { return dims_; }

  std::int64_t rank_of(std::span<const int> coord) const;
  std::vector<int> coord_of(std::int64_t rank) const;

  /// Number of dimension-i fibers, p / p_i.
  std::int64_t fiber_count(int i) const { return size_ / dims_[static_cast<std::size_t>(i)]; }

  /// Coordinates of the n-th dimension-i fiber, listed with the varying
  /// coordinate ascending. Fibers are ordered by the rank of their
  /// coord-zero member restricted to the remaining dimensions.
  std::vector<std::vector<int>> fiber_coords(int i, std::int64_t fiber) const;

  bool operator==(const ProcessorGrid& other) const { return dims_ == other.dims_; }

private:
  std::vector<int> dims_;
  std::int64_t size_ = 1;
};

}  // namespace nagrid
