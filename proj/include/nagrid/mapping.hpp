// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "nagrid/grid.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nagrid {

enum class MappingKind { Default, NodeAware };

/// Assignment of grid coordinates to physical nodes.
///
/// Physical nodes always hold m consecutive MPI ranks; a mapping decides
/// which grid coordinate each rank works on.
///
///  - Default: rank r owns the coordinate with linearized index r, so
///    consecutive ranks fill nodes in linearization order (the standard
///    block-scheduler placement).
///  - NodeAware: an intra-node grid m1 x ... x md with prod(mi) = m and
///    mi | pi tiles the processor grid into p/m node blocks. The node of
///    a coordinate c is the rank of (c1/m1, ..., cd/md) on the inter-node
///    grid [p1/m1, ..., pd/md], under the same dim-1-fastest ordering.
///
/// Every node receives exactly m coordinates under either kind.
class NodeMapping {
public:
  static NodeMapping make_default(ProcessorGrid grid, int ranks_per_node);
  static NodeMapping node_aware(ProcessorGrid grid, int ranks_per_node,
                                std::vector<int> intra);

  const ProcessorGrid& grid() const { return grid_; }
  int ranks_per_node() const { return ranks_per_node_; }
  MappingKind kind() const { return kind_; }
  /// Intra-node grid; empty for Default mappings.
  const std::vector<int>& intra() const { return intra_; }
  std::int64_t node_count() const { return grid_.size() / ranks_per_node_; }

  /// Physical node holding a grid coordinate.
  std::int64_t node_of(std::span<const int> coord) const;

  /// Rank that owns a grid coordinate (node * m + intra-node index).
  std::int64_t owner_rank(std::span<const int> coord) const;
  /// Coordinate owned by a rank; inverse of owner_rank.
  std::vector<int> coord_held(std::int64_t rank) const;

  std::string describe() const;

private:
  NodeMapping(ProcessorGrid grid, int ranks_per_node, std::vector<int> intra,
              MappingKind kind);

  ProcessorGrid grid_;
  int ranks_per_node_;
  std::vector<int> intra_;
  MappingKind kind_;
};

}  // namespace nagrid
