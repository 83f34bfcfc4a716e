// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "nagrid/mapping.hpp"
#include "nagrid/schedule.hpp"
#include "nagrid/traffic.hpp"

#include <cstdint>
#include <span>

namespace nagrid {

/// Words communicated along each grid dimension for a schedule.
///
/// W_i sums size(X) over the operands X with no label assigned to
/// dimension i: inputs contribute broadcast volume, the output reduction
/// volume. Dimensions of size 1 report 0. Pure function of the schedule;
/// independent of node mapping and panel width.
FiberWords fiber_words(const SchedulePlan& plan);

/// Inter-node volume of a broadcast (or reduction) of `payload` words
/// along a fiber spanning `fiber_nodes` nodes: payload * (fiber_nodes-1).
std::int64_t broadcast_volume(std::int64_t payload, std::int64_t fiber_nodes);

/// Analytical inter-node volume for an intra-node grid [m1,...,md]:
///
///   V = sum_i W_i * (p_i/m_i - 1)
///
/// Requires m_i | p_i for all i.
std::int64_t communication_volume(const FiberWords& words,
                                  const ProcessorGrid& grid,
                                  std::span<const int> intra);

/// Inter-node volume predicted for an arbitrary mapping: fiber payloads
/// W_i * p_i / p spread uniformly, node spans taken from the mapping.
/// Equals communication_volume for NodeAware mappings; for Default
/// mappings it accounts for fibers that wrap across node boundaries.
std::int64_t predicted_volume(const FiberWords& words, const NodeMapping& mapping);

/// Same prediction, split by grid dimension.
std::vector<std::int64_t> predicted_volume_by_dim(const FiberWords& words,
                                                  const NodeMapping& mapping);

/// Per-rank storage estimate: local blocks of A, B, C plus one panel
/// receive buffer per communicated operand plus one redistribution
/// buffer (the largest local block; absent on a single rank).
struct MemoryEstimate {
  std::int64_t local_storage = 0;
  std::int64_t panel_buffers = 0;
  std::int64_t redistribution_buffer = 0;

  std::int64_t total() const {
    return local_storage + panel_buffers + redistribution_buffer;
  }
  double ratio() const {
    return local_storage == 0 ? 1.0
                              : static_cast<double>(total()) /
                                    static_cast<double>(local_storage);
  }
};

MemoryEstimate memory_estimate(const SchedulePlan& plan);

}  // namespace nagrid
