// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "nagrid/mapping.hpp"

#include <cstdint>
#include <vector>

namespace nagrid {

/// Aggregate words communicated along the fibers of each grid dimension,
/// summed over all fibers of that dimension. W_i = 0 whenever p_i = 1.
struct FiberWords {
  std::vector<std::int64_t> words;

  std::int64_t total() const;
};

struct DimensionTraffic {
  int dimension = 0;  // zero-based grid dimension
  std::int64_t predicted = 0;
  std::int64_t measured = 0;
};

/// Counters from one simulated contraction, with the model's prediction.
/// All values are element counts (words).
struct TrafficReport {
  std::int64_t predicted_inter_node = 0;
  std::int64_t measured_inter_node = 0;
  std::int64_t measured_intra_node = 0;
  std::vector<DimensionTraffic> per_dimension;
  int ranks_per_node = 1;
  MappingKind mapping_kind = MappingKind::Default;
};

}  // namespace nagrid
