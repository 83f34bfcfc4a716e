// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "nagrid/mapping.hpp"
#include "nagrid/traffic.hpp"
#include "nagrid/volume.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace nagrid {

/// All intra-node grids [m1,...,md] with prod(mi) = m and mi | pi, in
/// lexicographic order. May be empty (no feasible factorization).
std::vector<std::vector<int>> enumerate_factorizations(std::int64_t m,
                                                       const ProcessorGrid& grid);

/// The intra tuple the Default placement is equivalent to, when consecutive
/// ranks happen to tile the grid in blocks: m = p1*...*p_{j-1} * r with
/// r | p_j. Empty otherwise.
std::optional<std::vector<int>> default_equivalent_intra(const ProcessorGrid& grid,
                                                         int ranks_per_node);

struct ChosenMapping {
  NodeMapping mapping;
  std::int64_t volume = 0;   // V under the chosen intra grid
  bool fallback = false;     // no feasible factorization; Default returned
};

/// Exhaustive search for the intra-node grid minimizing
/// V = sum_i W_i (p_i/m_i - 1). Ties break to the lexicographically
/// smallest tuple. With no feasible factorization, returns the Default
/// mapping (its predicted volume) with the fallback flag set.
ChosenMapping choose_mapping(const FiberWords& words, const ProcessorGrid& grid,
                             int ranks_per_node);

/// One-round redistribution between two mappings of the same grid and
/// ranks-per-node: perm[r] is the rank that owns, under `to`, the
/// coordinate rank r holds under `from`. Always a bijection.
std::vector<std::int64_t> redistribute_plan(const NodeMapping& from,
                                            const NodeMapping& to);

/// True iff the volume saved by switching mappings clears the
/// redistribution cost estimate: (default_V - aware_V) > threshold * p *
/// local_size. The default threshold 0 redistributes whenever strictly
/// better.
bool should_redistribute(std::int64_t default_volume, std::int64_t aware_volume,
                         std::int64_t local_size, std::int64_t total_ranks,
                         double threshold = 0.0);

}  // namespace nagrid
