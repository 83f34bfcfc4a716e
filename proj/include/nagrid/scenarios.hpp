// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "nagrid/contraction.hpp"
#include "nagrid/grid.hpp"
#include "nagrid/schedule.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nagrid {

/// Benchmark matrix shapes; the small:large edge ratio is 10.
enum class MmmKind { Square, LargeK, LargeM, SmallK };

MmmKind mmm_kind_from_string(const std::string& name);
std::string to_string(MmmKind kind);

/// square: (b,b,b); largeK: (b,b,10b); largeM: (10b,b,b); smallK: (10b,10b,b)
ContractionSpec mmm_scenario(MmmKind kind, std::int64_t base);

/// Ring contraction r[ijab] = sum_ck v[icak] * t[kjcb] with
/// dim(i)=dim(j)=dim(k)=occupied and dim(a)=dim(b)=dim(c)=virtuals.
ContractionSpec drccd_scenario(std::int64_t occupied, std::int64_t virtuals);

/// Node counts of the form j * 2^i, j in {1, 3, 9}, up to max_nodes.
std::vector<std::int64_t> node_counts(std::int64_t max_nodes);

enum class ScalingMode { Strong, Weak };

struct ScaledScenario {
  std::int64_t nodes = 1;
  ContractionSpec spec;
};

/// Strong: extents fixed at the single-node size. Weak: extents grown to
/// hold per-rank words constant, rounded down to a multiple of round_to.
std::vector<ScaledScenario> scaling_sweep(MmmKind kind, ScalingMode mode,
                                          std::int64_t per_rank_words,
                                          std::span<const std::int64_t> nodes,
                                          int ranks_per_node,
                                          std::int64_t round_to = 1);

/// Candidate-grid heuristic standing in for a runtime cost model: all
/// ordered factorizations of `ranks` into `dims` factors that divide the
/// assigned extents, scored by sum_i W_i (p_i - 1), lexicographic
/// tie-break.
ProcessorGrid choose_grid(const ContractionSpec& spec, std::int64_t ranks, int dims);

/// Standard label assignment for the scenario families: output labels of
/// C first, then the leading contracted label on the next dimension when
/// one is free. MMM on 3 dims gives m->1, n->2, k->3.
SchedulePlan standard_plan(const ContractionSpec& spec, const ProcessorGrid& grid,
                           std::int64_t panel_width = 0);

}  // namespace nagrid
