// SPDX-License-Identifier: Apache-2.0

#include "nagrid/scenarios.hpp"

#include "nagrid/volume.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

namespace nagrid {

MmmKind mmm_kind_from_string(const std::string& name) {
  if (name == "square") return MmmKind::Square;
  if (name == "largeK") return MmmKind::LargeK;
  if (name == "largeM") return MmmKind::LargeM;
  if (name == "smallK") return MmmKind::SmallK;
  throw std::invalid_argument("unknown matrix kind: " + name);
}

std::string to_string(MmmKind kind) {
  switch (kind) {
    case MmmKind::Square: return "square";
    case MmmKind::LargeK: return "largeK";
    case MmmKind::LargeM: return "largeM";
    case MmmKind::SmallK: return "smallK";
  }
  throw std::invalid_argument("unknown matrix kind");
}

ContractionSpec mmm_scenario(MmmKind kind, std::int64_t base) {
  if (base < 1) throw std::invalid_argument("base extent must be positive");
  std::int64_t m = base, n = base, k = base;
  switch (kind) {
    case MmmKind::Square: break;
    case MmmKind::LargeK: k = 10 * base; break;
    case MmmKind::LargeM: m = 10 * base; break;
    case MmmKind::SmallK: m = 10 * base; n = 10 * base; break;
  }
  return ContractionSpec("mk", "kn", "mn", {{'m', m}, {'n', n}, {'k', k}});
}

ContractionSpec drccd_scenario(std::int64_t occupied, std::int64_t virtuals) {
  if (occupied < 1 || virtuals < 1) {
    throw std::invalid_argument("orbital counts must be positive");
  }
  return ContractionSpec("icak", "kjcb", "ijab",
                         {{'i', occupied},
                          {'j', occupied},
                          {'k', occupied},
                          {'a', virtuals},
                          {'b', virtuals},
                          {'c', virtuals}});
}

std::vector<std::int64_t> node_counts(std::int64_t max_nodes) {
  std::vector<std::int64_t> counts;
  for (std::int64_t j : {1, 3, 9}) {
    for (std::int64_t n = j; n <= max_nodes; n *= 2) counts.push_back(n);
  }
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  return counts;
}

namespace {

// words(m, n, k) for a kind expressed in units of base^2.
std::int64_t kind_words_per_base_sq(MmmKind kind) {
  switch (kind) {
    case MmmKind::Square: return 3;          // mk + kn + mn
    case MmmKind::LargeK: return 21;         // 10 + 10 + 1
    case MmmKind::LargeM: return 21;         // 10 + 1 + 10
    case MmmKind::SmallK: return 120;        // 10 + 10 + 100
  }
  throw std::invalid_argument("unknown matrix kind");
}

std::int64_t base_for_words(MmmKind kind, std::int64_t words, std::int64_t round_to) {
  const double per = static_cast<double>(kind_words_per_base_sq(kind));
  auto base = static_cast<std::int64_t>(
      std::floor(std::sqrt(static_cast<double>(words) / per)));
  base = std::max<std::int64_t>(round_to, base - base % round_to);
  return base;
}

}  // namespace

std::vector<ScaledScenario> scaling_sweep(MmmKind kind, ScalingMode mode,
                                          std::int64_t per_rank_words,
                                          std::span<const std::int64_t> nodes,
                                          int ranks_per_node, std::int64_t round_to) {
  if (per_rank_words < 1 || ranks_per_node < 1 || round_to < 1) {
    throw std::invalid_argument("scaling parameters must be positive");
  }
  std::vector<ScaledScenario> out;
  out.reserve(nodes.size());
  for (std::int64_t n : nodes) {
    const std::int64_t budget =
        mode == ScalingMode::Strong
            ? per_rank_words * ranks_per_node               // one node's worth
            : per_rank_words * ranks_per_node * n;          // constant per rank
    out.push_back({n, mmm_scenario(kind, base_for_words(kind, budget, round_to))});
  }
  return out;
}

ProcessorGrid choose_grid(const ContractionSpec& spec, std::int64_t ranks, int dims) {
  if (ranks < 1 || dims < 1) throw std::invalid_argument("ranks and dims must be positive");

  std::vector<int> current(static_cast<std::size_t>(dims), 1);
  std::vector<int> best;
  std::int64_t best_score = 0;

  const auto consider = [&](const std::vector<int>& candidate) {
    ProcessorGrid grid(candidate);
    std::optional<SchedulePlan> plan;
    try {
      plan = standard_plan(spec, grid);
    } catch (const std::invalid_argument&) {
      return;  // assignment not schedulable on this shape
    }
    for (int i = 0; i < grid.order(); ++i) {
      for (char label : plan->dim_labels()[static_cast<std::size_t>(i)]) {
        if (spec.extent(label) % grid.dim(i) != 0) return;  // ragged blocks
      }
    }
    const FiberWords words = fiber_words(*plan);
    std::int64_t score = 0;
    for (int i = 0; i < grid.order(); ++i) {
      score += words.words[static_cast<std::size_t>(i)] * (grid.dim(i) - 1);
    }
    if (best.empty() || score < best_score) {
      best = candidate;
      best_score = score;
    }
  };

  // All ordered factorizations, lexicographic, so ties resolve smallest.
  const std::function<void(int, std::int64_t)> descend = [&](int dim,
                                                             std::int64_t remaining) {
    if (dim == dims) {
      if (remaining == 1) consider(current);
      return;
    }
    for (std::int64_t f = 1; f <= remaining; ++f) {
      if (remaining % f != 0) continue;
      current[static_cast<std::size_t>(dim)] = static_cast<int>(f);
      descend(dim + 1, remaining / f);
    }
    current[static_cast<std::size_t>(dim)] = 1;
  };
  descend(0, ranks);

  if (best.empty()) {
    throw std::domain_error("no grid of the requested order divides the extents");
  }
  return ProcessorGrid(best);
}

SchedulePlan standard_plan(const ContractionSpec& spec, const ProcessorGrid& grid,
                           std::int64_t panel_width) {
  // Interleave the label classes so each operand reaches as many
  // dimensions as possible: batch labels first, then alternating
  // A-free / B-free / contracted.
  std::string batch, free_a, free_b;
  for (char label : spec.a_indices()) {
    const bool in_b = spec.has_label(spec.b_indices(), label);
    const bool in_c = spec.has_label(spec.c_indices(), label);
    if (in_b && in_c) batch += label;
    else if (in_c) free_a += label;
  }
  for (char label : spec.b_indices()) {
    if (spec.has_label(spec.c_indices(), label) &&
        !spec.has_label(spec.a_indices(), label)) {
      free_b += label;
    }
  }
  const std::string& contracted = spec.contracted();

  std::string order = batch;
  for (std::size_t i = 0; i < std::max({free_a.size(), free_b.size(), contracted.size()});
       ++i) {
    if (i < free_a.size()) order += free_a[i];
    if (i < free_b.size()) order += free_b[i];
    if (i < contracted.size()) order += contracted[i];
  }

  std::vector<std::string> dim_labels(static_cast<std::size_t>(grid.order()));
  for (int i = 0; i < grid.order() && i < static_cast<int>(order.size()); ++i) {
    dim_labels[static_cast<std::size_t>(i)] = order[static_cast<std::size_t>(i)];
  }
  return SchedulePlan::make(spec, grid, std::move(dim_labels), panel_width);
}

}  // namespace nagrid
