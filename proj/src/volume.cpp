// SPDX-License-Identifier: Apache-2.0

#include "nagrid/volume.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace nagrid {

std::int64_t FiberWords::total() const {
  return std::accumulate(words.begin(), words.end(), std::int64_t{0});
}

FiberWords fiber_words(const SchedulePlan& plan) {
  const ContractionSpec& spec = plan.spec();
  const ProcessorGrid& grid = plan.grid();
  FiberWords result;
  result.words.assign(static_cast<std::size_t>(grid.order()), 0);
  for (int i = 0; i < grid.order(); ++i) {
    if (grid.dim(i) == 1) continue;
    std::int64_t w = 0;
    for (const std::string* indices :
         {&spec.a_indices(), &spec.b_indices(), &spec.c_indices()}) {
      if (!plan.distributed_over(*indices, i)) w += spec.size_of(*indices);
    }
    result.words[static_cast<std::size_t>(i)] = w;
  }
  return result;
}

std::int64_t broadcast_volume(std::int64_t payload, std::int64_t fiber_nodes) {
  if (fiber_nodes < 1) throw std::domain_error("fiber spans at least one node");
  if (payload < 0) throw std::domain_error("payload must be non-negative");
  return payload * (fiber_nodes - 1);
}

std::int64_t communication_volume(const FiberWords& words, const ProcessorGrid& grid,
                                  std::span<const int> intra) {
  if (static_cast<int>(words.words.size()) != grid.order() ||
      static_cast<int>(intra.size()) != grid.order()) {
    throw std::domain_error("dimension mismatch");
  }
  std::int64_t volume = 0;
  for (int i = 0; i < grid.order(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (intra[idx] < 1 || grid.dim(i) % intra[idx] != 0) {
      throw std::domain_error("intra-node grid does not divide processor grid");
    }
    volume += broadcast_volume(words.words[idx], grid.dim(i) / intra[idx]);
  }
  return volume;
}

std::vector<std::int64_t> predicted_volume_by_dim(const FiberWords& words,
                                                  const NodeMapping& mapping) {
  const ProcessorGrid& grid = mapping.grid();
  if (static_cast<int>(words.words.size()) != grid.order()) {
    throw std::domain_error("dimension mismatch");
  }
  std::vector<std::int64_t> by_dim(static_cast<std::size_t>(grid.order()), 0);
  for (int i = 0; i < grid.order(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (words.words[idx] == 0) continue;
    const std::int64_t fibers = grid.fiber_count(i);
    std::int64_t node_hops = 0;  // sum over fibers of (nodes spanned - 1)
    for (std::int64_t f = 0; f < fibers; ++f) {
      std::set<std::int64_t> nodes;
      for (const auto& coord : grid.fiber_coords(i, f)) {
        nodes.insert(mapping.node_of(coord));
      }
      node_hops += static_cast<std::int64_t>(nodes.size()) - 1;
    }
    // Division last: exact whenever the words split evenly over fibers,
    // which holds for every schedule the simulator accepts.
    by_dim[idx] = words.words[idx] * node_hops / fibers;
  }
  return by_dim;
}

std::int64_t predicted_volume(const FiberWords& words, const NodeMapping& mapping) {
  const auto by_dim = predicted_volume_by_dim(words, mapping);
  return std::accumulate(by_dim.begin(), by_dim.end(), std::int64_t{0});
}

MemoryEstimate memory_estimate(const SchedulePlan& plan) {
  const ContractionSpec& spec = plan.spec();
  const ProcessorGrid& grid = plan.grid();

  // Local block: assigned labels split by their dimension; a sequential
  // label of an input also splits over the dimension the input is
  // communicated along when its extent divides (the layout completion).
  const auto local_words = [&](const std::string& indices, bool is_output) {
    std::int64_t words = spec.size_of(indices);
    bool completed = false;
    const auto comm = plan.communicated_dim(indices);
    for (char label : indices) {
      const int dim = plan.dim_of(label);
      if (dim >= 0) {
        words /= grid.dim(dim);
      } else if (comm && !completed && !is_output &&
                 spec.extent(label) % grid.dim(*comm) == 0) {
        words /= grid.dim(*comm);
        completed = true;
      }
    }
    return words;
  };

  MemoryEstimate estimate;
  std::int64_t largest = 0;
  for (const std::string* indices :
       {&spec.a_indices(), &spec.b_indices(), &spec.c_indices()}) {
    const std::int64_t local = local_words(*indices, indices == &spec.c_indices());
    estimate.local_storage += local;
    largest = std::max(largest, local);
    if (plan.communicated_dim(*indices)) {
      // Panel receive buffer: the local block's slice of one panel.
      std::int64_t panel = local;
      if (const auto iterated = plan.iterated_label()) {
        if (spec.has_label(*indices, *iterated)) {
          panel = local * plan.panel_width() / spec.extent(*iterated);
        }
      }
      estimate.panel_buffers += panel;
    }
  }
  if (grid.size() > 1) estimate.redistribution_buffer = largest;
  return estimate;
}

}  // namespace nagrid
