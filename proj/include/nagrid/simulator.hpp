// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "nagrid/mapping.hpp"
#include "nagrid/schedule.hpp"
#include "nagrid/tensor.hpp"
#include "nagrid/traffic.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace nagrid {

/// Naive loop-nest contraction, the independent numerical oracle.
/// Output labels iterate freely; contracted labels are summed ascending,
/// nested in order of first appearance in a_indices.
DenseTensor reference_contract(const ContractionSpec& spec, const DenseTensor& a,
                               const DenseTensor& b);

/// Blocked distribution of one operand over the plan's grid.
///
/// Labels assigned to a grid dimension split their extent into p_i
/// contiguous blocks (extent divisibility required). The first
/// sequential label of an input is additionally completed onto the
/// dimension the input is communicated along when its extent divides;
/// with no completion the operand lives at coordinate zero of that
/// dimension and the other coordinates hold nothing.
class DistributedTensor {
public:
  DistributedTensor(const SchedulePlan& plan, const DenseTensor& global);

  /// Words held by the coordinate with the given linearized rank.
  std::int64_t local_words(std::int64_t rank) const;
  const std::vector<double>& local_block(std::int64_t rank) const;
  /// Per-label [begin, end) of a block; empty blocks give begin == end.
  const std::vector<std::pair<std::int64_t, std::int64_t>>& block_ranges(
      std::int64_t rank) const;

  /// Reassembles the global tensor from the local blocks.
  DenseTensor gather() const;

private:
  std::string labels_;
  std::vector<std::int64_t> extents_;
  std::vector<std::vector<double>> blocks_;
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> ranges_;
};

struct SimulationResult {
  DenseTensor c;
  TrafficReport report;
  /// Words moved between node pairs (src, dst), chain-tree convention;
  /// intra-node hops use src == dst.
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> node_pair_words;
};

/// Execute the schedule on logical ranks: blocked operand distribution,
/// one allgather/broadcast round per communicated input, rank-local
/// multiply, one reduction round for the output if it is communicated.
///
/// Counting convention: a broadcast (or reduction) of payload w along a
/// fiber whose coordinates span q distinct nodes adds w*(q-1) inter-node
/// and w*(fiber length - q) intra-node words -- every word enters each
/// rank that needs it exactly once, node-level tree for the node counts.
///
/// Requires extents of labels assigned to dimension i divisible by p_i.
/// Summation runs in ascending contracted order, so the result does not
/// depend on the node mapping.
SimulationResult simulate_contraction(const SchedulePlan& plan,
                                      const NodeMapping& mapping,
                                      const DenseTensor& a, const DenseTensor& b);

/// Inter-node words moved by a redistribution permutation, local_size
/// words per rank whose source and destination nodes differ.
std::int64_t measure_redistribution(const std::vector<std::int64_t>& perm,
                                    const NodeMapping& from, const NodeMapping& to,
                                    std::int64_t local_size);

/// Largest |sim - ref| / max(|ref|, 1) over all elements.
double max_relative_error(const DenseTensor& value, const DenseTensor& reference);

}  // namespace nagrid
