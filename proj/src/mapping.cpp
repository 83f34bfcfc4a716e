// SPDX-License-Identifier: Apache-2.0

#include "nagrid/mapping.hpp"

#include <sstream>
#include <stdexcept>

namespace nagrid {

NodeMapping::NodeMapping(ProcessorGrid grid, int ranks_per_node,
                         std::vector<int> intra, MappingKind kind)
    : grid_(std::move(grid)),
      ranks_per_node_(ranks_per_node),
      intra_(std::move(intra)),
      kind_(kind) {
  if (ranks_per_node_ < 1) throw std::domain_error("ranks per node must be positive");
  if (grid_.size() % ranks_per_node_ != 0) {
    throw std::domain_error("grid size not divisible by ranks per node");
  }
}

NodeMapping NodeMapping::make_default(ProcessorGrid grid, int ranks_per_node) {
  return NodeMapping(std::move(grid), ranks_per_node, {}, MappingKind::Default);
}

NodeMapping NodeMapping::node_aware(ProcessorGrid grid, int ranks_per_node,
                                    std::vector<int> intra) {
  if (static_cast<int>(intra.size()) != grid.order()) {
    throw std::domain_error("intra-node grid order does not match grid");
  }
  std::int64_t product = 1;
  for (int i = 0; i < grid.order(); ++i) {
    if (intra[static_cast<std::size_t>(i)] < 1) {
      throw std::domain_error("intra-node grid entries must be positive");
    }
    if (grid.dim(i) % intra[static_cast<std::size_t>(i)] != 0) {
      throw std::domain_error("intra-node grid does not divide processor grid");
    }
    product *= intra[static_cast<std::size_t>(i)];
  }
  if (product != ranks_per_node) {
    throw std::domain_error("intra-node grid does not multiply to ranks per node");
  }
  return NodeMapping(std::move(grid), ranks_per_node, std::move(intra),
                     MappingKind::NodeAware);
}

std::int64_t NodeMapping::node_of(std::span<const int> coord) const {
  if (kind_ == MappingKind::Default) {
    return grid_.rank_of(coord) / ranks_per_node_;
  }
  // Rank of the node block on the inter-node grid, dim-1-fastest.
  std::int64_t node = 0;
  std::int64_t stride = 1;
  for (int i = 0; i < grid_.order(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (coord[idx] < 0 || coord[idx] >= grid_.dim(i)) {
      throw std::domain_error("coordinate out of range");
    }
    const int inter_dim = grid_.dim(i) / intra_[idx];
    node += stride * (coord[idx] / intra_[idx]);
    stride *= inter_dim;
  }
  return node;
}

std::int64_t NodeMapping::owner_rank(std::span<const int> coord) const {
  if (kind_ == MappingKind::Default) return grid_.rank_of(coord);
  // Intra-node index of the coordinate within its node block.
  std::int64_t local = 0;
  std::int64_t stride = 1;
  for (int i = 0; i < grid_.order(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    local += stride * (coord[idx] % intra_[idx]);
    stride *= intra_[idx];
  }
  return node_of(coord) * ranks_per_node_ + local;
}

std::vector<int> NodeMapping::coord_held(std::int64_t rank) const {
  if (rank < 0 || rank >= grid_.size()) throw std::domain_error("rank out of range");
  if (kind_ == MappingKind::Default) return grid_.coord_of(rank);
  std::int64_t node = rank / ranks_per_node_;
  std::int64_t local = rank % ranks_per_node_;
  std::vector<int> coord(static_cast<std::size_t>(grid_.order()));
  for (int i = 0; i < grid_.order(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const int inter_dim = grid_.dim(i) / intra_[idx];
    coord[idx] = static_cast<int>(node % inter_dim) * intra_[idx] +
                 static_cast<int>(local % intra_[idx]);
    node /= inter_dim;
    local /= intra_[idx];
  }
  return coord;
}

std::string NodeMapping::describe() const {
  std::ostringstream out;
  if (kind_ == MappingKind::Default) {
    out << "default";
  } else {
    out << "node-aware ";
    for (std::size_t i = 0; i < intra_.size(); ++i) {
      if (i > 0) out << 'x';
      out << intra_[i];
    }
  }
  return out.str();
}

}  // namespace nagrid
