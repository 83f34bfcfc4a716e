// SPDX-License-Identifier: Apache-2.0

#include "nagrid/mapper.hpp"

#include <stdexcept>

namespace nagrid {

namespace {

void descend(std::int64_t remaining, int dim, const ProcessorGrid& grid,
             std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (dim == grid.order()) {
    if (remaining == 1) out.push_back(current);
    return;
  }
  // Ascending divisors keep the output lexicographic.
  for (int factor = 1; factor <= grid.dim(dim) && factor <= remaining; ++factor) {
    if (remaining % factor != 0 || grid.dim(dim) % factor != 0) continue;
    current[static_cast<std::size_t>(dim)] = factor;
    descend(remaining / factor, dim + 1, grid, current, out);
  }
  current[static_cast<std::size_t>(dim)] = 1;
}

}  // namespace

std::vector<std::vector<int>> enumerate_factorizations(std::int64_t m,
                                                       const ProcessorGrid& grid) {
  if (m < 1) throw std::domain_error("ranks per node must be positive");
  std::vector<std::vector<int>> out;
  std::vector<int> current(static_cast<std::size_t>(grid.order()), 1);
  descend(m, 0, grid, current, out);
  return out;
}

std::optional<std::vector<int>> default_equivalent_intra(const ProcessorGrid& grid,
                                                         int ranks_per_node) {
  // Consecutive ranks form grid blocks exactly when m factors through a
  // prefix of the dimensions: m = p1 * ... * p_{j-1} * r with r | p_j.
  std::vector<int> intra(static_cast<std::size_t>(grid.order()), 1);
  std::int64_t remaining = ranks_per_node;
  for (int i = 0; i < grid.order() && remaining > 1; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (remaining >= grid.dim(i)) {
      if (remaining % grid.dim(i) != 0) return std::nullopt;
      intra[idx] = grid.dim(i);
      remaining /= grid.dim(i);
    } else {
      if (grid.dim(i) % remaining != 0) return std::nullopt;
      intra[idx] = static_cast<int>(remaining);
      remaining = 1;
    }
  }
  if (remaining != 1) return std::nullopt;
  return intra;
}

ChosenMapping choose_mapping(const FiberWords& words, const ProcessorGrid& grid,
                             int ranks_per_node) {
  if (ranks_per_node < 1 || grid.size() % ranks_per_node != 0) {
    throw std::domain_error("grid size not divisible by ranks per node");
  }
  const auto candidates = enumerate_factorizations(ranks_per_node, grid);
  if (candidates.empty()) {
    NodeMapping fallback = NodeMapping::make_default(grid, ranks_per_node);
    const std::int64_t volume = predicted_volume(words, fallback);
    return ChosenMapping{std::move(fallback), volume, true};
  }
  const std::vector<int>* best = nullptr;
  std::int64_t best_volume = 0;
  for (const auto& intra : candidates) {
    const std::int64_t volume = communication_volume(words, grid, intra);
    if (best == nullptr || volume < best_volume) {
      best = &intra;
      best_volume = volume;
    }
  }
  return ChosenMapping{NodeMapping::node_aware(grid, ranks_per_node, *best),
                       best_volume, false};
}

std::vector<std::int64_t> redistribute_plan(const NodeMapping& from,
                                            const NodeMapping& to) {
  if (!(from.grid() == to.grid()) || from.ranks_per_node() != to.ranks_per_node()) {
    throw std::domain_error("redistribution requires matching grids");
  }
  const std::int64_t p = from.grid().size();
  std::vector<std::int64_t> perm(static_cast<std::size_t>(p));
  for (std::int64_t r = 0; r < p; ++r) {
    perm[static_cast<std::size_t>(r)] = to.owner_rank(from.coord_held(r));
  }
  return perm;
}

bool should_redistribute(std::int64_t default_volume, std::int64_t aware_volume,
                         std::int64_t local_size, std::int64_t total_ranks,
                         double threshold) {
  if (default_volume < 0 || aware_volume < 0 || local_size < 0 || total_ranks < 0) {
    throw std::domain_error("negative input");
  }
  const double saved = static_cast<double>(default_volume - aware_volume);
  return saved > threshold * static_cast<double>(total_ranks) *
                     static_cast<double>(local_size);
}

}  // namespace nagrid
