// SPDX-License-Identifier: Apache-2.0

#include "nagrid/grid.hpp"

#include <stdexcept>

namespace nagrid {

ProcessorGrid::ProcessorGrid(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("grid needs at least one dimension");
  for (int d : dims_) {
    if (d < 1) throw std::invalid_argument("grid dimensions must be positive");
    size_ *= d;
  }
}

std::int64_t ProcessorGrid::rank_of(std::span<const int> coord) const {
  if (coord.size() != dims_.size()) {
    throw std::domain_error("coordinate order does not match grid");
  }
  std::int64_t rank = 0;
  std::int64_t stride = 1;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (coord[i] < 0 || coord[i] >= dims_[i]) {
      throw std::domain_error("coordinate out of range");
    }
    rank += stride * coord[i];
    stride *= dims_[i];
  }
  return rank;
}

std::vector<int> ProcessorGrid::coord_of(std::int64_t rank) const {
  if (rank < 0 || rank >= size_) throw std::domain_error("rank out of range");
  std::vector<int> coord(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    coord[i] = static_cast<int>(rank % dims_[i]);
    rank /= dims_[i];
  }
  return coord;
}

std::vector<std::vector<int>> ProcessorGrid::fiber_coords(int i, std::int64_t fiber) const {
  const auto dim = static_cast<std::size_t>(i);
  if (dim >= dims_.size()) throw std::domain_error("fiber dimension out of range");
  if (fiber < 0 || fiber >= fiber_count(i)) throw std::domain_error("fiber id out of range");

  // Decode the fiber id over the remaining dimensions, dim-1-fastest.
  std::vector<int> base(dims_.size(), 0);
  std::int64_t rest = fiber;
  for (std::size_t j = 0; j < dims_.size(); ++j) {
    if (j == dim) continue;
    base[j] = static_cast<int>(rest % dims_[j]);
    rest /= dims_[j];
  }

  std::vector<std::vector<int>> coords;
  coords.reserve(static_cast<std::size_t>(dims_[dim]));
  for (int c = 0; c < dims_[dim]; ++c) {
    base[dim] = c;
    coords.push_back(base);
  }
  return coords;
}

}  // namespace nagrid
