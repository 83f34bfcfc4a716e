// SPDX-License-Identifier: Apache-2.0

#include "nagrid/tensor.hpp"

#include <stdexcept>

namespace nagrid {

DenseTensor::DenseTensor(std::string labels_, std::vector<std::int64_t> extents_)
    : labels(std::move(labels_)), extents(std::move(extents_)) {
  if (labels.size() != extents.size()) {
    throw std::invalid_argument("tensor labels and extents differ in length");
  }
  std::int64_t total = 1;
  for (std::int64_t e : extents) {
    if (e <= 0) throw std::invalid_argument("extents must be positive");
    total *= e;
  }
  data.assign(static_cast<std::size_t>(total), 0.0);
}

std::int64_t DenseTensor::offset_of(std::span<const std::int64_t> index) const {
  std::int64_t offset = 0;
  for (std::size_t i = 0; i < extents.size(); ++i) {
    offset = offset * extents[i] + index[i];
  }
  return offset;
}

DenseTensor DenseTensor::identity(std::int64_t n, std::string labels) {
  DenseTensor t(std::move(labels), {n, n});
  for (std::int64_t i = 0; i < n; ++i) t.data[static_cast<std::size_t>(i * n + i)] = 1.0;
  return t;
}

std::uint64_t Rng::next_u64() {
  // splitmix64 (Steele, Lea, Flood 2014), public-domain reference constants.
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::next_unit() {
  const double unit = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return 2.0 * unit - 1.0;
}

void fill_uniform(DenseTensor& tensor, Rng& rng) {
  for (double& value : tensor.data) value = rng.next_unit();
}

}  // namespace nagrid
