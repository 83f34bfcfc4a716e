// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nagrid {

/// Dense tensor with single-character index labels, stored row-major
/// (first label slowest, last label fastest).
struct DenseTensor {
  std::string labels;
  std::vector<std::int64_t> extents;
  std::vector<double> data;

  DenseTensor() = default;
  DenseTensor(std::string labels_, std::vector<std::int64_t> extents_);

  std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }
  std::int64_t offset_of(std::span<const std::int64_t> index) const;

  double& at(std::span<const std::int64_t> index) { return data[static_cast<std::size_t>(offset_of(index))]; }
  double at(std::span<const std::int64_t> index) const { return data[static_cast<std::size_t>(offset_of(index))]; }

  static DenseTensor identity(std::int64_t n, std::string labels);
};

/// splitmix64 with a fixed uint64 -> [-1, 1) mapping. Implemented here
/// rather than with <random> distributions so that streams are
/// bit-identical across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  double next_unit();  // uniform in [-1, 1)

private:
  std::uint64_t state_;
};

void fill_uniform(DenseTensor& tensor, Rng& rng);

}  // namespace nagrid
