// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace nagrid {

/// Index-labeled description of a bilinear tensor contraction
///
///   C[c_indices] += A[a_indices] * B[b_indices]
///
/// Each index label is a single character with a positive extent.
/// Labels shared by A and B but absent from C are contracted (summed).
/// Matrix multiplication is the special case a="mk", b="kn", c="mn".
class ContractionSpec {
public:
  ContractionSpec(std::string a_indices,
                  std::string b_indices,
                  std::string c_indices,
                  std::map<char, std::int64_t> extents);

  const std::string& a_indices() const { return a_; }
  const std::string& b_indices() const { return b_; }
  const std::string& c_indices() const { return c_; }
  const std::map<char, std::int64_t>& extents() const { return extents_; }

  std::int64_t extent(char label) const;

  /// Labels summed over, ordered by first appearance in a_indices.
  const std::string& contracted() const { return contracted_; }

  bool has_label(const std::string& indices, char label) const {
    return indices.find(label) != std::string::npos;
  }

  /// Element count of one operand (product of its extents).
  std::int64_t size_of(const std::string& indices) const;

  std::int64_t size_a() const { return size_of(a_); }
  std::int64_t size_b() const { return size_of(b_); }
  std::int64_t size_c() const { return size_of(c_); }

private:
  std::string a_, b_, c_;
  std::string contracted_;
  std::map<char, std::int64_t> extents_;
};

}  // namespace nagrid
