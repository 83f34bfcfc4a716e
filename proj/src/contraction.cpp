// SPDX-License-Identifier: Apache-2.0

#include "nagrid/contraction.hpp"

#include <algorithm>

namespace nagrid {

namespace {

void check_no_repeats(const std::string& indices, const char* which) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices.find(indices[i], i + 1) != std::string::npos) {
      throw std::invalid_argument(std::string("repeated label '") + indices[i] +
                                  "' in " + which + " indices");
    }
  }
}

}  // namespace

ContractionSpec::ContractionSpec(std::string a_indices, std::string b_indices,
                                 std::string c_indices,
                                 std::map<char, std::int64_t> extents)
    : a_(std::move(a_indices)),
      b_(std::move(b_indices)),
      c_(std::move(c_indices)),
      extents_(std::move(extents)) {
  check_no_repeats(a_, "A");
  check_no_repeats(b_, "B");
  check_no_repeats(c_, "C");
  for (char label : c_) {
    if (!has_label(a_, label) && !has_label(b_, label)) {
      throw std::invalid_argument(std::string("output label '") + label +
                                  "' appears in neither input");
    }
  }
  for (char label : a_) {
    if (has_label(b_, label) && !has_label(c_, label)) contracted_ += label;
  }
  if (contracted_.empty()) {
    throw std::invalid_argument("no contracted labels; not a contraction");
  }
  for (const std::string* indices : {&a_, &b_, &c_}) {
    for (char label : *indices) {
      auto it = extents_.find(label);
      if (it == extents_.end() || it->second <= 0) {
        throw std::invalid_argument(std::string("label '") + label +
                                    "' lacks a positive extent");
      }
    }
  }
}

std::int64_t ContractionSpec::extent(char label) const {
  auto it = extents_.find(label);
  if (it == extents_.end()) {
    throw std::invalid_argument(std::string("unknown label '") + label + "'");
  }
  return it->second;
}

std::int64_t ContractionSpec::size_of(const std::string& indices) const {
  std::int64_t size = 1;
  for (char label : indices) size *= extent(label);
  return size;
}

}  // namespace nagrid
