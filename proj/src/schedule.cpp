// SPDX-License-Identifier: Apache-2.0

#include "nagrid/schedule.hpp"

#include <algorithm>
#include <stdexcept>

namespace nagrid {

SchedulePlan::SchedulePlan(ContractionSpec spec, ProcessorGrid grid,
                           std::vector<std::string> dim_labels,
                           std::int64_t panel_width)
    : spec_(std::move(spec)),
      grid_(std::move(grid)),
      dim_labels_(std::move(dim_labels)),
      panel_width_(panel_width) {}

SchedulePlan SchedulePlan::make(ContractionSpec spec, ProcessorGrid grid,
                                std::vector<std::string> dim_labels,
                                std::int64_t panel_width) {
  if (static_cast<int>(dim_labels.size()) != grid.order()) {
    throw std::invalid_argument("dimension label sets do not match grid order");
  }

  std::string seen;
  for (const std::string& labels : dim_labels) {
    for (char label : labels) {
      if (seen.find(label) != std::string::npos) {
        throw std::invalid_argument(std::string("label '") + label +
                                    "' assigned to two dimensions");
      }
      seen += label;
      spec.extent(label);  // throws on labels the spec does not know
    }
  }

  for (int i = 0; i < grid.order(); ++i) {
    const std::string& labels = dim_labels[static_cast<std::size_t>(i)];
    if (grid.dim(i) > 1 && labels.empty()) {
      throw std::invalid_argument("dimension of size > 1 has no labels assigned");
    }
    // Two labels on one dimension would restrict the summation to
    // diagonal block pairs; the blocked loops could no longer cover the
    // full index space exactly once.
    if (labels.size() > 1) {
      throw std::invalid_argument("more than one label assigned to a dimension");
    }
  }

  SchedulePlan plan(std::move(spec), std::move(grid), std::move(dim_labels),
                    panel_width);

  // Each operand may be communicated along at most one non-trivial
  // dimension; communicated_dim throws otherwise.
  for (const std::string* indices :
       {&plan.spec_.a_indices(), &plan.spec_.b_indices(), &plan.spec_.c_indices()}) {
    plan.communicated_dim(*indices);
  }

  const auto iterated = plan.iterated_label();
  if (plan.panel_width_ == 0) {
    // Default: one owner block per step along the dimension the label is
    // blocked over in an input layout; full extent when never blocked.
    if (iterated) {
      std::int64_t width = plan.spec_.extent(*iterated);
      for (const std::string* indices : {&plan.spec_.a_indices(), &plan.spec_.b_indices()}) {
        if (plan.spec_.has_label(*indices, *iterated)) {
          if (auto dim = plan.communicated_dim(*indices)) {
            const std::int64_t blocks = plan.grid_.dim(*dim);
            if (plan.spec_.extent(*iterated) % blocks == 0) {
              width = std::min(width, plan.spec_.extent(*iterated) / blocks);
            }
          }
        }
      }
      plan.panel_width_ = width;
    } else {
      plan.panel_width_ = 1;
    }
  }
  if (plan.panel_width_ < 1 ||
      (iterated && plan.panel_width_ > plan.spec_.extent(*iterated))) {
    throw std::invalid_argument("panel width out of range");
  }
  return plan;
}

int SchedulePlan::dim_of(char label) const {
  for (int i = 0; i < grid_.order(); ++i) {
    if (dim_labels_[static_cast<std::size_t>(i)].find(label) != std::string::npos) {
      return i;
    }
  }
  return -1;
}

bool SchedulePlan::distributed_over(const std::string& indices, int i) const {
  for (char label : dim_labels_[static_cast<std::size_t>(i)]) {
    if (indices.find(label) != std::string::npos) return true;
  }
  return false;
}

std::optional<int> SchedulePlan::communicated_dim(const std::string& indices) const {
  std::optional<int> found;
  for (int i = 0; i < grid_.order(); ++i) {
    if (grid_.dim(i) == 1 || distributed_over(indices, i)) continue;
    if (found) {
      throw std::invalid_argument("operand \"" + indices +
                                  "\" would be communicated along two dimensions");
    }
    found = i;
  }
  return found;
}

std::optional<char> SchedulePlan::iterated_label() const {
  for (char label : spec_.contracted()) {
    if (dim_of(label) < 0) return label;
  }
  return std::nullopt;
}

}  // namespace nagrid
