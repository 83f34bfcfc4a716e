// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "nagrid/contraction.hpp"
#include "nagrid/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nagrid {

/// A SUMMA-style schedule: which index labels are distributed on which
/// grid dimension, plus the panel width of the sequentially iterated
/// contracted label.
///
/// Unassigned labels are iterated sequentially (the panel loop). An
/// operand is distributed over dimension i iff one of its labels is
/// assigned to i; otherwise its data is broadcast (inputs) or reduced
/// (output) along dimension-i fibers.
///
/// Validity, beyond one-dimension-per-label:
///  - every dimension with p_i > 1 hosts at least one label and no
///    dimension hosts two (blocked loops must cover the index space
///    exactly once),
///  - each tensor is communicated along at most one dimension with
///    p_i > 1 (all collectives stay within a single fiber family per
///    operand, so every word crosses that dimension exactly once).
class SchedulePlan {
public:
  /// dim_labels[i] holds the labels assigned to grid dimension i.
  /// panel_width 0 selects the default: one owner block per step for the
  /// iterated contracted label, or the full extent if there is none.
  static SchedulePlan make(ContractionSpec spec, ProcessorGrid grid,
                           std::vector<std::string> dim_labels,
                           std::int64_t panel_width = 0);

  const ContractionSpec& spec() const { return spec_; }
  const ProcessorGrid& grid() const { return grid_; }
  const std::vector<std::string>& dim_labels() const { return dim_labels_; }
  std::int64_t panel_width() const { return panel_width_; }

  /// Grid dimension a label is assigned to, or -1 if iterated.
  int dim_of(char label) const;

  /// True iff some label of the operand is assigned to dimension i.
  bool distributed_over(const std::string& indices, int i) const;

  /// The single dimension (p_i > 1) along which the operand is
  /// broadcast/reduced, or nullopt if it is fully distributed.
  std::optional<int> communicated_dim(const std::string& indices) const;

  /// First contracted label that is iterated sequentially, if any.
  std::optional<char> iterated_label() const;

private:
  SchedulePlan(ContractionSpec spec, ProcessorGrid grid,
               std::vector<std::string> dim_labels, std::int64_t panel_width);

  ContractionSpec spec_;
  ProcessorGrid grid_;
  std::vector<std::string> dim_labels_;
  std::int64_t panel_width_;
};

}  // namespace nagrid
