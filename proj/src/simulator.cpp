// SPDX-License-Identifier: Apache-2.0

#include "nagrid/simulator.hpp"

#include "nagrid/volume.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nagrid {

namespace {

struct LabelRange {
  std::int64_t begin = 0;
  std::int64_t end = 0;
  std::int64_t width() const { return end - begin; }
};

// Per-label index ranges one grid coordinate owns of an operand:
// assigned labels restricted to their dimension block, everything else
// full. These are also the ranges the coordinate's multiply touches
// after the broadcast round.
std::vector<LabelRange> compute_ranges(const SchedulePlan& plan,
                                       const std::string& indices,
                                       std::span<const int> coord) {
  std::vector<LabelRange> ranges;
  ranges.reserve(indices.size());
  for (char label : indices) {
    const std::int64_t extent = plan.spec().extent(label);
    const int dim = plan.dim_of(label);
    if (dim < 0) {
      ranges.push_back({0, extent});
    } else {
      const std::int64_t block = extent / plan.grid().dim(dim);
      const std::int64_t c = coord[static_cast<std::size_t>(dim)];
      ranges.push_back({c * block, (c + 1) * block});
    }
  }
  return ranges;
}

void check_divisibility(const SchedulePlan& plan) {
  for (int i = 0; i < plan.grid().order(); ++i) {
    for (char label : plan.dim_labels()[static_cast<std::size_t>(i)]) {
      if (plan.spec().extent(label) % plan.grid().dim(i) != 0) {
        throw std::domain_error(std::string("extent of label '") + label +
                                "' not divisible by grid dimension " +
                                std::to_string(i + 1));
      }
    }
  }
}

void check_finite(const DenseTensor& t, const char* name) {
  for (double v : t.data) {
    if (!std::isfinite(v)) {
      throw std::domain_error(std::string("non-finite input in ") + name);
    }
  }
}

void check_operand(const ContractionSpec& spec, const DenseTensor& t,
                   const std::string& indices, const char* name) {
  if (t.labels != indices) {
    throw std::invalid_argument(std::string(name) + " labels do not match spec");
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (t.extents[i] != spec.extent(indices[i])) {
      throw std::invalid_argument(std::string(name) + " extents do not match spec");
    }
  }
  check_finite(t, name);
}

// Labels summed away, in reference order: first appearance in A, then
// any remaining summed labels of B.
std::string summed_labels(const ContractionSpec& spec) {
  std::string summed;
  for (const std::string* indices : {&spec.a_indices(), &spec.b_indices()}) {
    for (char label : *indices) {
      if (!spec.has_label(spec.c_indices(), label) &&
          summed.find(label) == std::string::npos) {
        summed += label;
      }
    }
  }
  return summed;
}

// Walks an odometer over [ranges]; calls fn with the current index
// vector. Last position varies fastest.
template <typename Fn>
void for_each_index(std::span<const LabelRange> ranges, std::vector<std::int64_t>& idx,
                    std::size_t pos, Fn&& fn) {
  if (pos == ranges.size()) {
    fn();
    return;
  }
  for (std::int64_t v = ranges[pos].begin; v < ranges[pos].end; ++v) {
    idx[pos] = v;
    for_each_index(ranges, idx, pos + 1, fn);
  }
}

}  // namespace

DistributedTensor::DistributedTensor(const SchedulePlan& plan,
                                     const DenseTensor& global)
    : labels_(global.labels), extents_(global.extents) {
  const ProcessorGrid& grid = plan.grid();
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int dim = plan.dim_of(labels_[i]);
    if (dim >= 0 && extents_[i] % grid.dim(dim) != 0) {
      throw std::domain_error(std::string("extent of label '") + labels_[i] +
                              "' not divisible by its grid dimension");
    }
  }

  const auto comm = plan.communicated_dim(labels_);
  std::vector<int> label_dim(labels_.size(), -1);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    label_dim[i] = plan.dim_of(labels_[i]);
  }
  bool completed = false;
  if (comm) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (label_dim[i] < 0 && extents_[i] % grid.dim(*comm) == 0) {
        label_dim[i] = *comm;
        completed = true;
        break;
      }
    }
  }

  blocks_.resize(static_cast<std::size_t>(grid.size()));
  ranges_.resize(static_cast<std::size_t>(grid.size()));
  std::vector<std::int64_t> idx(labels_.size());
  for (std::int64_t r = 0; r < grid.size(); ++r) {
    const auto coord = grid.coord_of(r);
    auto& ranges = ranges_[static_cast<std::size_t>(r)];
    ranges.assign(labels_.size(), {0, 0});
    // Without a completed label the operand lives at the base coordinate
    // of the communicated dimension only.
    if (comm && !completed && coord[static_cast<std::size_t>(*comm)] != 0) continue;
    std::vector<LabelRange> walk(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (label_dim[i] < 0) {
        ranges[i] = {0, extents_[i]};
      } else {
        const std::int64_t block = extents_[i] / grid.dim(label_dim[i]);
        const std::int64_t c = coord[static_cast<std::size_t>(label_dim[i])];
        ranges[i] = {c * block, (c + 1) * block};
      }
      walk[i] = {ranges[i].first, ranges[i].second};
    }
    auto& block = blocks_[static_cast<std::size_t>(r)];
    for_each_index(walk, idx, 0, [&] { block.push_back(global.at(idx)); });
  }
}

std::int64_t DistributedTensor::local_words(std::int64_t rank) const {
  return static_cast<std::int64_t>(blocks_[static_cast<std::size_t>(rank)].size());
}

const std::vector<double>& DistributedTensor::local_block(std::int64_t rank) const {
  return blocks_[static_cast<std::size_t>(rank)];
}

const std::vector<std::pair<std::int64_t, std::int64_t>>&
DistributedTensor::block_ranges(std::int64_t rank) const {
  return ranges_[static_cast<std::size_t>(rank)];
}

DenseTensor DistributedTensor::gather() const {
  DenseTensor out(labels_, extents_);
  std::vector<std::int64_t> idx(labels_.size());
  for (std::size_t r = 0; r < blocks_.size(); ++r) {
    std::vector<LabelRange> walk(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      walk[i] = {ranges_[r][i].first, ranges_[r][i].second};
    }
    std::size_t cursor = 0;
    for_each_index(walk, idx, 0, [&] { out.at(idx) = blocks_[r][cursor++]; });
  }
  return out;
}

DenseTensor reference_contract(const ContractionSpec& spec, const DenseTensor& a,
                               const DenseTensor& b) {
  check_operand(spec, a, spec.a_indices(), "A");
  check_operand(spec, b, spec.b_indices(), "B");

  const std::string& out_labels = spec.c_indices();
  const std::string summed = summed_labels(spec);

  std::vector<std::int64_t> out_extents;
  for (char label : out_labels) out_extents.push_back(spec.extent(label));
  DenseTensor c(out_labels, out_extents);

  std::vector<LabelRange> out_ranges, sum_ranges;
  for (char label : out_labels) out_ranges.push_back({0, spec.extent(label)});
  for (char label : summed) sum_ranges.push_back({0, spec.extent(label)});

  std::vector<std::int64_t> out_idx(out_labels.size());
  std::vector<std::int64_t> sum_idx(summed.size());
  std::vector<std::int64_t> a_idx(a.labels.size());
  std::vector<std::int64_t> b_idx(b.labels.size());

  const auto value_of = [&](char label) {
    const auto o = out_labels.find(label);
    if (o != std::string::npos) return out_idx[o];
    return sum_idx[summed.find(label)];
  };

  for_each_index(out_ranges, out_idx, 0, [&] {
    double acc = 0.0;
    for_each_index(sum_ranges, sum_idx, 0, [&] {
      for (std::size_t i = 0; i < a.labels.size(); ++i) a_idx[i] = value_of(a.labels[i]);
      for (std::size_t i = 0; i < b.labels.size(); ++i) b_idx[i] = value_of(b.labels[i]);
      acc += a.at(a_idx) * b.at(b_idx);
    });
    c.at(out_idx) = acc;
  });
  return c;
}

SimulationResult simulate_contraction(const SchedulePlan& plan,
                                      const NodeMapping& mapping,
                                      const DenseTensor& a, const DenseTensor& b) {
  const ContractionSpec& spec = plan.spec();
  const ProcessorGrid& grid = plan.grid();
  if (!(mapping.grid() == grid)) {
    throw std::domain_error("mapping grid does not match plan grid");
  }
  check_operand(spec, a, spec.a_indices(), "A");
  check_operand(spec, b, spec.b_indices(), "B");
  check_divisibility(plan);

  SimulationResult result;
  result.report.ranks_per_node = mapping.ranks_per_node();
  result.report.mapping_kind = mapping.kind();
  result.report.per_dimension.assign(static_cast<std::size_t>(grid.order()),
                                     DimensionTraffic{});
  for (int i = 0; i < grid.order(); ++i) {
    result.report.per_dimension[static_cast<std::size_t>(i)].dimension = i;
  }

  // Initial blocked layouts; block sizes drive the stage payloads.
  const DistributedTensor dist_a(plan, a);
  const DistributedTensor dist_b(plan, b);

  // Communication rounds. Broadcasts for the inputs, a reduction for the
  // output, all along the single fiber family each operand lacks. Every
  // fiber moves the union of its ranks' blocks once: w*(q-1) words cross
  // node boundaries, w*(p_i - q) stay inside nodes.
  const auto count_stage = [&](const std::string& indices,
                               const DistributedTensor& dist) {
    const auto comm = plan.communicated_dim(indices);
    if (!comm) return;
    const int i = *comm;
    auto& dim_traffic = result.report.per_dimension[static_cast<std::size_t>(i)];
    for (std::int64_t f = 0; f < grid.fiber_count(i); ++f) {
      const auto coords = grid.fiber_coords(i, f);
      std::int64_t chunk = 0;
      for (const auto& coord : coords) chunk += dist.local_words(grid.rank_of(coord));
      // Nodes in order of first appearance along the fiber; words relay
      // through this chain, entering each node once.
      std::vector<std::int64_t> chain;
      std::vector<std::int64_t> ranks_per_node;
      for (const auto& coord : coords) {
        const std::int64_t node = mapping.node_of(coord);
        const auto it = std::find(chain.begin(), chain.end(), node);
        if (it == chain.end()) {
          chain.push_back(node);
          ranks_per_node.push_back(1);
        } else {
          ++ranks_per_node[static_cast<std::size_t>(it - chain.begin())];
        }
      }
      const auto q = static_cast<std::int64_t>(chain.size());
      const auto len = static_cast<std::int64_t>(coords.size());
      result.report.measured_inter_node += chunk * (q - 1);
      result.report.measured_intra_node += chunk * (len - q);
      dim_traffic.measured += chunk * (q - 1);
      for (std::size_t n = 0; n + 1 < chain.size(); ++n) {
        result.node_pair_words[{chain[n], chain[n + 1]}] += chunk;
      }
      for (std::size_t n = 0; n < chain.size(); ++n) {
        if (ranks_per_node[n] > 1) {
          result.node_pair_words[{chain[n], chain[n]}] +=
              chunk * (ranks_per_node[n] - 1);
        }
      }
    }
  };
  count_stage(spec.a_indices(), dist_a);
  count_stage(spec.b_indices(), dist_b);

  const FiberWords words = fiber_words(plan);
  const auto predicted = predicted_volume_by_dim(words, mapping);
  for (int i = 0; i < grid.order(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    result.report.per_dimension[idx].predicted = predicted[idx];
    result.report.predicted_inter_node += predicted[idx];
  }

  // Compute round. Each coordinate contracts its blocks; partials are
  // reduced in ascending coordinate order along the output's lacked
  // dimension, which keeps the summation order independent of the node
  // mapping.
  std::vector<std::int64_t> out_extents;
  for (char label : spec.c_indices()) out_extents.push_back(spec.extent(label));
  DenseTensor c(spec.c_indices(), out_extents);

  const std::string summed = summed_labels(spec);

  std::vector<int> coord(static_cast<std::size_t>(grid.order()), 0);
  std::vector<std::int64_t> out_idx(spec.c_indices().size());
  std::vector<std::int64_t> sum_idx(summed.size());
  std::vector<std::int64_t> a_idx(a.labels.size());
  std::vector<std::int64_t> b_idx(b.labels.size());

  const auto value_of = [&](char label) {
    const auto o = spec.c_indices().find(label);
    if (o != std::string::npos) return out_idx[o];
    return sum_idx[summed.find(label)];
  };

  // Coordinates in rank order: for a fixed output region the visits along
  // the reduce dimension ascend, fixing the summation order.
  for (std::int64_t r = 0; r < grid.size(); ++r) {
    coord = grid.coord_of(r);
    const auto out_ranges = compute_ranges(plan, spec.c_indices(), coord);
    std::vector<LabelRange> sum_ranges;
    for (char label : summed) {
      sum_ranges.push_back(compute_ranges(plan, std::string(1, label), coord).front());
    }
    for_each_index(out_ranges, out_idx, 0, [&] {
      double acc = 0.0;
      for_each_index(sum_ranges, sum_idx, 0, [&] {
        for (std::size_t i = 0; i < a.labels.size(); ++i) a_idx[i] = value_of(a.labels[i]);
        for (std::size_t i = 0; i < b.labels.size(); ++i) b_idx[i] = value_of(b.labels[i]);
        acc += a.at(a_idx) * b.at(b_idx);
      });
      c.at(out_idx) += acc;
    });
  }

  // Reduction round for the output, payloads from its final layout.
  count_stage(spec.c_indices(), DistributedTensor(plan, c));

  result.c = std::move(c);
  return result;
}

std::int64_t measure_redistribution(const std::vector<std::int64_t>& perm,
                                    const NodeMapping& from, const NodeMapping& to,
                                    std::int64_t local_size) {
  if (!(from.grid() == to.grid()) || from.ranks_per_node() != to.ranks_per_node()) {
    throw std::domain_error("redistribution requires matching grids");
  }
  const std::int64_t p = from.grid().size();
  if (static_cast<std::int64_t>(perm.size()) != p) {
    throw std::domain_error("permutation length does not match grid");
  }
  std::vector<bool> seen(static_cast<std::size_t>(p), false);
  std::int64_t moved = 0;
  const int m = from.ranks_per_node();
  for (std::int64_t r = 0; r < p; ++r) {
    const std::int64_t target = perm[static_cast<std::size_t>(r)];
    if (target < 0 || target >= p || seen[static_cast<std::size_t>(target)]) {
      throw std::domain_error("redistribution is not a single round permutation");
    }
    seen[static_cast<std::size_t>(target)] = true;
    if (r / m != target / m) moved += local_size;
  }
  return moved;
}

double max_relative_error(const DenseTensor& value, const DenseTensor& reference) {
  if (value.data.size() != reference.data.size()) {
    throw std::invalid_argument("tensor shapes differ");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < value.data.size(); ++i) {
    const double denom = std::max(std::abs(reference.data[i]), 1.0);
    worst = std::max(worst, std::abs(value.data[i] - reference.data[i]) / denom);
  }
  return worst;
}

}  // namespace nagrid
