// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nagrid/mapper.hpp"
#include "nagrid/scenarios.hpp"
#include "nagrid/simulator.hpp"
#include "nagrid/volume.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <set>

using namespace nagrid;

namespace {

DenseTensor random_operand(const ContractionSpec& spec, const std::string& indices,
                           Rng& rng) {
  std::vector<std::int64_t> extents;
  for (char label : indices) extents.push_back(spec.extent(label));
  DenseTensor t(indices, extents);
  fill_uniform(t, rng);
  return t;
}

}  // namespace

TEST_CASE("reference contraction on hand cases") {
  SUBCASE("1x1x1 multiply") {
    ContractionSpec spec("mk", "kn", "mn", {{'m', 1}, {'n', 1}, {'k', 1}});
    DenseTensor a("mk", {1, 1});
    DenseTensor b("kn", {1, 1});
    a.data[0] = 3.0;
    b.data[0] = -4.0;
    CHECK(reference_contract(spec, a, b).data[0] == -12.0);
  }
  SUBCASE("zero input annihilates") {
    ContractionSpec spec("mk", "kn", "mn", {{'m', 2}, {'n', 2}, {'k', 2}});
    DenseTensor a("mk", {2, 2});
    DenseTensor b("kn", {2, 2});
    Rng rng(1);
    fill_uniform(b, rng);
    for (double v : reference_contract(spec, a, b).data) CHECK(v == 0.0);
  }
  SUBCASE("2x2 numeric case") {
    ContractionSpec spec("mk", "kn", "mn", {{'m', 2}, {'n', 2}, {'k', 2}});
    DenseTensor a("mk", {2, 2});
    DenseTensor b("kn", {2, 2});
    a.data = {1, 2, 3, 4};
    b.data = {5, 6, 7, 8};
    CHECK(reference_contract(spec, a, b).data == std::vector<double>{19, 22, 43, 50});
  }
}

TEST_CASE("identity times B echoes B under any mapping") {
  ContractionSpec spec("mk", "kn", "mn", {{'m', 4}, {'n', 4}, {'k', 4}});
  DenseTensor a = DenseTensor::identity(4, "mk");
  Rng rng(9);
  DenseTensor b = random_operand(spec, "kn", rng);
  SchedulePlan plan = SchedulePlan::make(spec, ProcessorGrid({2, 2}), {"m", "n"});

  for (const NodeMapping& mapping :
       {NodeMapping::make_default(ProcessorGrid({2, 2}), 2),
        NodeMapping::node_aware(ProcessorGrid({2, 2}), 2, {2, 1})}) {
    const SimulationResult sim = simulate_contraction(plan, mapping, a, b);
    CHECK(sim.c.data == b.data);
    CHECK(sim.report.measured_inter_node == sim.report.predicted_inter_node);
  }
}

TEST_CASE("square 16 on 4x4: default vs node-aware counter ratio is 3:2") {
  ContractionSpec spec = mmm_scenario(MmmKind::Square, 16);
  ProcessorGrid grid({4, 4});
  SchedulePlan plan = SchedulePlan::make(spec, grid, {"m", "n"});
  Rng rng(2);
  DenseTensor a = random_operand(spec, "mk", rng);
  DenseTensor b = random_operand(spec, "kn", rng);

  const SimulationResult def =
      simulate_contraction(plan, NodeMapping::make_default(grid, 4), a, b);
  const SimulationResult aware = simulate_contraction(
      plan, NodeMapping::node_aware(grid, 4, {2, 2}), a, b);

  CHECK(def.report.measured_inter_node == 768);
  CHECK(aware.report.measured_inter_node == 512);
  CHECK(def.report.measured_inter_node == def.report.predicted_inter_node);
  CHECK(aware.report.measured_inter_node == aware.report.predicted_inter_node);

  // model ratio equals measured ratio, and C is bit-identical
  CHECK(def.c.data == aware.c.data);

  const DenseTensor ref = reference_contract(spec, a, b);
  CHECK(max_relative_error(def.c, ref) <= 1e-12);
}

TEST_CASE("drccd ring contraction matches the reference oracle") {
  ContractionSpec spec = drccd_scenario(4, 8);
  ProcessorGrid grid({2, 2, 2, 1});
  SchedulePlan plan = standard_plan(spec, grid);
  Rng rng(3);
  DenseTensor v = random_operand(spec, "icak", rng);
  DenseTensor t = random_operand(spec, "kjcb", rng);

  const SimulationResult sim =
      simulate_contraction(plan, NodeMapping::node_aware(grid, 4, {2, 2, 1, 1}), v, t);
  const DenseTensor ref = reference_contract(spec, v, t);
  CHECK(max_relative_error(sim.c, ref) <= 1e-12);
  CHECK(sim.report.measured_inter_node == sim.report.predicted_inter_node);
}

TEST_CASE("measured counters equal the model per dimension") {
  Rng rng(4);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::int64_t base = 4 + 4 * static_cast<std::int64_t>(rng.next_u64() % 3);
    const auto kind = static_cast<MmmKind>(rng.next_u64() % 4);
    ContractionSpec spec = mmm_scenario(kind, base);

    std::vector<int> dims;
    std::int64_t total = 1;
    for (int i = 0; i < 3; ++i) {
      const int d = 1 << (rng.next_u64() % 3);
      if (total * d <= 64) {
        dims.push_back(d);
        total *= d;
      } else {
        dims.push_back(1);
      }
    }
    ProcessorGrid grid(dims);
    SchedulePlan plan = standard_plan(spec, grid);
    bool divisible = true;
    for (int i = 0; i < grid.order(); ++i) {
      for (char label : plan.dim_labels()[static_cast<std::size_t>(i)]) {
        if (spec.extent(label) % grid.dim(i) != 0) divisible = false;
      }
    }
    if (!divisible) continue;

    const auto tuples = enumerate_factorizations(4, grid);
    if (grid.size() % 4 != 0 || tuples.empty()) continue;
    const auto& intra = tuples[rng.next_u64() % tuples.size()];
    NodeMapping mapping = NodeMapping::node_aware(grid, 4, intra);

    DenseTensor a = random_operand(spec, "mk", rng);
    DenseTensor b = random_operand(spec, "kn", rng);
    const SimulationResult sim = simulate_contraction(plan, mapping, a, b);

    const FiberWords words = fiber_words(plan);
    for (int i = 0; i < grid.order(); ++i) {
      const auto idx = static_cast<std::size_t>(i);
      const std::int64_t expected = broadcast_volume(
          words.words[idx], grid.dim(i) / intra[idx]);
      CHECK(sim.report.per_dimension[idx].measured == expected);
      CHECK(sim.report.per_dimension[idx].predicted == expected);
    }
    CHECK(sim.report.measured_inter_node ==
          communication_volume(words, grid, intra));

    // rank-level total: inter + intra = sum_i W_i (p_i - 1)
    std::int64_t rank_level = 0;
    for (int i = 0; i < grid.order(); ++i) {
      rank_level += broadcast_volume(words.words[static_cast<std::size_t>(i)],
                                     grid.dim(i));
    }
    CHECK(sim.report.measured_inter_node + sim.report.measured_intra_node ==
          rank_level);
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("wrapped default placements still match the per-fiber prediction") {
  // On [3,2] with 2 ranks per node the consecutive fill is no intra
  // tuple: dimension-1 fibers wrap across node boundaries.
  ContractionSpec spec("mk", "kn", "mn", {{'m', 6}, {'n', 6}, {'k', 6}});
  ProcessorGrid grid({3, 2});
  SchedulePlan plan = SchedulePlan::make(spec, grid, {"m", "n"});
  CHECK(!default_equivalent_intra(grid, 2).has_value());

  Rng rng(19);
  DenseTensor a = random_operand(spec, "mk", rng);
  DenseTensor b = random_operand(spec, "kn", rng);
  const SimulationResult sim =
      simulate_contraction(plan, NodeMapping::make_default(grid, 2), a, b);
  CHECK(sim.report.measured_inter_node == 72);  // 36 + 36, every fiber spans 2 nodes
  CHECK(sim.report.measured_inter_node == sim.report.predicted_inter_node);
  CHECK(max_relative_error(sim.c, reference_contract(spec, a, b)) <= 1e-12);

  // property over mixed grids with non-power-of-two dimensions
  for (const auto& dims : {std::vector<int>{3, 2}, {2, 3, 2}, {6, 2}, {4, 3}, {3, 3}}) {
    ProcessorGrid g(dims);
    ContractionSpec s("mk", "kn", "mn", {{'m', 12}, {'n', 12}, {'k', 12}});
    SchedulePlan p = standard_plan(s, g);
    DenseTensor aa = random_operand(s, "mk", rng);
    DenseTensor bb = random_operand(s, "kn", rng);
    for (int m = 1; m <= g.size(); ++m) {
      if (g.size() % m != 0) continue;
      const SimulationResult r =
          simulate_contraction(p, NodeMapping::make_default(g, m), aa, bb);
      CHECK(r.report.measured_inter_node == r.report.predicted_inter_node);
    }
  }
}

TEST_CASE("total communicated words are independent of panel width") {
  ContractionSpec spec = mmm_scenario(MmmKind::Square, 16);
  ProcessorGrid grid({4, 4});
  NodeMapping mapping = NodeMapping::node_aware(grid, 4, {2, 2});
  Rng rng(6);
  DenseTensor a = random_operand(spec, "mk", rng);
  DenseTensor b = random_operand(spec, "kn", rng);

  std::set<std::int64_t> inter, intra;
  for (std::int64_t b_width : {1, 2, 8, 16}) {
    SchedulePlan plan = SchedulePlan::make(spec, grid, {"m", "n"}, b_width);
    const SimulationResult sim = simulate_contraction(plan, mapping, a, b);
    inter.insert(sim.report.measured_inter_node);
    intra.insert(sim.report.measured_intra_node);
  }
  CHECK(inter.size() == 1);
  CHECK(intra.size() == 1);
}

TEST_CASE("node pair ledger conserves words") {
  ContractionSpec spec = mmm_scenario(MmmKind::Square, 16);
  ProcessorGrid grid({4, 4});
  SchedulePlan plan = SchedulePlan::make(spec, grid, {"m", "n"});
  Rng rng(8);
  DenseTensor a = random_operand(spec, "mk", rng);
  DenseTensor b = random_operand(spec, "kn", rng);

  for (const NodeMapping& mapping :
       {NodeMapping::make_default(grid, 4), NodeMapping::node_aware(grid, 4, {2, 2}),
        NodeMapping::node_aware(grid, 4, {4, 1})}) {
    const SimulationResult sim = simulate_contraction(plan, mapping, a, b);
    std::int64_t cross = 0, inside = 0;
    for (const auto& [pair, words] : sim.node_pair_words) {
      CHECK(words > 0);
      if (pair.first == pair.second) {
        inside += words;
      } else {
        cross += words;
      }
    }
    CHECK(cross == sim.report.measured_inter_node);
    CHECK(inside == sim.report.measured_intra_node);
  }
}

TEST_CASE("gathering distributed blocks reconstructs the global tensor") {
  Rng rng(14);
  const auto roundtrip = [&](const ContractionSpec& spec, const ProcessorGrid& grid) {
    const SchedulePlan plan = standard_plan(spec, grid);
    for (const std::string* indices :
         {&spec.a_indices(), &spec.b_indices(), &spec.c_indices()}) {
      DenseTensor global = random_operand(spec, *indices, rng);
      const DistributedTensor dist(plan, global);
      std::int64_t held = 0;
      for (std::int64_t r = 0; r < grid.size(); ++r) held += dist.local_words(r);
      CHECK(held == global.size());
      CHECK(dist.gather().data == global.data);
    }
  };
  // completion available (k splits over the communicated dimension)
  roundtrip(mmm_scenario(MmmKind::Square, 16), ProcessorGrid({4, 4}));
  // no completion: operands fully assigned on the replicated grid live at
  // the base coordinate of the dimension they lack
  roundtrip(mmm_scenario(MmmKind::Square, 16), ProcessorGrid({2, 2, 2}));
  roundtrip(drccd_scenario(4, 8), ProcessorGrid({2, 2, 2, 1}));
}

TEST_CASE("divisibility violations and bad input are rejected") {
  ContractionSpec spec("mk", "kn", "mn", {{'m', 6}, {'n', 6}, {'k', 6}});
  ProcessorGrid grid({4, 2});
  SchedulePlan plan = SchedulePlan::make(spec, grid, {"m", "n"});
  DenseTensor a("mk", {6, 6});
  DenseTensor b("kn", {6, 6});
  NodeMapping mapping = NodeMapping::make_default(grid, 2);
  CHECK_THROWS_AS(simulate_contraction(plan, mapping, a, b), std::domain_error);

  ProcessorGrid ok({2, 2});
  SchedulePlan plan_ok = SchedulePlan::make(spec, ok, {"m", "n"});
  a.data[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(
      simulate_contraction(plan_ok, NodeMapping::make_default(ok, 2), a, b),
      std::domain_error);
}

TEST_CASE("redistribution when every rank changes node") {
  // reversal on 8 ranks, 2 per node: every source and target node differ
  ProcessorGrid grid({8});
  NodeMapping def = NodeMapping::make_default(grid, 2);
  std::vector<std::int64_t> reversal;
  for (std::int64_t r = 0; r < 8; ++r) reversal.push_back(7 - r);
  CHECK(measure_redistribution(reversal, def, def, 16) == 128);

  std::vector<std::int64_t> broken{0, 0, 1, 2, 3, 4, 5, 6};
  CHECK_THROWS_AS(measure_redistribution(broken, def, def, 16), std::domain_error);
}

TEST_CASE("redistribution measurement agrees with a brute-force count") {
  Rng rng(12);
  int identity_checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> dims;
    std::int64_t total = 1;
    for (int i = 0, order = 1 + static_cast<int>(rng.next_u64() % 3); i < order; ++i) {
      const int d = 1 + static_cast<int>(rng.next_u64() % 4);
      if (total * d <= 64) {
        dims.push_back(d);
        total *= d;
      } else {
        dims.push_back(1);
      }
    }
    ProcessorGrid grid(dims);
    std::vector<int> ms;
    for (int m = 1; m <= grid.size(); ++m) {
      if (grid.size() % m == 0) ms.push_back(m);
    }
    const int m = ms[rng.next_u64() % ms.size()];
    const auto tuples = enumerate_factorizations(m, grid);

    const auto pick = [&]() -> NodeMapping {
      if (!tuples.empty() && rng.next_u64() % 2 == 0) {
        return NodeMapping::node_aware(grid, m, tuples[rng.next_u64() % tuples.size()]);
      }
      return NodeMapping::make_default(grid, m);
    };
    NodeMapping from = pick();
    NodeMapping to = pick();

    const auto perm = redistribute_plan(from, to);
    std::set<std::int64_t> targets(perm.begin(), perm.end());
    REQUIRE(targets.size() == perm.size());

    const std::int64_t local = 1 + static_cast<std::int64_t>(rng.next_u64() % 32);
    std::int64_t expected = 0;
    for (std::int64_t r = 0; r < grid.size(); ++r) {
      if (r / m != perm[static_cast<std::size_t>(r)] / m) expected += local;
    }
    CHECK(measure_redistribution(perm, from, to, local) == expected);

    const auto self = redistribute_plan(from, from);
    CHECK(measure_redistribution(self, from, from, local) == 0);
    ++identity_checked;
  }
  CHECK(identity_checked == 100);
}

TEST_CASE("numerical agreement across fifty random configurations") {
  Rng rng(21);
  int checked = 0;
  for (int guard = 0; checked < 50 && guard < 5000; ++guard) {
    ContractionSpec spec = [&]() {
      switch (rng.next_u64() % 3) {
        case 0: {
          const std::int64_t e = 2 + 2 * static_cast<std::int64_t>(rng.next_u64() % 8);
          return mmm_scenario(static_cast<MmmKind>(rng.next_u64() % 4),
                              std::min<std::int64_t>(e, 16));
        }
        case 1:
          return drccd_scenario(4, 8);
        default:
          return drccd_scenario(1 + static_cast<std::int64_t>(rng.next_u64() % 4),
                                1 + static_cast<std::int64_t>(rng.next_u64() % 8));
      }
    }();

    const int order = 2 + static_cast<int>(rng.next_u64() % 2);
    std::vector<int> dims;
    std::int64_t total = 1;
    for (int i = 0; i < order; ++i) {
      const int d = 1 << (rng.next_u64() % 3);
      if (total * d <= 32) {
        dims.push_back(d);
        total *= d;
      } else {
        dims.push_back(1);
      }
    }
    ProcessorGrid grid(dims);

    std::optional<SchedulePlan> plan;
    try {
      plan = standard_plan(spec, grid);
    } catch (const std::invalid_argument&) {
      continue;
    }
    bool divisible = true;
    for (int i = 0; i < grid.order(); ++i) {
      for (char label : plan->dim_labels()[static_cast<std::size_t>(i)]) {
        if (spec.extent(label) % grid.dim(i) != 0) divisible = false;
      }
    }
    if (!divisible) continue;

    std::vector<int> ms;
    for (int m = 1; m <= grid.size(); ++m) {
      if (grid.size() % m == 0) ms.push_back(m);
    }
    const int m = ms[rng.next_u64() % ms.size()];
    const auto tuples = enumerate_factorizations(m, grid);
    NodeMapping mapping =
        tuples.empty() || rng.next_u64() % 2 == 0
            ? NodeMapping::make_default(grid, m)
            : NodeMapping::node_aware(grid, m, tuples[rng.next_u64() % tuples.size()]);

    DenseTensor a = random_operand(spec, spec.a_indices(), rng);
    DenseTensor b = random_operand(spec, spec.b_indices(), rng);
    const SimulationResult sim = simulate_contraction(*plan, mapping, a, b);
    const DenseTensor ref = reference_contract(spec, a, b);
    CHECK(max_relative_error(sim.c, ref) <= 1e-12);
    CHECK(sim.report.measured_inter_node == sim.report.predicted_inter_node);
    ++checked;
  }
  CHECK(checked == 50);
}
