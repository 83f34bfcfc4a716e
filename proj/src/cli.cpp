// SPDX-License-Identifier: Apache-2.0

#include "nagrid/cli.hpp"

#include "nagrid/mapper.hpp"
#include "nagrid/scenarios.hpp"
#include "nagrid/simulator.hpp"
#include "nagrid/volume.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace nagrid {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> dims;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, 'x')) dims.push_back(std::stoi(part));
  if (dims.empty()) throw CLI::ValidationError("--grid", "expected AxBxC form");
  return dims;
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> values;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, ',')) {
    values.push_back(static_cast<T>(std::stoll(part)));
  }
  return values;
}

std::string join(const std::vector<int>& values, char sep) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << sep;
    out << values[i];
  }
  return out.str();
}

std::string join64(const std::vector<std::int64_t>& values, char sep) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << sep;
    out << values[i];
  }
  return out.str();
}

std::string format_ratio(double ratio) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << ratio;
  return out.str();
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    file << text;
  }
}

double improvement_ratio(std::int64_t default_volume, std::int64_t aware_volume) {
  if (aware_volume == 0) return default_volume == 0 ? 1.0 : 0.0;
  return static_cast<double>(default_volume) / static_cast<double>(aware_volume);
}

// Granularity that guarantees some dims-way factorization of `ranks`
// divides any multiple: the odd part whole, the power of two balanced.
std::int64_t grid_granularity(std::int64_t ranks, int dims) {
  std::int64_t odd = ranks;
  int two = 0;
  while (odd % 2 == 0) {
    odd /= 2;
    ++two;
  }
  return odd << ((two + dims - 1) / dims);
}

// ---- plan ---------------------------------------------------------------

struct PlanArgs {
  std::string grid;
  int ranks_per_node = 1;
  std::string words;
  double threshold = 0.0;
  std::string format = "text";
  std::string out_path;
};

int run_plan(const PlanArgs& args, std::ostream& out) {
  ProcessorGrid grid(parse_grid(args.grid));
  FiberWords words{parse_list<std::int64_t>(args.words)};
  if (static_cast<int>(words.words.size()) != grid.order()) {
    throw CLI::ValidationError("--words", "need one value per grid dimension");
  }

  const std::int64_t p = grid.size();
  json report;
  report["grid"] = join(grid.dims(), 'x');
  report["ranks_per_node"] = args.ranks_per_node;
  report["words"] = words.words;

  std::string intra_text = "-";
  std::int64_t default_volume = 0;
  std::int64_t aware_volume = 0;
  bool fallback = true;

  if (p % args.ranks_per_node == 0) {
    const NodeMapping def = NodeMapping::make_default(grid, args.ranks_per_node);
    default_volume = predicted_volume(words, def);
    const ChosenMapping chosen = choose_mapping(words, grid, args.ranks_per_node);
    fallback = chosen.fallback;
    aware_volume = fallback ? default_volume : chosen.volume;
    if (!fallback) intra_text = join(chosen.mapping.intra(), 'x');
  }
  // p % m != 0: no node partition exists, keep the default placement.

  const double ratio = improvement_ratio(default_volume, aware_volume);
  const bool redistribute =
      !fallback && should_redistribute(default_volume, aware_volume,
                                       words.total() / std::max<std::int64_t>(p, 1), p,
                                       args.threshold);

  report["intra"] = intra_text;
  report["default_volume"] = default_volume;
  report["node_aware_volume"] = aware_volume;
  report["ratio"] = ratio;
  report["fallback"] = fallback;
  report["redistribute"] = redistribute;

  if (args.format == "json") {
    write_output(report.dump(2) + "\n", args.out_path, out);
  } else {
    std::ostringstream text;
    text << "grid " << report["grid"].get<std::string>() << ", " << args.ranks_per_node
         << " ranks/node\n";
    text << "intra-node grid: " << intra_text << (fallback ? " (fallback)" : "")
         << "\n";
    text << "inter-node volume: default " << default_volume << ", node-aware "
         << aware_volume << " words\n";
    text << "ratio: " << format_ratio(ratio) << "\n";
    text << "redistribute: " << (redistribute ? "yes" : "no") << "\n";
    write_output(text.str(), args.out_path, out);
  }
  return kExitOk;
}

// ---- simulate -----------------------------------------------------------

struct SimulateArgs {
  std::string kind = "square";
  std::int64_t base = 16;
  std::int64_t occupied = 4;
  std::int64_t virtuals = 8;
  std::string grid;
  int ranks_per_node = 1;
  std::string mapping = "aware";
  std::uint64_t seed = 1;
  int element_bytes = 8;
  std::string format = "text";
  std::string out_path;
};

ContractionSpec scenario_spec(const std::string& kind, std::int64_t base,
                              std::int64_t occupied, std::int64_t virtuals) {
  if (kind == "drccd") return drccd_scenario(occupied, virtuals);
  return mmm_scenario(mmm_kind_from_string(kind), base);
}

int run_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  const ContractionSpec spec =
      scenario_spec(args.kind, args.base, args.occupied, args.virtuals);
  ProcessorGrid grid(parse_grid(args.grid));
  const SchedulePlan plan = standard_plan(spec, grid);

  NodeMapping mapping = NodeMapping::make_default(grid, args.ranks_per_node);
  bool fallback = false;
  if (args.mapping == "aware") {
    const ChosenMapping chosen =
        choose_mapping(fiber_words(plan), grid, args.ranks_per_node);
    mapping = chosen.mapping;
    fallback = chosen.fallback;
  } else if (args.mapping != "default") {
    throw CLI::ValidationError("--mapping", "expected 'default' or 'aware'");
  }

  Rng rng(args.seed);
  DenseTensor a(spec.a_indices(), [&] {
    std::vector<std::int64_t> extents;
    for (char label : spec.a_indices()) extents.push_back(spec.extent(label));
    return extents;
  }());
  DenseTensor b(spec.b_indices(), [&] {
    std::vector<std::int64_t> extents;
    for (char label : spec.b_indices()) extents.push_back(spec.extent(label));
    return extents;
  }());
  fill_uniform(a, rng);
  fill_uniform(b, rng);

  const SimulationResult sim = simulate_contraction(plan, mapping, a, b);
  const DenseTensor ref = reference_contract(spec, a, b);
  const double error = max_relative_error(sim.c, ref);
  const MemoryEstimate memory = memory_estimate(plan);

  const bool counters_ok =
      sim.report.measured_inter_node == sim.report.predicted_inter_node;
  const bool numeric_ok = error <= 1e-12;

  json report;
  report["kind"] = args.kind;
  report["grid"] = join(grid.dims(), 'x');
  report["ranks_per_node"] = args.ranks_per_node;
  report["mapping"] = mapping.describe();
  report["fallback"] = fallback;
  report["seed"] = args.seed;
  report["predicted_inter_node"] = sim.report.predicted_inter_node;
  report["measured_inter_node"] = sim.report.measured_inter_node;
  report["measured_intra_node"] = sim.report.measured_intra_node;
  report["measured_inter_node_bytes"] =
      sim.report.measured_inter_node * args.element_bytes;
  report["max_relative_error"] = error;
  report["measured_equals_predicted"] = counters_ok;
  report["numeric_ok"] = numeric_ok;
  report["memory_local_words"] = memory.local_storage;
  report["memory_estimate_words"] = memory.total();
  report["memory_ratio"] = memory.ratio();
  json dims = json::array();
  for (const auto& d : sim.report.per_dimension) {
    dims.push_back({{"dimension", d.dimension + 1},
                    {"predicted", d.predicted},
                    {"measured", d.measured}});
  }
  report["per_dimension"] = dims;

  if (args.format == "json") {
    write_output(report.dump(2) + "\n", args.out_path, out);
  } else {
    std::ostringstream text;
    text << args.kind << " on " << report["grid"].get<std::string>() << ", "
         << mapping.describe() << ", " << args.ranks_per_node << " ranks/node\n";
    text << "measured==predicted: " << (counters_ok ? "true" : "false") << " ("
         << sim.report.measured_inter_node << " words inter-node, "
         << sim.report.measured_inter_node * args.element_bytes << " bytes)\n";
    text << "max relative error vs reference: " << std::scientific
         << std::setprecision(3) << error << "\n";
    text << "per-rank memory estimate: " << memory.total() << " words, "
         << std::fixed << std::setprecision(2) << memory.ratio()
         << "x local storage\n";
    write_output(text.str(), args.out_path, out);
  }

  if (!counters_ok || !numeric_ok) {
    err << "verification failed:";
    if (!counters_ok) {
      err << " measured " << sim.report.measured_inter_node << " != predicted "
          << sim.report.predicted_inter_node;
    }
    if (!numeric_ok) err << " max relative error " << error;
    err << "\n";
    return kExitVerification;
  }
  return kExitOk;
}

// ---- sweep --------------------------------------------------------------

struct SweepArgs {
  std::string kinds = "square";
  std::string nodes = "1";
  int ranks_per_node = 4;
  std::int64_t base = 16;
  std::string mode = "strong";
  std::int64_t per_rank_words = 0;
  std::uint64_t seed = 1;
  double threshold = 0.0;
  int grid_dims = 3;
  std::string format = "csv";
  std::string out_path;
};

struct SweepRow {
  std::string kind;
  std::int64_t nodes = 1;
  int ranks_per_node = 1;
  std::string grid;
  std::string intra;
  std::string mapping;
  std::vector<std::int64_t> words;
  std::int64_t predicted = 0;
  std::int64_t measured_inter = 0;
  std::int64_t measured_intra = 0;
  std::int64_t redist_words = 0;
  double ratio = 1.0;
};

int run_sweep(const SweepArgs& args, std::ostream& out) {
  const auto kind_names = [&] {
    std::vector<std::string> names;
    std::stringstream stream(args.kinds);
    std::string part;
    while (std::getline(stream, part, ',')) names.push_back(part);
    return names;
  }();
  const auto node_list = parse_list<std::int64_t>(args.nodes);

  std::vector<SweepRow> rows;
  for (const std::string& kind_name : kind_names) {
    const MmmKind kind = mmm_kind_from_string(kind_name);
    for (std::int64_t nodes : node_list) {
      const std::int64_t ranks = nodes * args.ranks_per_node;
      // Extents snap to a size the grid search can divide.
      const std::int64_t granularity = grid_granularity(ranks, args.grid_dims);

      ContractionSpec spec = mmm_scenario(
          kind, (args.base + granularity - 1) / granularity * granularity);
      if (args.mode == "weak") {
        const std::int64_t per_rank =
            args.per_rank_words > 0 ? args.per_rank_words
                                    : 3 * args.base * args.base / args.ranks_per_node;
        std::vector<std::int64_t> single{nodes};
        spec = scaling_sweep(kind, ScalingMode::Weak, per_rank, single,
                             args.ranks_per_node, granularity)[0]
                   .spec;
      } else if (args.mode != "strong") {
        throw CLI::ValidationError("--mode", "expected 'strong' or 'weak'");
      }

      const ProcessorGrid grid = choose_grid(spec, ranks, args.grid_dims);
      const SchedulePlan plan = standard_plan(spec, grid);
      const FiberWords words = fiber_words(plan);

      const NodeMapping def = NodeMapping::make_default(grid, args.ranks_per_node);
      const ChosenMapping chosen = choose_mapping(words, grid, args.ranks_per_node);

      Rng rng(args.seed);
      DenseTensor a(spec.a_indices(), [&] {
        std::vector<std::int64_t> extents;
        for (char label : spec.a_indices()) extents.push_back(spec.extent(label));
        return extents;
      }());
      DenseTensor b(spec.b_indices(), [&] {
        std::vector<std::int64_t> extents;
        for (char label : spec.b_indices()) extents.push_back(spec.extent(label));
        return extents;
      }());
      fill_uniform(a, rng);
      fill_uniform(b, rng);

      const SimulationResult def_sim = simulate_contraction(plan, def, a, b);

      // Benchmark-mode policy: redistribute whenever the node-aware
      // topology is strictly better at the given threshold.
      const std::int64_t local_size =
          (spec.size_a() + spec.size_b() + spec.size_c()) / grid.size();
      const bool redistribute =
          !chosen.fallback &&
          should_redistribute(def_sim.report.measured_inter_node, chosen.volume,
                              local_size, grid.size(), args.threshold);

      const NodeMapping& aware =
          redistribute ? chosen.mapping : def;
      const SimulationResult aware_sim =
          redistribute ? simulate_contraction(plan, aware, a, b) : def_sim;
      const std::int64_t redist_words =
          redistribute ? measure_redistribution(redistribute_plan(def, aware), def,
                                                aware, local_size)
                       : 0;

      const double ratio = improvement_ratio(def_sim.report.measured_inter_node,
                                             aware_sim.report.measured_inter_node);

      SweepRow def_row;
      def_row.kind = kind_name;
      def_row.nodes = nodes;
      def_row.ranks_per_node = args.ranks_per_node;
      def_row.grid = join(grid.dims(), 'x');
      def_row.intra = "-";
      def_row.mapping = "default";
      def_row.words = words.words;
      def_row.predicted = def_sim.report.predicted_inter_node;
      def_row.measured_inter = def_sim.report.measured_inter_node;
      def_row.measured_intra = def_sim.report.measured_intra_node;
      def_row.redist_words = 0;
      def_row.ratio = ratio;
      rows.push_back(def_row);

      SweepRow aware_row = def_row;
      aware_row.intra =
          redistribute ? join(chosen.mapping.intra(), 'x') : "-";
      aware_row.mapping = "aware";
      aware_row.predicted = aware_sim.report.predicted_inter_node;
      aware_row.measured_inter = aware_sim.report.measured_inter_node;
      aware_row.measured_intra = aware_sim.report.measured_intra_node;
      aware_row.redist_words = redist_words;
      rows.push_back(aware_row);
    }
  }

  if (args.format == "json") {
    json doc = json::array();
    for (const SweepRow& row : rows) {
      doc.push_back({{"kind", row.kind},
                     {"nodes", row.nodes},
                     {"ranks_per_node", row.ranks_per_node},
                     {"grid", row.grid},
                     {"intra", row.intra},
                     {"mapping", row.mapping},
                     {"W_list", row.words},
                     {"predicted_V", row.predicted},
                     {"measured_inter", row.measured_inter},
                     {"measured_intra", row.measured_intra},
                     {"redist_words", row.redist_words},
                     {"ratio", row.ratio}});
    }
    write_output(doc.dump(2) + "\n", args.out_path, out);
  } else {
    std::ostringstream csv;
    csv << "kind,nodes,ranks_per_node,grid,intra,mapping,W_list,predicted_V,"
           "measured_inter,measured_intra,redist_words,ratio\n";
    for (const SweepRow& row : rows) {
      csv << row.kind << ',' << row.nodes << ',' << row.ranks_per_node << ','
          << row.grid << ',' << row.intra << ',' << row.mapping << ','
          << join64(row.words, ';') << ',' << row.predicted << ','
          << row.measured_inter << ',' << row.measured_intra << ','
          << row.redist_words << ',' << std::fixed << std::setprecision(6)
          << row.ratio << "\n";
    }
    write_output(csv.str(), args.out_path, out);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"node-aware processor grid planning and traffic simulation"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  CLI::App* plan = app.add_subcommand(
      "plan", "choose the intra-node grid minimizing inter-node volume");
  plan->add_option("--grid", plan_args.grid, "processor grid, e.g. 8x8x1")->required();
  plan->add_option("--ranks-per-node", plan_args.ranks_per_node)->required();
  plan->add_option("--words", plan_args.words, "fiber words per dimension, e.g. 64,64,0")
      ->required();
  plan->add_option("--threshold", plan_args.threshold);
  plan->add_option("--format", plan_args.format)
      ->check(CLI::IsMember({"text", "json"}));
  plan->add_option("--out", plan_args.out_path);

  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "run one contraction and verify counters and numerics");
  simulate->add_option("--kind", sim_args.kind)
      ->check(CLI::IsMember({"square", "largeK", "largeM", "smallK", "drccd"}));
  simulate->add_option("--base", sim_args.base);
  simulate->add_option("--no", sim_args.occupied, "occupied orbitals (drccd)");
  simulate->add_option("--nv", sim_args.virtuals, "virtual orbitals (drccd)");
  simulate->add_option("--grid", sim_args.grid)->required();
  simulate->add_option("--ranks-per-node", sim_args.ranks_per_node)->required();
  simulate->add_option("--mapping", sim_args.mapping)
      ->check(CLI::IsMember({"default", "aware"}));
  simulate->add_option("--seed", sim_args.seed);
  simulate->add_option("--element-bytes", sim_args.element_bytes);
  simulate->add_option("--format", sim_args.format)
      ->check(CLI::IsMember({"text", "json"}));
  simulate->add_option("--out", sim_args.out_path);

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "tabulate default vs node-aware volume across scenarios");
  sweep->add_option("--kinds", sweep_args.kinds, "comma list of matrix kinds");
  sweep->add_option("--nodes", sweep_args.nodes, "comma list of node counts");
  sweep->add_option("--ranks-per-node", sweep_args.ranks_per_node);
  sweep->add_option("--base", sweep_args.base);
  sweep->add_option("--mode", sweep_args.mode)->check(CLI::IsMember({"strong", "weak"}));
  sweep->add_option("--per-rank-words", sweep_args.per_rank_words);
  sweep->add_option("--seed", sweep_args.seed);
  sweep->add_option("--threshold", sweep_args.threshold);
  sweep->add_option("--grid-dims", sweep_args.grid_dims)->check(CLI::Range(1, 4));
  sweep->add_option("--format", sweep_args.format)
      ->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--out", sweep_args.out_path);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and friends
      out << app.help();
      return kExitOk;
    }
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (plan->parsed()) return run_plan(plan_args, out);
    if (simulate->parsed()) return run_simulate(sim_args, out, err);
    if (sweep->parsed()) return run_sweep(sweep_args, out);
  } catch (const CLI::ValidationError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  err << "no subcommand given\n";
  return kExitUsage;
}

}  // namespace nagrid
