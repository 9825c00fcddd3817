// SPDX-License-Identifier: Apache-2.0
// Command-line front end: run, sweep and validate.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splitchain/error.hpp"
#include "splitchain/network.hpp"
#include "splitchain/optimizer.hpp"
#include "splitchain/profiles.hpp"
#include "splitchain/quantity.hpp"
#include "splitchain/report.hpp"
#include "splitchain/scenario.hpp"

namespace {

using namespace splitchain;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitBudget = 3;

struct Overrides {
  std::optional<std::string> epsilon;
  std::optional<int> t_max;
  std::optional<std::uint64_t> budget;
  std::optional<std::uint64_t> seed;
};

void apply(const Overrides& o, ScenarioFile& file) {
  if (o.epsilon) file.epsilon = parse_quantity(*o.epsilon);
  if (o.t_max) file.t_max = *o.t_max;
  if (o.budget) file.enumeration_budget = *o.budget;
  if (o.seed) file.seed = *o.seed;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--epsilon", o.epsilon, "Convergence tolerance in seconds (inf allowed)");
  cmd->add_option("--t-max", o.t_max, "Refinement iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--budget", o.budget, "Largest split count for exhaustive search");
  cmd->add_option("--seed", o.seed, "Seed for candidate draws");
}

void write_to(const std::optional<std::string>& path, const std::string& text, std::ostream& fallback) {
  if (!path) {
    fallback << text;
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + *path);
  out << text;
}

struct RunArgs {
  std::string scenario;
  std::string scheme = "bcd";
  std::optional<int> k;
  std::optional<int> b;
  std::optional<std::string> out;
  std::optional<std::string> graph;
  bool omit_timing = false;
  Overrides overrides;
};

int run(const RunArgs& args) {
  ScenarioFile file = load_scenario(args.scenario);
  apply(args.overrides, file);
  const Scheme scheme = scheme_from_string(args.scheme);
  const Scenario sc = file.instantiate(args.k.value_or(file.submodels), args.b.value_or(file.batch));
  const Solution solution = solve(sc, scheme);
  const ReportRow row = make_row(sc, solution, !args.omit_timing);
  write_to(args.out, format_report(std::span<const ReportRow>(&row, 1)), std::cout);
  write_to(args.graph, format_solution_graph(sc, solution), std::cerr);
  return kExitOk;
}

struct SweepArgs {
  std::string scenario;
  std::vector<std::string> schemes{"bcd"};
  std::vector<int> k_values{2, 3, 4, 5, 6, 7};
  std::vector<int> batches{1, 2, 4, 8, 16, 32, 64, 128, 256};
  std::optional<std::string> out;
  bool omit_timing = false;
  unsigned jobs = 1;
  Overrides overrides;
};

int sweep(const SweepArgs& args) {
  ScenarioFile file = load_scenario(args.scenario);
  apply(args.overrides, file);
  SweepOptions options;
  options.k_values = args.k_values;
  options.batches = args.batches;
  for (const auto& s : args.schemes) options.schemes.push_back(scheme_from_string(s));
  options.include_timing = !args.omit_timing;
  options.jobs = args.jobs;
  const auto rows = run_sweep(file, options);
  write_to(args.out, format_report(rows), std::cout);
  return kExitOk;
}

struct ValidateArgs {
  std::optional<std::string> scenario;
  std::optional<std::string> profile;
  std::optional<std::string> topology;
};

int validate(const ValidateArgs& args) {
  if (!args.scenario && !args.profile && !args.topology) {
    std::cerr << "validate: give --scenario, --profile or --topology\n";
    return kExitUsage;
  }
  if (args.profile) {
    const ModelProfile model = load_model_profile(read_text_file(*args.profile));
    std::cout << dump_model_profile(model);
  }
  if (args.topology) {
    const PhysicalNetwork net = load_topology(read_text_file(*args.topology));
    std::cout << dump_topology(net);
  }
  if (args.scenario) {
    const ScenarioFile file = load_scenario(*args.scenario);
    const Scenario sc = file.instantiate();
    std::cout << "scenario " << file.name << "\n"
              << "model " << file.model.model_id() << " layers " << file.model.layer_count() << "\n"
              << "network nodes " << file.network.node_count() << " links "
              << file.network.link_count() << "\n"
              << "request " << file.network.node(file.source).id << " -> "
              << file.network.node(file.destination).id << " b " << file.batch << " mode "
              << to_string(file.mode) << "\n"
              << "K " << file.submodels << " epsilon " << format_double(file.epsilon) << " t_max "
              << file.t_max << " seed " << file.seed << "\n";
    for (int k = 1; k <= sc.submodels(); ++k) {
      std::cout << "candidates " << k << ":";
      for (NodeIndex n : sc.candidates.slot(k)) std::cout << " " << file.network.node(n).id;
      std::cout << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint model splitting, placement and routing for multi-hop split inference and learning"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Solve one scenario with one scheme");
  run_cmd->add_option("--scenario", run_args.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--scheme", run_args.scheme, "bcd, exact, comp-ms or comm-ms");
  run_cmd->add_option("--k", run_args.k, "Number of sub-models")->check(CLI::Range(2, 1 << 20));
  run_cmd->add_option("--b", run_args.b, "Batch size")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run_args.out, "Report file (default stdout)");
  run_cmd->add_option("--graph", run_args.graph, "Solution graph file (default stderr)");
  run_cmd->add_flag("--omit-timing", run_args.omit_timing, "Write solve_time_s as 0");
  add_overrides(run_cmd, run_args.overrides);

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Solve every (scheme, K, b) cell");
  sweep_cmd->add_option("--scenario", sweep_args.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--schemes", sweep_args.schemes, "Schemes")->delimiter(',');
  sweep_cmd->add_option("--k", sweep_args.k_values, "K values")->delimiter(',')->check(CLI::Range(2, 1 << 20));
  sweep_cmd->add_option("--b", sweep_args.batches, "Batch sizes")->delimiter(',')->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep_args.out, "Report file (default stdout)");
  sweep_cmd->add_flag("--omit-timing", sweep_args.omit_timing, "Write solve_time_s as 0");
  sweep_cmd->add_option("--jobs", sweep_args.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_overrides(sweep_cmd, sweep_args.overrides);

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "Parse input files and print them");
  validate_cmd->add_option("--scenario", validate_args.scenario, "Scenario file");
  validate_cmd->add_option("--profile", validate_args.profile, "Model profile file");
  validate_cmd->add_option("--topology", validate_args.topology, "Topology file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run_cmd) return run(run_args);
    if (*sweep_cmd) return sweep(sweep_args);
    return validate(validate_args);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const BudgetExceededError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
