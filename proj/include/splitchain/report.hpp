// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "splitchain/optimizer.hpp"
#include "splitchain/scenario.hpp"

namespace splitchain {

/// One line of a run or sweep report.
struct ReportRow {
  std::string scheme;
  int K = 0;
  int b = 0;
  std::string mode;
  double objective_s = 0.0;
  double comp_fw_s = 0.0;
  double comp_bw_s = 0.0;
  double trans_fw_s = 0.0;
  double trans_bw_s = 0.0;
  double prop_fw_s = 0.0;
  double prop_bw_s = 0.0;
  int iterations = 0;
  double solve_time_s = 0.0;
  bool feasible = false;
  std::uint64_t seed = 0;

  bool operator==(const ReportRow&) const = default;
};

/// Tab-separated header naming every ReportRow field in declaration order.
std::string report_header();
std::string format_report_row(const ReportRow& row);
std::string format_report(std::span<const ReportRow> rows);

/// Inverse of format_report; throws ParseError on a malformed table.
std::vector<ReportRow> parse_report(std::string_view text);

ReportRow make_row(const Scenario& scenario, const Solution& solution, bool include_timing = true);
ReportRow make_infeasible_row(const Scenario& scenario, Scheme scheme);

/// Solution graph: sub-model layer ranges, hosts and memory use, and the
/// route and smashed size of every subpath.
std::string format_solution_graph(const Scenario& scenario, const Solution& solution);

struct SweepCell {
  Scheme scheme;
  int K;
  int b;
};

struct SweepOptions {
  std::vector<int> k_values;
  std::vector<int> batches;
  std::vector<Scheme> schemes;
  bool include_timing = true;
  unsigned jobs = 1;
};

/// One row per (scheme, K, b) in that order; infeasible or over-budget
/// cells are recorded with feasible = false.
std::vector<ReportRow> run_sweep(const ScenarioFile& file, const SweepOptions& options);

}  // namespace splitchain
