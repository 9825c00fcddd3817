// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "splitchain/chaining.hpp"
#include "splitchain/latency.hpp"
#include "splitchain/network.hpp"
#include "splitchain/profiles.hpp"
#include "splitchain/splitting.hpp"

namespace splitchain {

enum class Scheme { Bcd, Exact, CompMs, CommMs };

std::string_view to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view text);

/// One optimization instance. Network and model are held by value.
struct Scenario {
  PhysicalNetwork network;
  ModelProfile model;
  Request request;
  PlacementCandidates candidates;
  double epsilon = 0.0;
  int t_max = 20;
  std::uint64_t seed = 0;
  /// Node whose spec models slots 2..K in the two-step baselines;
  /// defaults to the destination.
  std::optional<NodeIndex> reference_node;
  /// Largest number of splits exact_solve may enumerate.
  std::uint64_t enumeration_budget = 100'000;

  int submodels() const { return candidates.slot_count(); }

  /// Throws ValidationError on inconsistent fields.
  void validate() const;
};

struct Solution {
  SplitAssignment split;
  ServicePath path;
  LatencyBreakdown latency;
  Scheme scheme = Scheme::Bcd;
  /// Tour objective at initialization and after every refinement (BCD only).
  std::vector<double> trace;
  int iterations = 0;
  std::uint64_t evaluated_splits = 0;
  double solve_time_s = 0.0;
  /// Some physical node hosts more than one sub-model.
  bool multi_hosted = false;
};

/// Alternates optimal resegmentation for the current placement with optimal
/// tour search for the current split, from an even initial split, until the
/// objective moves by at most epsilon or t_max refinements ran.
Solution bcd_solve(const Scenario& scenario);

/// Enumerates every split and solves placement and routing exactly for each.
/// Throws BudgetExceededError when C(L-1, K-1) exceeds the scenario budget.
Solution exact_solve(const Scenario& scenario);

/// Two-step baseline: split to minimize computation delay alone (source spec
/// for slot 1, reference spec for the rest), then place and route.
Solution comp_ms_solve(const Scenario& scenario);

/// Two-step baseline: split to minimize the total smashed bytes crossing
/// sub-model boundaries, then place and route.
Solution comm_ms_solve(const Scenario& scenario);

Solution solve(const Scenario& scenario, Scheme scheme);

/// Number of K-part compositions of L, C(L-1, K-1); saturates at uint64 max.
std::uint64_t split_count(int layer_count, int submodels);

}  // namespace splitchain
