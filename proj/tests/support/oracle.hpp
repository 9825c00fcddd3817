// SPDX-License-Identifier: Apache-2.0
// Test-only reference implementations. Nothing here calls the library's cost
// model or solvers; only the plain data types are shared.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "splitchain/optimizer.hpp"

namespace oracle {

using splitchain::NodeIndex;

struct Shape {
  int min_nodes = 2;
  int max_nodes = 6;
  int min_layers = 2;
  int max_layers = 6;
  int max_submodels = 3;
  double link_probability = 0.5;
  /// Small integers everywhere so every sum is exact in floating point.
  bool integral = true;
  /// Draw intermediate candidates from nodes other than the endpoints.
  bool exclude_endpoints = false;
  std::size_t max_candidates = 3;
};

splitchain::Scenario random_scenario(std::mt19937_64& rng, const Shape& shape);

/// Start layers s^2..s^K of every split of L layers into K parts, lexicographic.
std::vector<std::vector<int>> all_splits(int layer_count, int submodels);

/// Every loop-free route from a to b (a route from a to a is just {a}).
std::vector<std::vector<NodeIndex>> simple_paths(const splitchain::PhysicalNetwork& net,
                                                 NodeIndex a, NodeIndex b);

double comp_seconds(const splitchain::NodeSpec& node, const splitchain::ModelProfile& model,
                    int first, int last, int batch, bool backward);

bool fits(const splitchain::NodeSpec& node, const splitchain::ModelProfile& model, int first,
          int last, int batch, bool training);

/// Objective of (split, hosts, routes), or nullopt if a route uses a missing
/// link. Capacity is not checked here.
std::optional<double> objective(const splitchain::Scenario& sc, const std::vector<int>& starts,
                                const std::vector<NodeIndex>& hosts,
                                const std::vector<std::vector<NodeIndex>>& routes);

struct Best {
  double objective = 0.0;
  std::vector<int> starts;
  std::vector<NodeIndex> hosts;
  std::vector<std::vector<NodeIndex>> routes;
  std::uint64_t combinations = 0;
};

/// Splits x candidate hosts x loop-free routes, enumerated as a full product.
std::optional<Best> brute_force(const splitchain::Scenario& sc);

/// Best routes and hosts for one fixed split, by the same full product.
std::optional<Best> brute_force_for_split(const splitchain::Scenario& sc,
                                          const std::vector<int>& starts);

/// Great-circle distance in meters.
double haversine_m(double lat1, double lon1, double lat2, double lon2, double radius_m);

}  // namespace oracle
