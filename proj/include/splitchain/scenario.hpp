// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splitchain/network.hpp"
#include "splitchain/optimizer.hpp"
#include "splitchain/profiles.hpp"

namespace splitchain {

/// Parsed scenario file. Cells of a sweep are materialized with
/// ScenarioFile::instantiate(K, b).
///
///   {
///     "name": "msi-default",
///     "model": "resnet101" | {"profile_file": "resnet101.json"},
///     "topology": {"builtin": "nsfnet", "delays_file": "nsfnet_delays.json",
///                  "cpu_nodes": ["v4"]} | {"file": "topology.json"},
///     "request": {"source": "v4", "destination": "v13", "batch": 2, "mode": "IF"},
///     "K": 3,
///     "candidates": {"3": [["v4"], ["v7", "v10"], ["v13"]]},
///     "candidates_per_slot": 2,
///     "seed": 7,
///     "epsilon": 0, "t_max": 20,
///     "reference_node": "v13",
///     "enumeration_budget": 100000
///   }
///
/// Relative file paths resolve against the scenario file's directory.
struct ScenarioFile {
  std::string name;
  PhysicalNetwork network;
  ModelProfile model;
  NodeIndex source = 0;
  NodeIndex destination = 0;
  int batch = 1;
  Mode mode = Mode::Inference;
  int submodels = 2;
  std::map<int, std::vector<std::vector<NodeIndex>>> pinned_candidates;
  std::size_t candidates_per_slot = 2;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  int t_max = 20;
  std::optional<NodeIndex> reference_node;
  std::uint64_t enumeration_budget = 100'000;

  /// Pinned candidates for K when present, otherwise a draw seeded by (seed, K).
  PlacementCandidates candidates_for(int submodels) const;

  Scenario instantiate(int submodels, int batch) const;
  Scenario instantiate() const { return instantiate(submodels, batch); }
};

ScenarioFile parse_scenario(std::string_view text, const std::filesystem::path& base_dir);
ScenarioFile load_scenario(const std::filesystem::path& file);

std::string read_text_file(const std::filesystem::path& file);

}  // namespace splitchain
