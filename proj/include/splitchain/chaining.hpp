// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "splitchain/network.hpp"
#include "splitchain/profiles.hpp"
#include "splitchain/splitting.hpp"

namespace splitchain {

/// Placement and routing of one request. Subpath k (1-based, k = 1..K+1) is
/// the physical route routes[k-1]: subpath 1 runs from the source to hosts[0],
/// subpath k from hosts[k-2] to hosts[k-1], subpath K+1 from hosts[K-1] to the
/// destination. A route with a single node crosses no physical link.
struct ServicePath {
  std::vector<NodeIndex> hosts;
  std::vector<std::vector<NodeIndex>> routes;

  int submodel_count() const { return static_cast<int>(hosts.size()); }
  bool operator==(const ServicePath&) const = default;
};

/// Imaginary node for executing sub-model `slot` on physical node `host`.
struct ImaginaryNode {
  NodeIndex host = 0;
  int slot = 0;
  double comp_cost = 0.0;  // seconds, forward (+ backward for training)
};

/// Physical network plus one imaginary node per capacity-feasible
/// (candidate, sub-model) pair, with per-subpath physical link costs.
class AugmentedNetwork {
 public:
  AugmentedNetwork(const PhysicalNetwork& physical, NodeIndex source, NodeIndex destination,
                   std::vector<std::vector<ImaginaryNode>> imaginary,
                   std::vector<std::vector<double>> link_costs);

  const PhysicalNetwork& physical() const { return *physical_; }
  NodeIndex source() const { return source_; }
  NodeIndex destination() const { return destination_; }
  int slot_count() const { return static_cast<int>(imaginary_.size()); }

  /// Imaginary nodes of slot k (1-based), sorted by host index.
  std::span<const ImaginaryNode> imaginary_nodes(int k) const;
  std::optional<double> imaginary_cost(int k, NodeIndex host) const;

  /// Cost of physical link `link` when traversed in subpath k (1..K+1).
  double link_cost(int subpath, std::size_t link) const;

 private:
  const PhysicalNetwork* physical_;
  NodeIndex source_;
  NodeIndex destination_;
  std::vector<std::vector<ImaginaryNode>> imaginary_;
  std::vector<std::vector<double>> link_costs_;
};

/// Throws InfeasibleError naming the first slot without a feasible candidate,
/// ValidationError if any computed cost is negative.
AugmentedNetwork build_augmented(const PhysicalNetwork& network, const ModelProfile& model,
                                 const SplitAssignment& split,
                                 const PlacementCandidates& candidates, const Request& request);

struct Tour {
  ServicePath path;
  double cost = 0.0;
};

/// Minimum-cost tour s -> slot 1 -> ... -> slot K -> d. Ties go to the
/// lexicographically smallest host sequence, then to fewer hops, then to the
/// smaller predecessor id along each route. Throws InfeasibleError when some
/// consecutive slot pair is unreachable.
Tour find_tour(const AugmentedNetwork& aug);

/// Augmented-network node: physical when slot == 0, imaginary otherwise.
struct AugNode {
  NodeIndex node = 0;
  int slot = 0;

  auto operator<=>(const AugNode&) const = default;
};

struct AugLink {
  AugNode from;
  AugNode to;

  auto operator<=>(const AugLink&) const = default;
};

/// The x-variable encoding: the set of augmented links used by each subpath.
std::vector<std::vector<AugLink>> encode_links(const ServicePath& path, NodeIndex source,
                                               NodeIndex destination);

/// Checks link sets against flow conservation per subpath (imaginary nodes of
/// one slot aggregated as that slot's node), subpath connectivity, the ban on
/// entering foreign-slot imaginary nodes, loop-freeness, link existence and
/// candidate membership. Returns one message per violation; empty = valid.
std::vector<std::string> validate_link_sets(const std::vector<std::vector<AugLink>>& x,
                                            const PhysicalNetwork& network,
                                            const PlacementCandidates& candidates,
                                            NodeIndex source, NodeIndex destination);

/// Text export: one line per sub-model and per subpath.
std::string describe_path(const ServicePath& path, const PhysicalNetwork& network);

}  // namespace splitchain
