// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace splitchain {

using NodeIndex = std::size_t;

enum class Mode { Inference, Training };
enum class Direction { Forward, Backward };

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view text);

/// Directions whose costs enter the objective: {FW} for inference, {FW, BW}
/// for training.
std::span<const Direction> directions(Mode mode);

struct ComputePiece {
  std::optional<int> max_batch;  // inclusive upper bound; nullopt = unbounded
  double alpha_kappa = 0.0;
  double beta_kappa = 0.0;

  bool operator==(const ComputePiece&) const = default;
};

/// Piecewise-linear compute model: time = (alpha_kappa*b + beta_kappa)*FLOPs
/// + alpha_tau*b + beta_tau, expressed in units of `time_unit_s` seconds.
struct ComputeSpec {
  std::vector<ComputePiece> pieces;
  double alpha_tau = 0.0;
  double beta_tau = 0.0;
  double time_unit_s = 1.0;

  /// First piece whose max_batch admits b.
  const ComputePiece& piece_for(int batch) const;

  /// Throws ValidationError on empty pieces, non-increasing bounds, a bounded
  /// last piece, or a non-positive time unit.
  void validate() const;

  bool operator==(const ComputeSpec&) const = default;
};

struct NodeSpec {
  std::string id;
  ComputeSpec compute;
  double c_mem = 0.0;   // bytes
  double c_disk = 0.0;  // bytes
};

struct LinkSpec {
  NodeIndex src = 0;
  NodeIndex dst = 0;
  double r_fw = 0.0;  // bits/s
  double r_bw = 0.0;  // bits/s
  double d_fw = 0.0;  // seconds
  double d_bw = 0.0;  // seconds
};

/// Directed physical network. Immutable once constructed.
class PhysicalNetwork {
 public:
  struct LinkInput {
    std::string src;
    std::string dst;
    double r_fw = 0.0;
    double r_bw = 0.0;
    double d_fw = 0.0;
    double d_bw = 0.0;
  };

  /// Throws ValidationError on duplicate ids, self-loops, duplicate links,
  /// dangling endpoints, non-positive bandwidths or negative delays/capacities.
  PhysicalNetwork(std::vector<NodeSpec> nodes, std::span<const LinkInput> links);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  const NodeSpec& node(NodeIndex i) const { return nodes_.at(i); }
  std::span<const NodeSpec> nodes() const { return nodes_; }
  const LinkSpec& link(std::size_t index) const { return links_.at(index); }
  std::span<const LinkSpec> links() const { return links_; }

  /// Link indices leaving node i, sorted by destination index.
  std::span<const std::size_t> out_links(NodeIndex i) const { return out_.at(i); }

  std::optional<std::size_t> find_link(NodeIndex src, NodeIndex dst) const;
  std::optional<NodeIndex> find_node(std::string_view id) const;
  NodeIndex index_of(std::string_view id) const;  // throws ValidationError

 private:
  std::vector<NodeSpec> nodes_;
  std::vector<LinkSpec> links_;
  std::vector<std::vector<std::size_t>> out_;
  std::map<std::string, NodeIndex, std::less<>> by_id_;
};

/// Parses a JSON topology document:
///   {"nodes": [{"id": "v1", "role": "gpu", "c_mem": 2e9, "c_disk": 2e9}, ...],
///    "links": [{"src": "v1", "dst": "v2", "r_fw": 1e9, "r_bw": 1e9,
///               "d_fw": 1e-3, "d_bw": 1e-3}, ...]}
/// A node takes either "role" ("cpu" | "gpu") or an explicit "compute" object.
PhysicalNetwork load_topology(std::string_view text);

std::string dump_topology(const PhysicalNetwork& network);

struct BuiltinComputeSpecs {
  ComputeSpec cpu;
  ComputeSpec gpu;
};

/// Fitted CPU (Xeon Gold 6226R) and GPU (RTX A6000) coefficients. The fitted
/// times are in milliseconds, so both specs carry time_unit_s = 1e-3.
BuiltinComputeSpecs builtin_compute_specs();

enum class NodeRole { Cpu, Gpu };

struct UndirectedEdge {
  std::string a;
  std::string b;
};

/// Propagation delay of one undirected edge, applied to both directions.
struct EdgeDelay {
  std::string a;
  std::string b;
  double delay_s = 0.0;
};

/// Parses {"edges": [{"a": "v1", "b": "v2", "delay_s": 5.65e-3, ...}, ...]}.
std::vector<EdgeDelay> load_edge_delays(std::string_view text);

/// The 21 undirected NSFNET T1 backbone edges over nodes v1..v14.
std::span<const UndirectedEdge> nsfnet_edges();

struct NsfnetOptions {
  double bandwidth_bps = 1e9;
  double gpu_capacity_bytes = 2e9;
  double cpu_capacity_bytes = 8e9;
};

/// 14-node, 42-link NSFNET. Every edge needs a delay; every node needs a role.
NodeSpec make_role_node(std::string id, NodeRole role, const NsfnetOptions& options = {});
PhysicalNetwork builtin_nsfnet(std::span<const EdgeDelay> delays,
                               const std::map<std::string, NodeRole>& roles,
                               const NsfnetOptions& options = {});

/// All NSFNET nodes GPU except the listed CPU nodes.
std::map<std::string, NodeRole> nsfnet_roles(std::span<const std::string> cpu_nodes);

/// Service chain request.
struct Request {
  std::string model_id;
  NodeIndex source = 0;
  NodeIndex destination = 0;
  int batch = 1;
  Mode mode = Mode::Inference;

  void validate(const PhysicalNetwork& network) const;
};

/// Candidate host sets V^1..V^K; V^1 = {source}, V^K = {destination}.
class PlacementCandidates {
 public:
  PlacementCandidates(std::vector<std::vector<NodeIndex>> per_slot, NodeIndex source,
                      NodeIndex destination, std::size_t node_count);

  int slot_count() const { return static_cast<int>(slots_.size()); }
  /// 1-based slot; node indices sorted ascending.
  std::span<const NodeIndex> slot(int k) const { return slots_.at(static_cast<std::size_t>(k - 1)); }
  bool contains(int k, NodeIndex node) const;

 private:
  std::vector<std::vector<NodeIndex>> slots_;
};

/// Seeded draw of `per_slot` distinct intermediate candidates for slots
/// 2..K-1, excluding the source and destination.
PlacementCandidates draw_candidates(const PhysicalNetwork& network, int submodels, NodeIndex source,
                                    NodeIndex destination, std::size_t per_slot, std::uint64_t seed);

}  // namespace splitchain
