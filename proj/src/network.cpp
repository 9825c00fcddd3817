// SPDX-License-Identifier: Apache-2.0
#include "splitchain/network.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <utility>

#include <json.hpp>

#include "splitchain/error.hpp"
#include "splitchain/quantity.hpp"

namespace splitchain {
namespace {

using nlohmann::json;

constexpr std::array<Direction, 1> kForwardOnly = {Direction::Forward};
constexpr std::array<Direction, 2> kBothDirections = {Direction::Forward, Direction::Backward};

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

const json& require(const json& obj, const char* field, const char* context) {
  if (!obj.is_object() || !obj.contains(field)) {
    throw ParseError(std::string(context) + " lacks field \"" + field + "\"");
  }
  return obj.at(field);
}

std::string require_string(const json& obj, const char* field, const char* context) {
  const json& v = require(obj, field, context);
  if (!v.is_string()) throw ParseError(std::string(context) + "." + field + " must be a string");
  return v.get<std::string>();
}

ComputeSpec compute_from_json(const json& obj) {
  ComputeSpec spec;
  const json& pieces = require(obj, "pieces", "compute");
  if (!pieces.is_array()) throw ParseError("compute.pieces must be an array");
  for (const auto& p : pieces) {
    ComputePiece piece;
    if (p.contains("max_batch") && !p["max_batch"].is_null()) {
      if (!p["max_batch"].is_number_integer()) throw ParseError("max_batch must be an integer");
      piece.max_batch = p["max_batch"].get<int>();
    }
    piece.alpha_kappa = quantity_from_json(require(p, "alpha_kappa", "piece"), "alpha_kappa");
    piece.beta_kappa = quantity_from_json(require(p, "beta_kappa", "piece"), "beta_kappa");
    spec.pieces.push_back(piece);
  }
  if (obj.contains("alpha_tau")) spec.alpha_tau = quantity_from_json(obj["alpha_tau"], "alpha_tau");
  if (obj.contains("beta_tau")) spec.beta_tau = quantity_from_json(obj["beta_tau"], "beta_tau");
  if (obj.contains("time_unit")) {
    const std::string unit = obj["time_unit"].get<std::string>();
    if (unit == "s") {
      spec.time_unit_s = 1.0;
    } else if (unit == "ms") {
      spec.time_unit_s = 1e-3;
    } else if (unit == "us") {
      spec.time_unit_s = 1e-6;
    } else {
      throw ParseError("compute.time_unit must be one of s, ms, us");
    }
  }
  return spec;
}

json compute_to_json(const ComputeSpec& spec) {
  json pieces = json::array();
  for (const auto& p : spec.pieces) {
    json piece = {{"alpha_kappa", p.alpha_kappa}, {"beta_kappa", p.beta_kappa}};
    piece["max_batch"] = p.max_batch ? json(*p.max_batch) : json(nullptr);
    pieces.push_back(std::move(piece));
  }
  std::string unit = "s";
  if (spec.time_unit_s == 1e-3) unit = "ms";
  if (spec.time_unit_s == 1e-6) unit = "us";
  return {{"pieces", std::move(pieces)},
          {"alpha_tau", spec.alpha_tau},
          {"beta_tau", spec.beta_tau},
          {"time_unit", unit}};
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::Inference ? "IF" : "TR"; }

Mode mode_from_string(std::string_view text) {
  if (text == "IF" || text == "if" || text == "inference") return Mode::Inference;
  if (text == "TR" || text == "tr" || text == "training") return Mode::Training;
  throw ParseError("unknown mode '" + std::string(text) + "' (expected IF or TR)");
}

std::span<const Direction> directions(Mode mode) {
  if (mode == Mode::Inference) return kForwardOnly;
  return kBothDirections;
}

const ComputePiece& ComputeSpec::piece_for(int batch) const {
  for (const auto& piece : pieces) {
    if (!piece.max_batch || batch <= *piece.max_batch) return piece;
  }
  throw ValidationError("no compute piece admits batch " + std::to_string(batch));
}

void ComputeSpec::validate() const {
  if (pieces.empty()) throw ValidationError("compute spec has no pieces");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const bool last = i + 1 == pieces.size();
    if (last && pieces[i].max_batch) throw ValidationError("last compute piece must be unbounded");
    if (!last && !pieces[i].max_batch) {
      throw ValidationError("only the last compute piece may be unbounded");
    }
    if (i > 0 && !last && *pieces[i].max_batch <= *pieces[i - 1].max_batch) {
      throw ValidationError("compute piece bounds must be strictly increasing");
    }
    if (!std::isfinite(pieces[i].alpha_kappa) || !std::isfinite(pieces[i].beta_kappa)) {
      throw ValidationError("compute coefficients must be finite");
    }
  }
  if (!std::isfinite(alpha_tau) || !std::isfinite(beta_tau)) {
    throw ValidationError("compute overhead coefficients must be finite");
  }
  if (!(time_unit_s > 0.0) || !std::isfinite(time_unit_s)) {
    throw ValidationError("compute time unit must be positive");
  }
}

PhysicalNetwork::PhysicalNetwork(std::vector<NodeSpec> nodes, std::span<const LinkInput> links)
    : nodes_(std::move(nodes)) {
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    const NodeSpec& n = nodes_[i];
    if (n.id.empty()) throw ValidationError("node id must not be empty");
    if (!by_id_.emplace(n.id, i).second) throw ValidationError("duplicate node id " + n.id);
    if (!finite_non_negative(n.c_mem) || !finite_non_negative(n.c_disk)) {
      throw ValidationError("node " + n.id + ": capacities must be >= 0");
    }
    n.compute.validate();
  }
  out_.resize(nodes_.size());
  std::set<std::pair<NodeIndex, NodeIndex>> seen;
  for (const auto& in : links) {
    auto src = find_node(in.src);
    auto dst = find_node(in.dst);
    if (!src) throw ValidationError("link references unknown node " + in.src);
    if (!dst) throw ValidationError("link references unknown node " + in.dst);
    if (*src == *dst) throw ValidationError("self-loop on node " + in.src);
    if (!seen.emplace(*src, *dst).second) {
      throw ValidationError("duplicate link " + in.src + " -> " + in.dst);
    }
    if (!(in.r_fw > 0.0) || !(in.r_bw > 0.0) || !std::isfinite(in.r_fw) || !std::isfinite(in.r_bw)) {
      throw ValidationError("link " + in.src + " -> " + in.dst + ": bandwidth must be > 0");
    }
    if (!finite_non_negative(in.d_fw) || !finite_non_negative(in.d_bw)) {
      throw ValidationError("link " + in.src + " -> " + in.dst + ": delay must be >= 0");
    }
    links_.push_back(LinkSpec{*src, *dst, in.r_fw, in.r_bw, in.d_fw, in.d_bw});
    out_[*src].push_back(links_.size() - 1);
  }
  for (auto& out : out_) {
    std::sort(out.begin(), out.end(),
              [&](std::size_t a, std::size_t b) { return links_[a].dst < links_[b].dst; });
  }
}

std::optional<std::size_t> PhysicalNetwork::find_link(NodeIndex src, NodeIndex dst) const {
  for (std::size_t l : out_.at(src)) {
    if (links_[l].dst == dst) return l;
  }
  return std::nullopt;
}

std::optional<NodeIndex> PhysicalNetwork::find_node(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

NodeIndex PhysicalNetwork::index_of(std::string_view id) const {
  auto found = find_node(id);
  if (!found) throw ValidationError("unknown node '" + std::string(id) + "'");
  return *found;
}

PhysicalNetwork load_topology(std::string_view text) {
  try {
    const json doc = parse_json(text, "topology document");
    const json& nodes_json = require(doc, "nodes", "topology");
    const json& links_json = require(doc, "links", "topology");
    if (!nodes_json.is_array() || !links_json.is_array()) {
      throw ParseError("topology nodes and links must be arrays");
    }
    const auto builtin = builtin_compute_specs();
    std::vector<NodeSpec> nodes;
    for (const auto& n : nodes_json) {
      NodeSpec spec;
      spec.id = require_string(n, "id", "node");
      if (n.contains("compute")) {
        spec.compute = compute_from_json(n["compute"]);
      } else {
        const std::string role = require_string(n, "role", "node");
        if (role == "cpu") {
          spec.compute = builtin.cpu;
        } else if (role == "gpu") {
          spec.compute = builtin.gpu;
        } else {
          throw ParseError("node " + spec.id + ": unknown role '" + role + "'");
        }
      }
      spec.c_mem = quantity_from_json(require(n, "c_mem", "node"), "c_mem");
      spec.c_disk = quantity_from_json(require(n, "c_disk", "node"), "c_disk");
      nodes.push_back(std::move(spec));
    }
    std::vector<PhysicalNetwork::LinkInput> links;
    for (const auto& l : links_json) {
      PhysicalNetwork::LinkInput in;
      in.src = require_string(l, "src", "link");
      in.dst = require_string(l, "dst", "link");
      in.r_fw = quantity_from_json(require(l, "r_fw", "link"), "r_fw");
      in.r_bw = quantity_from_json(require(l, "r_bw", "link"), "r_bw");
      in.d_fw = quantity_from_json(require(l, "d_fw", "link"), "d_fw");
      in.d_bw = quantity_from_json(require(l, "d_bw", "link"), "d_bw");
      links.push_back(std::move(in));
    }
    return PhysicalNetwork(std::move(nodes), links);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

std::string dump_topology(const PhysicalNetwork& network) {
  json nodes = json::array();
  for (const auto& n : network.nodes()) {
    nodes.push_back({{"id", n.id},
                     {"compute", compute_to_json(n.compute)},
                     {"c_mem", n.c_mem},
                     {"c_disk", n.c_disk}});
  }
  json links = json::array();
  for (const auto& l : network.links()) {
    links.push_back({{"src", network.node(l.src).id},
                     {"dst", network.node(l.dst).id},
                     {"r_fw", l.r_fw},
                     {"r_bw", l.r_bw},
                     {"d_fw", l.d_fw},
                     {"d_bw", l.d_bw}});
  }
  return json{{"nodes", std::move(nodes)}, {"links", std::move(links)}}.dump(2) + "\n";
}

BuiltinComputeSpecs builtin_compute_specs() {
  BuiltinComputeSpecs specs;
  specs.cpu.pieces = {ComputePiece{8, 1.04e-10, 3.74e-11},
                      ComputePiece{std::nullopt, 2.07e-10, -1.60e-9}};
  specs.cpu.alpha_tau = 0.0;
  specs.cpu.beta_tau = 0.0;
  specs.cpu.time_unit_s = 1e-3;

  specs.gpu.pieces = {ComputePiece{std::nullopt, 3.94e-12, 1.72e-11}};
  specs.gpu.alpha_tau = 2.07e-13;
  specs.gpu.beta_tau = 1.69e-13;
  specs.gpu.time_unit_s = 1e-3;
  return specs;
}

std::vector<EdgeDelay> load_edge_delays(std::string_view text) {
  try {
    const json doc = parse_json(text, "delay table");
    const json& edges = require(doc, "edges", "delay table");
    if (!edges.is_array()) throw ParseError("delay table edges must be an array");
    std::vector<EdgeDelay> out;
    for (const auto& e : edges) {
      EdgeDelay d;
      d.a = require_string(e, "a", "edge");
      d.b = require_string(e, "b", "edge");
      d.delay_s = quantity_from_json(require(e, "delay_s", "edge"), "delay_s");
      out.push_back(std::move(d));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

std::span<const UndirectedEdge> nsfnet_edges() {
  // v1 Seattle, v2 Palo Alto, v3 San Diego, v4 Salt Lake City, v5 Boulder,
  // v6 Houston, v7 Lincoln, v8 Champaign, v9 Atlanta, v10 Ann Arbor,
  // v11 Pittsburgh, v12 Princeton, v13 College Park, v14 Ithaca.
  static const std::vector<UndirectedEdge> edges = {
      {"v1", "v2"},   {"v1", "v3"},   {"v1", "v8"},   {"v2", "v3"},   {"v2", "v4"},
      {"v3", "v6"},   {"v4", "v5"},   {"v4", "v10"},  {"v5", "v6"},   {"v5", "v7"},
      {"v6", "v9"},   {"v6", "v13"},  {"v7", "v8"},   {"v8", "v11"},  {"v9", "v11"},
      {"v10", "v12"}, {"v10", "v14"}, {"v11", "v12"}, {"v11", "v14"}, {"v12", "v13"},
      {"v13", "v14"},
  };
  return edges;
}

NodeSpec make_role_node(std::string id, NodeRole role, const NsfnetOptions& options) {
  const auto specs = builtin_compute_specs();
  NodeSpec node;
  node.id = std::move(id);
  if (role == NodeRole::Cpu) {
    node.compute = specs.cpu;
    node.c_mem = node.c_disk = options.cpu_capacity_bytes;
  } else {
    node.compute = specs.gpu;
    node.c_mem = node.c_disk = options.gpu_capacity_bytes;
  }
  return node;
}

PhysicalNetwork builtin_nsfnet(std::span<const EdgeDelay> delays,
                               const std::map<std::string, NodeRole>& roles,
                               const NsfnetOptions& options) {
  std::vector<NodeSpec> nodes;
  for (int i = 1; i <= 14; ++i) {
    const std::string id = "v" + std::to_string(i);
    auto it = roles.find(id);
    if (it == roles.end()) throw ValidationError("no role assigned to NSFNET node " + id);
    nodes.push_back(make_role_node(id, it->second, options));
  }
  for (const auto& [id, role] : roles) {
    if (std::none_of(nodes.begin(), nodes.end(), [&](const NodeSpec& n) { return n.id == id; })) {
      throw ValidationError("role given for unknown NSFNET node " + id);
    }
  }
  auto delay_of = [&](const UndirectedEdge& e) {
    for (const auto& d : delays) {
      if ((d.a == e.a && d.b == e.b) || (d.a == e.b && d.b == e.a)) return d.delay_s;
    }
    throw ValidationError("missing delay for NSFNET edge " + e.a + "-" + e.b);
  };
  std::vector<PhysicalNetwork::LinkInput> links;
  for (const auto& e : nsfnet_edges()) {
    const double d = delay_of(e);
    const double r = options.bandwidth_bps;
    links.push_back({e.a, e.b, r, r, d, d});
    links.push_back({e.b, e.a, r, r, d, d});
  }
  return PhysicalNetwork(std::move(nodes), links);
}

std::map<std::string, NodeRole> nsfnet_roles(std::span<const std::string> cpu_nodes) {
  std::map<std::string, NodeRole> roles;
  for (int i = 1; i <= 14; ++i) roles["v" + std::to_string(i)] = NodeRole::Gpu;
  for (const auto& id : cpu_nodes) {
    auto it = roles.find(id);
    if (it == roles.end()) throw ValidationError("unknown NSFNET node " + id);
    it->second = NodeRole::Cpu;
  }
  return roles;
}

void Request::validate(const PhysicalNetwork& network) const {
  if (source >= network.node_count() || destination >= network.node_count()) {
    throw ValidationError("request endpoints outside the network");
  }
  if (source == destination) throw ValidationError("request source equals destination");
  if (batch < 1) throw ValidationError("batch size must be >= 1");
}

PlacementCandidates::PlacementCandidates(std::vector<std::vector<NodeIndex>> per_slot,
                                         NodeIndex source, NodeIndex destination,
                                         std::size_t node_count)
    : slots_(std::move(per_slot)) {
  if (slots_.size() < 2) throw ValidationError("need candidate sets for at least 2 sub-models");
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    auto& slot = slots_[k];
    if (slot.empty()) {
      throw ValidationError("candidate set of sub-model " + std::to_string(k + 1) + " is empty");
    }
    std::sort(slot.begin(), slot.end());
    if (std::adjacent_find(slot.begin(), slot.end()) != slot.end()) {
      throw ValidationError("candidate set of sub-model " + std::to_string(k + 1) +
                            " repeats a node");
    }
    if (slot.back() >= node_count) throw ValidationError("candidate node outside the network");
  }
  if (slots_.front() != std::vector<NodeIndex>{source}) {
    throw ValidationError("the first sub-model must be placed on the source only");
  }
  if (slots_.back() != std::vector<NodeIndex>{destination}) {
    throw ValidationError("the last sub-model must be placed on the destination only");
  }
}

bool PlacementCandidates::contains(int k, NodeIndex node) const {
  auto s = slot(k);
  return std::binary_search(s.begin(), s.end(), node);
}

PlacementCandidates draw_candidates(const PhysicalNetwork& network, int submodels,
                                    NodeIndex source, NodeIndex destination, std::size_t per_slot,
                                    std::uint64_t seed) {
  if (submodels < 2) throw ValidationError("K must be >= 2");
  std::vector<NodeIndex> pool;
  for (NodeIndex i = 0; i < network.node_count(); ++i) {
    if (i != source && i != destination) pool.push_back(i);
  }
  std::vector<std::vector<NodeIndex>> slots;
  slots.push_back({source});
  // Raw engine output keeps draws identical across standard libraries.
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(submodels));
  for (int k = 2; k < submodels; ++k) {
    std::vector<NodeIndex> order = pool;
    const std::size_t take = std::min(per_slot, order.size());
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (order.size() - i));
      std::swap(order[i], order[j]);
    }
    order.resize(take);
    if (order.empty()) throw ValidationError("no intermediate nodes available for candidates");
    slots.push_back(std::move(order));
  }
  slots.push_back({destination});
  return PlacementCandidates(std::move(slots), source, destination, network.node_count());
}

}  // namespace splitchain
