// SPDX-License-Identifier: Apache-2.0
#include "splitchain/chaining.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <tuple>

#include "splitchain/error.hpp"

namespace splitchain {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ShortestPaths {
  std::vector<double> cost;
  std::vector<int> hops;
  std::vector<NodeIndex> pred;
  std::vector<bool> reached;

  std::vector<NodeIndex> route_to(NodeIndex source, NodeIndex target) const {
    std::vector<NodeIndex> route{target};
    while (route.back() != source) route.push_back(pred[route.back()]);
    std::reverse(route.begin(), route.end());
    return route;
  }
};

// Dijkstra keyed on (cost, hops); among equal keys the smaller predecessor wins.
ShortestPaths dijkstra(const AugmentedNetwork& aug, int subpath, NodeIndex source) {
  const PhysicalNetwork& net = aug.physical();
  const std::size_t n = net.node_count();
  ShortestPaths sp{std::vector<double>(n, kInf), std::vector<int>(n, 0), std::vector<NodeIndex>(n, 0),
                   std::vector<bool>(n, false)};
  std::vector<bool> settled(n, false);
  using Key = std::tuple<double, int, NodeIndex>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> queue;
  sp.cost[source] = 0.0;
  sp.reached[source] = true;
  sp.pred[source] = source;
  queue.emplace(0.0, 0, source);
  while (!queue.empty()) {
    auto [cost, hops, u] = queue.top();
    queue.pop();
    if (settled[u] || cost != sp.cost[u] || hops != sp.hops[u]) continue;
    settled[u] = true;
    for (std::size_t l : net.out_links(u)) {
      const NodeIndex v = net.link(l).dst;
      if (settled[v]) continue;
      const double c = cost + aug.link_cost(subpath, l);
      const int h = hops + 1;
      const bool improves = !sp.reached[v] || c < sp.cost[v] || (c == sp.cost[v] && h < sp.hops[v]) ||
                            (c == sp.cost[v] && h == sp.hops[v] && u < sp.pred[v]);
      if (!improves) continue;
      const bool key_changed = !sp.reached[v] || c != sp.cost[v] || h != sp.hops[v];
      sp.cost[v] = c;
      sp.hops[v] = h;
      sp.pred[v] = u;
      sp.reached[v] = true;
      if (key_changed) queue.emplace(c, h, v);
    }
  }
  return sp;
}

}  // namespace

AugmentedNetwork::AugmentedNetwork(const PhysicalNetwork& physical, NodeIndex source,
                                   NodeIndex destination,
                                   std::vector<std::vector<ImaginaryNode>> imaginary,
                                   std::vector<std::vector<double>> link_costs)
    : physical_(&physical),
      source_(source),
      destination_(destination),
      imaginary_(std::move(imaginary)),
      link_costs_(std::move(link_costs)) {
  if (imaginary_.size() < 2 || link_costs_.size() != imaginary_.size() + 1) {
    throw ValidationError("augmented network needs K slots and K+1 subpath cost tables");
  }
  for (std::size_t k = 0; k < imaginary_.size(); ++k) {
    auto& slot = imaginary_[k];
    std::sort(slot.begin(), slot.end(),
              [](const ImaginaryNode& a, const ImaginaryNode& b) { return a.host < b.host; });
    for (const auto& node : slot) {
      if (node.host >= physical.node_count()) throw ValidationError("imaginary node off the network");
      if (!(node.comp_cost >= 0.0)) throw ValidationError("negative computation cost");
    }
  }
  for (const auto& costs : link_costs_) {
    if (costs.size() != physical.link_count()) {
      throw ValidationError("link cost table does not cover every physical link");
    }
    for (double c : costs) {
      if (!(c >= 0.0)) throw ValidationError("negative link cost");
    }
  }
}

std::span<const ImaginaryNode> AugmentedNetwork::imaginary_nodes(int k) const {
  return imaginary_.at(static_cast<std::size_t>(k - 1));
}

std::optional<double> AugmentedNetwork::imaginary_cost(int k, NodeIndex host) const {
  for (const auto& node : imaginary_nodes(k)) {
    if (node.host == host) return node.comp_cost;
  }
  return std::nullopt;
}

double AugmentedNetwork::link_cost(int subpath, std::size_t link) const {
  return link_costs_.at(static_cast<std::size_t>(subpath - 1)).at(link);
}

AugmentedNetwork build_augmented(const PhysicalNetwork& network, const ModelProfile& model,
                                 const SplitAssignment& split,
                                 const PlacementCandidates& candidates, const Request& request) {
  const int K = split.submodel_count();
  if (candidates.slot_count() != K) {
    throw ValidationError("candidate slots (" + std::to_string(candidates.slot_count()) +
                          ") do not match the split (" + std::to_string(K) + ")");
  }
  if (split.layer_count() != model.layer_count()) {
    throw ValidationError("split and model disagree on the layer count");
  }
  std::vector<std::vector<ImaginaryNode>> imaginary(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    const LayerRange range = split.range(k);
    for (NodeIndex host : candidates.slot(k)) {
      const NodeSpec& node = network.node(host);
      if (!capacity_feasible(node, model, range, request.batch, request.mode).feasible()) continue;
      double cost = 0.0;
      for (Direction dir : directions(request.mode)) {
        cost += comp_delay(node, model, range, request.batch, dir);
      }
      if (cost < 0.0) {
        throw ValidationError("negative computation delay on node " + node.id);
      }
      imaginary[static_cast<std::size_t>(k - 1)].push_back({host, k, cost});
    }
    if (imaginary[static_cast<std::size_t>(k - 1)].empty()) {
      throw InfeasibleError("no candidate node can host sub-model " + std::to_string(k) + " " +
                            to_string(split));
    }
  }
  std::vector<std::vector<double>> link_costs(static_cast<std::size_t>(K) + 1,
                                              std::vector<double>(network.link_count(), 0.0));
  for (int subpath = 2; subpath <= K + 1; ++subpath) {
    const int emitter = subpath - 1;
    auto& costs = link_costs[static_cast<std::size_t>(subpath - 1)];
    for (std::size_t l = 0; l < network.link_count(); ++l) {
      const LinkSpec& link = network.link(l);
      double c = 0.0;
      for (Direction dir : directions(request.mode)) {
        const bool fw = dir == Direction::Forward;
        const double payload = emitter < K ? smashed_bytes(model, split.range(emitter).last(), dir) : 0.0;
        c += trans_delay(payload, request.batch, fw ? link.r_fw : link.r_bw);
        c += fw ? link.d_fw : link.d_bw;
      }
      costs[l] = c;
    }
  }
  return AugmentedNetwork(network, request.source, request.destination, std::move(imaginary),
                          std::move(link_costs));
}

Tour find_tour(const AugmentedNetwork& aug) {
  const int K = aug.slot_count();
  const std::size_t n = aug.physical().node_count();
  // From every host of slot k (and from the source for k = 0), shortest routes of subpath k+1.
  std::vector<std::map<NodeIndex, ShortestPaths>> routes(static_cast<std::size_t>(K) + 1);
  routes[0].emplace(aug.source(), dijkstra(aug, 1, aug.source()));
  for (int k = 1; k <= K; ++k) {
    for (const auto& node : aug.imaginary_nodes(k)) {
      routes[static_cast<std::size_t>(k)].emplace(node.host, dijkstra(aug, k + 1, node.host));
    }
  }
  // suffix[k][h]: cheapest completion after executing slot k on h.
  std::vector<std::vector<double>> suffix(static_cast<std::size_t>(K) + 1,
                                          std::vector<double>(n, kInf));
  for (const auto& node : aug.imaginary_nodes(K)) {
    const auto& sp = routes[static_cast<std::size_t>(K)].at(node.host);
    if (sp.reached[aug.destination()]) {
      suffix[static_cast<std::size_t>(K)][node.host] = sp.cost[aug.destination()];
    }
  }
  for (int k = K - 1; k >= 1; --k) {
    for (const auto& node : aug.imaginary_nodes(k)) {
      const auto& sp = routes[static_cast<std::size_t>(k)].at(node.host);
      double best = kInf;
      for (const auto& next : aug.imaginary_nodes(k + 1)) {
        const double tail = suffix[static_cast<std::size_t>(k + 1)][next.host];
        if (!sp.reached[next.host] || std::isinf(tail)) continue;
        best = std::min(best, sp.cost[next.host] + next.comp_cost + tail);
      }
      suffix[static_cast<std::size_t>(k)][node.host] = best;
    }
  }
  // Forward pass: the smallest host achieving the optimum at each slot.
  Tour tour;
  NodeIndex at = aug.source();
  double remaining = kInf;
  const ShortestPaths* sp = &routes[0].at(at);
  for (const auto& next : aug.imaginary_nodes(1)) {
    const double tail = suffix[1][next.host];
    if (!sp->reached[next.host] || std::isinf(tail)) continue;
    remaining = std::min(remaining, sp->cost[next.host] + next.comp_cost + tail);
  }
  if (std::isinf(remaining)) {
    throw InfeasibleError("no service path connects the source, the hosts and the destination");
  }
  tour.cost = remaining;
  for (int k = 1; k <= K; ++k) {
    const ImaginaryNode* chosen = nullptr;
    for (const auto& next : aug.imaginary_nodes(k)) {
      const double tail = suffix[static_cast<std::size_t>(k)][next.host];
      if (!sp->reached[next.host] || std::isinf(tail)) continue;
      if (sp->cost[next.host] + next.comp_cost + tail == remaining) {
        chosen = &next;
        break;
      }
    }
    if (chosen == nullptr) throw InfeasibleError("tour reconstruction failed");
    tour.path.routes.push_back(sp->route_to(at, chosen->host));
    tour.path.hosts.push_back(chosen->host);
    remaining = suffix[static_cast<std::size_t>(k)][chosen->host];
    at = chosen->host;
    sp = &routes[static_cast<std::size_t>(k)].at(at);
  }
  tour.path.routes.push_back(sp->route_to(at, aug.destination()));
  return tour;
}

std::vector<std::vector<AugLink>> encode_links(const ServicePath& path, NodeIndex source,
                                               NodeIndex destination) {
  if (path.routes.empty() || path.routes.front().empty() || path.routes.back().empty() ||
      path.routes.front().front() != source || path.routes.back().back() != destination) {
    throw ValidationError("service path does not run from the source to the destination");
  }
  const int K = path.submodel_count();
  if (path.routes.size() != static_cast<std::size_t>(K) + 1) {
    throw ValidationError("service path needs K+1 routes");
  }
  std::vector<std::vector<AugLink>> x(static_cast<std::size_t>(K) + 1);
  for (int subpath = 1; subpath <= K + 1; ++subpath) {
    auto& links = x[static_cast<std::size_t>(subpath - 1)];
    const auto& route = path.routes[static_cast<std::size_t>(subpath - 1)];
    if (subpath > 1) {
      const NodeIndex from = path.hosts[static_cast<std::size_t>(subpath - 2)];
      links.push_back({AugNode{from, subpath - 1}, AugNode{from, 0}});
    }
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
      links.push_back({AugNode{route[i], 0}, AugNode{route[i + 1], 0}});
    }
    if (subpath <= K) {
      const NodeIndex to = path.hosts[static_cast<std::size_t>(subpath - 1)];
      links.push_back({AugNode{to, 0}, AugNode{to, subpath}});
    }
  }
  return x;
}

std::vector<std::string> validate_link_sets(const std::vector<std::vector<AugLink>>& x,
                                            const PhysicalNetwork& network,
                                            const PlacementCandidates& candidates,
                                            NodeIndex source, NodeIndex destination) {
  std::vector<std::string> errors;
  const int K = candidates.slot_count();
  if (x.size() != static_cast<std::size_t>(K) + 1) {
    errors.push_back("expected " + std::to_string(K + 1) + " subpaths, got " +
                     std::to_string(x.size()));
    return errors;
  }
  auto name = [&](const AugNode& v) {
    const std::string id = v.node < network.node_count() ? network.node(v.node).id : "?";
    return v.slot == 0 ? id : id + "^" + std::to_string(v.slot);
  };
  std::vector<NodeIndex> entered(static_cast<std::size_t>(K) + 1, 0);
  std::vector<NodeIndex> exited(static_cast<std::size_t>(K) + 1, 0);
  for (int k = 1; k <= K + 1; ++k) {
    const std::string where = "subpath " + std::to_string(k) + ": ";
    const auto& links = x[static_cast<std::size_t>(k - 1)];
    // Flow balance with the imaginary nodes of one slot merged into a single node.
    auto key = [](const AugNode& v) { return v.slot == 0 ? AugNode{v.node, 0} : AugNode{0, v.slot}; };
    std::map<AugNode, int> balance;
    std::map<AugNode, int> in_degree;
    std::map<AugNode, int> out_degree;
    std::map<AugNode, AugNode> successor;
    bool structural_ok = true;
    for (const AugLink& link : links) {
      const AugNode& a = link.from;
      const AugNode& b = link.to;
      if (a.node >= network.node_count() || b.node >= network.node_count()) {
        errors.push_back(where + "link references a node off the network");
        structural_ok = false;
        continue;
      }
      if (a.slot == 0 && b.slot == 0) {
        if (!network.find_link(a.node, b.node)) {
          errors.push_back(where + "no physical link " + name(a) + " -> " + name(b));
        }
      } else if (a.slot == 0 || b.slot == 0) {
        if (a.node != b.node) {
          errors.push_back(where + "imaginary link " + name(a) + " -> " + name(b) +
                           " joins different nodes");
        }
      } else {
        errors.push_back(where + "link between two imaginary nodes " + name(a) + " -> " + name(b));
      }
      for (const AugNode* v : {&a, &b}) {
        if (v->slot < 0 || v->slot > K) {
          errors.push_back(where + "slot out of range at " + name(*v));
          structural_ok = false;
        } else if (v->slot > 0 && !candidates.contains(v->slot, v->node)) {
          errors.push_back(where + name(*v) + " is not a placement candidate");
        }
      }
      if (b.slot != 0 && b.slot != k) {
        errors.push_back(where + "enters imaginary node " + name(b) + " of another slot");
      }
      if (a.slot != 0 && a.slot != k - 1) {
        errors.push_back(where + "leaves imaginary node " + name(a) + " of another slot");
      }
      if (b.slot == k && k <= K) entered[static_cast<std::size_t>(k)] = b.node;
      if (a.slot == k - 1 && a.slot > 0) exited[static_cast<std::size_t>(k - 1)] = a.node;
      balance[key(a)] += 1;
      balance[key(b)] -= 1;
      ++out_degree[a];
      ++in_degree[b];
      successor[a] = b;
    }
    if (!structural_ok) continue;
    const AugNode origin = k == 1 ? AugNode{source, 0} : AugNode{0, k - 1};
    const AugNode sink = k == K + 1 ? AugNode{destination, 0} : AugNode{0, k};
    if (balance[origin] != 1) errors.push_back(where + "does not leave its origin");
    if (balance[sink] != -1) errors.push_back(where + "does not reach its sink");
    for (const auto& [v, net_flow] : balance) {
      int expected = 0;
      if (v == origin) expected += 1;
      if (v == sink) expected -= 1;
      if (net_flow != expected) {
        errors.push_back(where + "flow conservation fails at " +
                         (v.slot == 0 ? name(v) : "slot " + std::to_string(v.slot)));
      }
    }
    if (links.empty()) {
      const bool trivial = !(origin == sink);
      if (trivial) errors.push_back(where + "empty subpath");
      continue;
    }
    for (const auto& [v, d] : in_degree) {
      if (d > 1) errors.push_back(where + "revisits " + name(v));
    }
    for (const auto& [v, d] : out_degree) {
      if (d > 1) errors.push_back(where + "branches at " + name(v));
    }
    // Walk from the origin and require every link to be on the walk.
    AugNode start{};
    bool found = false;
    for (const AugLink& link : links) {
      if (key(link.from) == origin && in_degree.find(link.from) == in_degree.end()) {
        start = link.from;
        found = true;
        break;
      }
    }
    if (!found) {
      errors.push_back(where + "does not start at its origin");
      continue;
    }
    std::set<AugNode> visited{start};
    AugNode at = start;
    std::size_t walked = 0;
    while (successor.count(at) != 0 && walked <= links.size()) {
      at = successor.at(at);
      ++walked;
      if (!visited.insert(at).second) {
        errors.push_back(where + "contains a loop at " + name(at));
        break;
      }
    }
    if (walked != links.size()) errors.push_back(where + "is not one connected path");
    if (!(key(at) == sink)) errors.push_back(where + "does not end at its sink");
  }
  for (int k = 1; k <= K; ++k) {
    if (entered[static_cast<std::size_t>(k)] != exited[static_cast<std::size_t>(k)]) {
      errors.push_back("subpaths " + std::to_string(k) + " and " + std::to_string(k + 1) +
                       " meet at different imaginary nodes");
    }
  }
  return errors;
}

std::string describe_path(const ServicePath& path, const PhysicalNetwork& network) {
  std::string out;
  for (std::size_t k = 0; k < path.hosts.size(); ++k) {
    out += "submodel " + std::to_string(k + 1) + " host " + network.node(path.hosts[k]).id + "\n";
  }
  for (std::size_t r = 0; r < path.routes.size(); ++r) {
    out += "subpath " + std::to_string(r + 1) + ":";
    for (std::size_t i = 0; i < path.routes[r].size(); ++i) {
      out += (i == 0 ? " " : " -> ") + network.node(path.routes[r][i]).id;
    }
    out += "\n";
  }
  return out;
}

}  // namespace splitchain
