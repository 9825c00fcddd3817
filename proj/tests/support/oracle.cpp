// SPDX-License-Identifier: Apache-2.0
#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <string>

namespace oracle {

using namespace splitchain;

namespace {

int pick(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

double real(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double value(std::mt19937_64& rng, const Shape& shape, int int_hi, double real_lo, double real_hi) {
  return shape.integral ? pick(rng, 0, int_hi) : real(rng, real_lo, real_hi);
}

}  // namespace

Scenario random_scenario(std::mt19937_64& rng, const Shape& shape) {
  const int n = pick(rng, shape.min_nodes, shape.max_nodes);
  const int L = pick(rng, shape.min_layers, shape.max_layers);
  const int K = pick(rng, 2, std::min(shape.max_submodels, L));
  const int batch = pick(rng, 1, 4);
  const Mode mode = pick(rng, 0, 1) == 0 ? Mode::Inference : Mode::Training;

  std::vector<LayerProfile> layers;
  for (int l = 1; l <= L; ++l) {
    LayerProfile p;
    p.layer_id = l;
    p.rho_fw = value(rng, shape, 9, 1e6, 8e9);
    p.rho_bw = value(rng, shape, 9, 1e6, 16e9);
    p.delta_fw = value(rng, shape, 9, 4e3, 4e6);
    p.delta_bw = value(rng, shape, 9, 4e3, 4e6);
    p.r_mem = value(rng, shape, 9, 1e6, 4e8);
    p.r_disk = value(rng, shape, 9, 1e6, 4e8);
    layers.push_back(p);
  }
  ModelProfile model("random", std::move(layers));

  std::vector<NodeSpec> nodes;
  for (int i = 0; i < n; ++i) {
    NodeSpec node;
    node.id = "n" + std::to_string(i);
    ComputeSpec& spec = node.compute;
    if (shape.integral) {
      const int pieces = pick(rng, 1, 2);
      if (pieces == 2) spec.pieces.push_back({pick(rng, 1, 3), double(pick(rng, 0, 3)), double(pick(rng, 0, 3))});
      spec.pieces.push_back({std::nullopt, double(pick(rng, 0, 3)), double(pick(rng, 0, 3))});
      spec.alpha_tau = pick(rng, 0, 2);
      spec.beta_tau = pick(rng, 0, 2);
      spec.time_unit_s = 1.0;
      node.c_mem = pick(rng, 8, 60);
      node.c_disk = pick(rng, 8, 60);
    } else {
      const bool cpu = pick(rng, 0, 2) == 0;
      spec.pieces.push_back({std::nullopt, real(rng, 1e-12, cpu ? 2e-10 : 1e-11),
                             real(rng, 1e-12, cpu ? 2e-10 : 2e-11)});
      spec.alpha_tau = real(rng, 0.0, 1e-3);
      spec.beta_tau = real(rng, 0.0, 1e-3);
      spec.time_unit_s = 1e-3;
      node.c_mem = real(rng, 5e8, 3e9);
      node.c_disk = node.c_mem;
    }
    nodes.push_back(std::move(node));
  }
  std::vector<PhysicalNetwork::LinkInput> links;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      if (real(rng, 0.0, 1.0) >= shape.link_probability) continue;
      PhysicalNetwork::LinkInput in;
      in.src = "n" + std::to_string(a);
      in.dst = "n" + std::to_string(b);
      if (shape.integral) {
        in.r_fw = 8.0 * pick(rng, 1, 2);
        in.r_bw = 8.0 * pick(rng, 1, 2);
        in.d_fw = pick(rng, 0, 5);
        in.d_bw = pick(rng, 0, 5);
      } else {
        in.r_fw = real(rng, 1e8, 1e10);
        in.r_bw = real(rng, 1e8, 1e10);
        in.d_fw = real(rng, 1e-4, 1.5e-2);
        in.d_bw = real(rng, 1e-4, 1.5e-2);
      }
      links.push_back(std::move(in));
    }
  }
  PhysicalNetwork net(std::move(nodes), links);

  const NodeIndex s = static_cast<NodeIndex>(pick(rng, 0, n - 1));
  NodeIndex d = static_cast<NodeIndex>(pick(rng, 0, n - 2));
  if (d >= s) ++d;
  std::vector<NodeIndex> pool;
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(n); ++i) {
    if (!shape.exclude_endpoints || (i != s && i != d)) pool.push_back(i);
  }
  if (pool.empty()) {
    for (NodeIndex i = 0; i < static_cast<NodeIndex>(n); ++i) pool.push_back(i);
  }
  std::vector<std::vector<NodeIndex>> slots{{s}};
  for (int k = 2; k < K; ++k) {
    std::vector<NodeIndex> order = pool;
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(static_cast<std::size_t>(
        pick(rng, 1, static_cast<int>(std::min(shape.max_candidates, order.size())))));
    slots.push_back(std::move(order));
  }
  slots.push_back({d});
  PlacementCandidates candidates(std::move(slots), s, d, net.node_count());
  Request request{"random", s, d, batch, mode};
  return Scenario{std::move(net), std::move(model), request, std::move(candidates)};
}

std::vector<std::vector<int>> all_splits(int layer_count, int submodels) {
  std::vector<std::vector<int>> out;
  std::vector<int> starts;
  std::function<void(int)> rec = [&](int from) {
    if (static_cast<int>(starts.size()) == submodels - 1) {
      out.push_back(starts);
      return;
    }
    const int remaining = submodels - 1 - static_cast<int>(starts.size());
    for (int s = from; s <= layer_count - remaining + 1; ++s) {
      starts.push_back(s);
      rec(s + 1);
      starts.pop_back();
    }
  };
  rec(2);
  return out;
}

std::vector<std::vector<NodeIndex>> simple_paths(const PhysicalNetwork& net, NodeIndex a,
                                                 NodeIndex b) {
  std::vector<std::vector<NodeIndex>> out;
  std::vector<NodeIndex> path{a};
  std::vector<bool> on_path(net.node_count(), false);
  on_path[a] = true;
  std::function<void(NodeIndex)> rec = [&](NodeIndex u) {
    if (u == b) {
      out.push_back(path);
      return;
    }
    for (const LinkSpec& link : net.links()) {
      if (link.src != u || on_path[link.dst]) continue;
      on_path[link.dst] = true;
      path.push_back(link.dst);
      rec(link.dst);
      path.pop_back();
      on_path[link.dst] = false;
    }
  };
  rec(a);
  return out;
}

double comp_seconds(const NodeSpec& node, const ModelProfile& model, int first, int last,
                    int batch, bool backward) {
  const ComputePiece* piece = nullptr;
  for (const auto& p : node.compute.pieces) {
    if (!p.max_batch || batch <= *p.max_batch) {
      piece = &p;
      break;
    }
  }
  double flops = 0.0;
  for (const auto& layer : model.layers()) {
    if (layer.layer_id >= first && layer.layer_id <= last) {
      flops += backward ? layer.rho_bw : layer.rho_fw;
    }
  }
  const double kappa = (piece->alpha_kappa * batch + piece->beta_kappa) * flops;
  const double tau = node.compute.alpha_tau * batch + node.compute.beta_tau;
  return (kappa + tau) * node.compute.time_unit_s;
}

bool fits(const NodeSpec& node, const ModelProfile& model, int first, int last, int batch,
          bool training) {
  double mem = 0.0;
  double disk = 0.0;
  double peak = 0.0;
  for (const auto& layer : model.layers()) {
    if (layer.layer_id < first || layer.layer_id > last) continue;
    mem += layer.r_mem;
    disk += layer.r_disk;
    peak = std::max(peak, layer.delta_fw);
    if (training) peak = std::max(peak, layer.delta_bw);
  }
  return disk <= node.c_disk && mem + batch * peak <= node.c_mem;
}

std::optional<double> objective(const Scenario& sc, const std::vector<int>& starts,
                                const std::vector<NodeIndex>& hosts,
                                const std::vector<std::vector<NodeIndex>>& routes) {
  const int K = static_cast<int>(hosts.size());
  const int L = sc.model.layer_count();
  const bool training = sc.request.mode == Mode::Training;
  const int b = sc.request.batch;
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    const int first = k == 0 ? 1 : starts[static_cast<std::size_t>(k - 1)];
    const int last = k == K - 1 ? L : starts[static_cast<std::size_t>(k)] - 1;
    const NodeSpec& host = sc.network.node(hosts[static_cast<std::size_t>(k)]);
    total += comp_seconds(host, sc.model, first, last, b, false);
    if (training) total += comp_seconds(host, sc.model, first, last, b, true);
    const auto& route = routes[static_cast<std::size_t>(k + 1)];
    const auto& boundary = sc.model.layers()[static_cast<std::size_t>(last - 1)];
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
      const LinkSpec* link = nullptr;
      for (const LinkSpec& candidate : sc.network.links()) {
        if (candidate.src == route[i] && candidate.dst == route[i + 1]) link = &candidate;
      }
      if (link == nullptr) return std::nullopt;
      const double fw_bytes = k < K - 1 ? boundary.delta_fw : 0.0;
      total += b * fw_bytes * 8.0 / link->r_fw + link->d_fw;
      if (training) {
        const double bw_bytes = k < K - 1 ? boundary.delta_bw : 0.0;
        total += b * bw_bytes * 8.0 / link->r_bw + link->d_bw;
      }
    }
  }
  return total;
}

std::optional<Best> brute_force_for_split(const Scenario& sc, const std::vector<int>& starts) {
  const int K = sc.candidates.slot_count();
  const int L = sc.model.layer_count();
  const NodeIndex s = sc.request.source;
  const NodeIndex d = sc.request.destination;
  std::optional<Best> best;
  std::vector<NodeIndex> hosts;
  std::vector<std::vector<NodeIndex>> routes;
  std::uint64_t combinations = 0;

  std::function<void()> choose_routes = [&] {
    const std::size_t r = routes.size();
    if (r == static_cast<std::size_t>(K) + 1) {
      ++combinations;
      auto value = objective(sc, starts, hosts, routes);
      if (value && (!best || *value < best->objective)) {
        best = Best{*value, starts, hosts, routes, 0};
      }
      return;
    }
    const NodeIndex from = r == 0 ? s : hosts[r - 1];
    const NodeIndex to = r == static_cast<std::size_t>(K) ? d : hosts[r];
    for (auto& route : simple_paths(sc.network, from, to)) {
      routes.push_back(std::move(route));
      choose_routes();
      routes.pop_back();
    }
  };
  std::function<void(int)> choose_hosts = [&](int k) {
    if (k > K) {
      choose_routes();
      return;
    }
    const int first = k == 1 ? 1 : starts[static_cast<std::size_t>(k - 2)];
    const int last = k == K ? L : starts[static_cast<std::size_t>(k - 1)] - 1;
    for (NodeIndex h : sc.candidates.slot(k)) {
      if (!fits(sc.network.node(h), sc.model, first, last, sc.request.batch,
                sc.request.mode == Mode::Training)) {
        continue;
      }
      hosts.push_back(h);
      choose_hosts(k + 1);
      hosts.pop_back();
    }
  };
  choose_hosts(1);
  if (best) best->combinations = combinations;
  return best;
}

std::optional<Best> brute_force(const Scenario& sc) {
  std::optional<Best> best;
  std::uint64_t combinations = 0;
  for (const auto& starts : all_splits(sc.model.layer_count(), sc.candidates.slot_count())) {
    auto candidate = brute_force_for_split(sc, starts);
    if (!candidate) continue;
    combinations += candidate->combinations;
    if (!best || candidate->objective < best->objective) best = std::move(candidate);
  }
  if (best) best->combinations = combinations;
  return best;
}

double haversine_m(double lat1, double lon1, double lat2, double lon2, double radius_m) {
  const double rad = std::numbers::pi / 180.0;
  const double p1 = lat1 * rad;
  const double p2 = lat2 * rad;
  const double dp = (lat2 - lat1) * rad;
  const double dl = (lon2 - lon1) * rad;
  const double h = std::sin(dp / 2) * std::sin(dp / 2) +
                   std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * radius_m * std::asin(std::sqrt(h));
}

}  // namespace oracle
