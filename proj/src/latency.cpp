// SPDX-License-Identifier: Apache-2.0
#include "splitchain/latency.hpp"

#include <cmath>
#include <string>

#include "splitchain/chaining.hpp"
#include "splitchain/error.hpp"
#include "splitchain/splitting.hpp"

namespace splitchain {

void check_range(const ModelProfile& model, LayerRange range) {
  if (range.count < 1 || range.first < 1 || range.last() > model.layer_count()) {
    throw ValidationError("layer range [" + std::to_string(range.first) + ", " +
                          std::to_string(range.last()) + "] outside 1.." +
                          std::to_string(model.layer_count()));
  }
}

double workload(const ModelProfile& model, LayerRange range, Direction dir) {
  check_range(model, range);
  double sum = 0.0;
  for (int l = range.first; l <= range.last(); ++l) {
    const auto& layer = model.layer(l);
    sum += dir == Direction::Forward ? layer.rho_fw : layer.rho_bw;
  }
  return sum;
}

double comp_delay(const NodeSpec& node, const ModelProfile& model, LayerRange range, int batch,
                  Direction dir) {
  if (batch < 1) throw ValidationError("batch size must be >= 1");
  const double flops = workload(model, range, dir);
  const ComputeSpec& spec = node.compute;
  const ComputePiece& piece = spec.piece_for(batch);
  const double b = batch;
  const double units =
      (piece.alpha_kappa * b + piece.beta_kappa) * flops + (spec.alpha_tau * b + spec.beta_tau);
  return units * spec.time_unit_s;
}

double smashed_bytes(const ModelProfile& model, int boundary, Direction dir) {
  if (boundary < 1 || boundary >= model.layer_count()) {
    throw ValidationError("boundary " + std::to_string(boundary) + " outside 1.." +
                          std::to_string(model.layer_count() - 1));
  }
  const auto& layer = model.layer(boundary);
  return dir == Direction::Forward ? layer.delta_fw : layer.delta_bw;
}

double trans_delay(double payload_bytes, int batch, double bandwidth_bps) {
  if (!(bandwidth_bps > 0.0)) throw ValidationError("bandwidth must be > 0");
  if (batch < 1) throw ValidationError("batch size must be >= 1");
  return static_cast<double>(batch) * payload_bytes * 8.0 / bandwidth_bps;
}

LatencyBreakdown total_latency(const PhysicalNetwork& network, const ModelProfile& model,
                               const Request& request, const SplitAssignment& split,
                               const ServicePath& path) {
  const int K = split.submodel_count();
  if (split.layer_count() != model.layer_count()) {
    throw ValidationError("split and model disagree on the layer count");
  }
  if (path.submodel_count() != K || path.routes.size() != static_cast<std::size_t>(K) + 1) {
    throw ValidationError("service path does not match the split's sub-model count");
  }
  for (std::size_t r = 0; r < path.routes.size(); ++r) {
    const auto& route = path.routes[r];
    if (route.empty()) throw ValidationError("empty route in service path");
    const NodeIndex from = r == 0 ? request.source : path.hosts[r - 1];
    const NodeIndex to = r == path.hosts.size() ? request.destination : path.hosts[r];
    if (route.front() != from || route.back() != to) {
      throw ValidationError("route " + std::to_string(r + 1) + " does not join its endpoints");
    }
  }
  for (NodeIndex h : path.hosts) {
    if (h >= network.node_count()) throw ValidationError("unknown host in service path");
  }

  LatencyBreakdown out;
  for (int k = 1; k <= K; ++k) {
    const NodeSpec& host = network.node(path.hosts[static_cast<std::size_t>(k - 1)]);
    for (Direction dir : directions(request.mode)) {
      const double c = comp_delay(host, model, split.range(k), request.batch, dir);
      (dir == Direction::Forward ? out.comp_fw : out.comp_bw) += c;
    }
  }
  for (int k = 1; k <= K; ++k) {
    const auto& route = path.routes[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
      auto link_index = network.find_link(route[i], route[i + 1]);
      if (!link_index) {
        throw ValidationError("route uses missing link " + network.node(route[i]).id + " -> " +
                              network.node(route[i + 1]).id);
      }
      const LinkSpec& link = network.link(*link_index);
      for (Direction dir : directions(request.mode)) {
        const bool fw = dir == Direction::Forward;
        const double payload = k < K ? smashed_bytes(model, split.range(k).last(), dir) : 0.0;
        const double t = trans_delay(payload, request.batch, fw ? link.r_fw : link.r_bw);
        (fw ? out.trans_fw : out.trans_bw) += t;
        (fw ? out.prop_fw : out.prop_bw) += fw ? link.d_fw : link.d_bw;
      }
    }
  }
  out.total = out.comp_fw + out.trans_fw + out.prop_fw;
  if (request.mode == Mode::Training) out.total += out.comp_bw + out.trans_bw + out.prop_bw;
  return out;
}

}  // namespace splitchain
