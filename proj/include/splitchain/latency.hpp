// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splitchain/network.hpp"
#include "splitchain/profiles.hpp"

namespace splitchain {

class SplitAssignment;
struct ServicePath;

/// Contiguous layers [first, first + count - 1], 1-based.
struct LayerRange {
  int first = 1;
  int count = 1;

  int last() const { return first + count - 1; }
  bool operator==(const LayerRange&) const = default;
};

/// Throws ValidationError if the range is empty or leaves [1, L].
void check_range(const ModelProfile& model, LayerRange range);

/// Sum of per-layer FLOPs over the range.
double workload(const ModelProfile& model, LayerRange range, Direction dir);

/// Computation time of `range` on `node` at batch size b, in seconds.
double comp_delay(const NodeSpec& node, const ModelProfile& model, LayerRange range, int batch,
                  Direction dir);

/// Bytes emitted by a sub-model whose last layer is `boundary` (1 <= boundary <= L-1).
double smashed_bytes(const ModelProfile& model, int boundary, Direction dir);

/// b * payload * 8 / bandwidth, in seconds.
double trans_delay(double payload_bytes, int batch, double bandwidth_bps);

struct LatencyBreakdown {
  double comp_fw = 0.0;
  double comp_bw = 0.0;
  double trans_fw = 0.0;
  double trans_bw = 0.0;
  double prop_fw = 0.0;
  double prop_bw = 0.0;
  double total = 0.0;
};

/// End-to-end per-batch latency of a split and its service path. Computation
/// is charged on each host; transmission and propagation on every physical
/// link of subpaths 2..K+1. Training adds the backward terms over the same
/// links using backward bandwidths and delays.
LatencyBreakdown total_latency(const PhysicalNetwork& network, const ModelProfile& model,
                               const Request& request, const SplitAssignment& split,
                               const ServicePath& path);

}  // namespace splitchain
