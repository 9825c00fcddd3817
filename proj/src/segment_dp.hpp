// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "splitchain/latency.hpp"

namespace splitchain::detail {

struct SegmentDpResult {
  std::vector<int> starts;
  double cost = std::numeric_limits<double>::infinity();
};

/// Segment cost of sub-model k over `range`; +inf marks an unusable segment.
using SegmentCost = std::function<double(int k, LayerRange range)>;

/// Splits layers 1..L into K segments minimizing the summed segment cost.
/// A predecessor replaces the incumbent only when cheaper by more than
/// `relative_tie` of the larger magnitude, so ties keep the leftmost boundary.
/// Returns nullopt when every split has infinite cost.
std::optional<SegmentDpResult> segment_dp(int layer_count, int submodels, const SegmentCost& cost,
                                          double relative_tie = 0.0);

}  // namespace splitchain::detail
