// SPDX-License-Identifier: Apache-2.0
#include "splitchain/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "segment_dp.hpp"
#include "splitchain/chaining.hpp"
#include "splitchain/error.hpp"

namespace splitchain {

SplitAssignment::SplitAssignment(int layer_count, std::vector<int> starts)
    : layer_count_(layer_count), starts_(std::move(starts)) {
  const int K = submodel_count();
  if (K < 2 || K > layer_count_) {
    throw ValidationError("sub-model count " + std::to_string(K) + " outside 2.." +
                          std::to_string(layer_count_));
  }
  int previous = 1;
  for (int s : starts_) {
    if (s <= previous || s > layer_count_) {
      throw ValidationError("split starts must be strictly increasing within 2.." +
                            std::to_string(layer_count_));
    }
    previous = s;
  }
}

SplitAssignment SplitAssignment::from_sizes(int layer_count, std::span<const int> sizes) {
  std::vector<int> starts;
  int next = 1;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] < 1) throw ValidationError("sub-model sizes must be >= 1");
    next += sizes[k];
    if (k + 1 < sizes.size()) starts.push_back(next);
  }
  if (next != layer_count + 1) throw ValidationError("sub-model sizes must sum to the layer count");
  return SplitAssignment(layer_count, std::move(starts));
}

LayerRange SplitAssignment::range(int k) const {
  const int K = submodel_count();
  if (k < 1 || k > K) throw ValidationError("sub-model index out of range");
  const int first = k == 1 ? 1 : starts_[static_cast<std::size_t>(k - 2)];
  const int next = k == K ? layer_count_ + 1 : starts_[static_cast<std::size_t>(k - 1)];
  return LayerRange{first, next - first};
}

std::vector<int> SplitAssignment::sizes() const {
  std::vector<int> out;
  for (int k = 1; k <= submodel_count(); ++k) out.push_back(range(k).count);
  return out;
}

std::string to_string(const SplitAssignment& split) {
  std::string out = "[";
  for (int k = 1; k <= split.submodel_count(); ++k) {
    const LayerRange r = split.range(k);
    if (k > 1) out += " | ";
    out += std::to_string(r.first);
    if (r.count > 1) out += "-" + std::to_string(r.last());
  }
  return out + "]";
}

SplitMatrix to_matrix(const SplitAssignment& split) {
  const int K = split.submodel_count();
  const int L = split.layer_count();
  SplitMatrix y(static_cast<std::size_t>(K), std::vector<std::uint8_t>(static_cast<std::size_t>(L), 0));
  for (int k = 1; k <= K; ++k) {
    const LayerRange r = split.range(k);
    for (int l = r.first; l <= r.last(); ++l) {
      y[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(l - 1)] = 1;
    }
  }
  return y;
}

std::vector<MatrixViolation> validate_matrix(const SplitMatrix& y) {
  std::vector<MatrixViolation> out;
  const int K = static_cast<int>(y.size());
  if (K < 2) {
    out.push_back({"shape", 0, 0});
    return out;
  }
  const int L = static_cast<int>(y.front().size());
  for (int k = 0; k < K; ++k) {
    const auto& row = y[static_cast<std::size_t>(k)];
    if (static_cast<int>(row.size()) != L) {
      out.push_back({"shape", k + 1, 0});
      return out;
    }
    for (int l = 0; l < L; ++l) {
      if (row[static_cast<std::size_t>(l)] > 1) out.push_back({"binary", k + 1, l + 1});
    }
  }
  if (!out.empty()) return out;
  if (K > L) out.push_back({"shape", 0, 0});
  auto at = [&](int k, int l) { return y[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)]; };

  if (L > 0 && at(0, 0) != 1) out.push_back({"first-layer", 1, 1});
  if (L > 0 && at(K - 1, L - 1) != 1) out.push_back({"last-layer", K, L});
  for (int l = 0; l < L; ++l) {
    int assigned = 0;
    for (int k = 0; k < K; ++k) assigned += at(k, l);
    if (assigned != 1) out.push_back({"single-assignment", 0, l + 1});
  }
  std::vector<int> first(static_cast<std::size_t>(K), -1);
  std::vector<int> last(static_cast<std::size_t>(K), -1);
  for (int k = 0; k < K; ++k) {
    int ones = 0;
    for (int l = 0; l < L; ++l) {
      if (at(k, l) == 0) continue;
      ++ones;
      if (first[static_cast<std::size_t>(k)] < 0) first[static_cast<std::size_t>(k)] = l;
      last[static_cast<std::size_t>(k)] = l;
    }
    if (ones == 0) {
      out.push_back({"non-empty", k + 1, 0});
      continue;
    }
    if (last[static_cast<std::size_t>(k)] - first[static_cast<std::size_t>(k)] + 1 != ones) {
      for (int l = first[static_cast<std::size_t>(k)]; l <= last[static_cast<std::size_t>(k)]; ++l) {
        if (at(k, l) == 0) {
          out.push_back({"contiguity", k + 1, l + 1});
          break;
        }
      }
    }
  }
  int previous = -1;
  for (int k = 0; k < K; ++k) {
    if (first[static_cast<std::size_t>(k)] < 0) continue;
    if (previous >= 0 && first[static_cast<std::size_t>(k)] <= last[static_cast<std::size_t>(previous)]) {
      out.push_back({"order", k + 1, first[static_cast<std::size_t>(k)] + 1});
    }
    previous = k;
  }
  return out;
}

SplitAssignment from_matrix(const SplitMatrix& y) {
  const auto violations = validate_matrix(y);
  if (!violations.empty()) {
    throw ValidationError("invalid split matrix: " + violations.front().constraint);
  }
  const int L = static_cast<int>(y.front().size());
  std::vector<int> starts;
  for (std::size_t k = 1; k < y.size(); ++k) {
    for (int l = 0; l < L; ++l) {
      if (y[k][static_cast<std::size_t>(l)] == 1) {
        starts.push_back(l + 1);
        break;
      }
    }
  }
  return SplitAssignment(L, std::move(starts));
}

CapacityCheck capacity_feasible(const NodeSpec& node, const ModelProfile& model, LayerRange range,
                                int batch, Mode mode) {
  check_range(model, range);
  CapacityCheck out;
  double largest_output = 0.0;
  for (int l = range.first; l <= range.last(); ++l) {
    const auto& layer = model.layer(l);
    out.disk_required += layer.r_disk;
    out.mem_required += layer.r_mem;
    for (Direction dir : directions(mode)) {
      largest_output = std::max(largest_output,
                                dir == Direction::Forward ? layer.delta_fw : layer.delta_bw);
    }
  }
  out.mem_required += static_cast<double>(batch) * largest_output;
  out.disk_ok = out.disk_required <= node.c_disk;
  out.mem_ok = out.mem_required <= node.c_mem;
  return out;
}

SplitAssignment even_split(int layer_count, int submodels) {
  if (submodels < 2 || submodels > layer_count) {
    throw ValidationError("sub-model count " + std::to_string(submodels) + " outside 2.." +
                          std::to_string(layer_count));
  }
  std::vector<int> sizes(static_cast<std::size_t>(submodels), layer_count / submodels);
  for (int k = 0; k < layer_count % submodels; ++k) ++sizes[static_cast<std::size_t>(k)];
  return SplitAssignment::from_sizes(layer_count, sizes);
}

namespace detail {

std::optional<SegmentDpResult> segment_dp(int layer_count, int submodels, const SegmentCost& cost,
                                          double relative_tie) {
  const int L = layer_count;
  const int K = submodels;
  const double inf = std::numeric_limits<double>::infinity();
  // dp[k][e]: cheapest cover of layers 1..e by sub-models 1..k, sub-model k ending at e.
  std::vector<std::vector<double>> dp(static_cast<std::size_t>(K + 1),
                                      std::vector<double>(static_cast<std::size_t>(L + 1), inf));
  std::vector<std::vector<int>> prev(static_cast<std::size_t>(K + 1),
                                     std::vector<int>(static_cast<std::size_t>(L + 1), -1));
  auto better = [&](double candidate, double incumbent) {
    if (!(candidate < incumbent)) return false;
    if (std::isinf(incumbent)) return true;
    const double scale = std::max(std::abs(candidate), std::abs(incumbent));
    return incumbent - candidate > relative_tie * scale;
  };
  for (int e = 1; e <= L - (K - 1); ++e) {
    dp[1][static_cast<std::size_t>(e)] = cost(1, LayerRange{1, e});
  }
  for (int k = 2; k <= K; ++k) {
    const int lo = k == K ? L : k;
    const int hi = k == K ? L : L - (K - k);
    for (int e = lo; e <= hi; ++e) {
      double best = inf;
      int arg = -1;
      for (int p = k - 1; p < e; ++p) {
        const double head = dp[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(p)];
        if (std::isinf(head)) continue;
        const double seg = cost(k, LayerRange{p + 1, e - p});
        if (std::isinf(seg)) continue;
        const double candidate = head + seg;
        if (better(candidate, best)) {
          best = candidate;
          arg = p;
        }
      }
      dp[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)] = best;
      prev[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)] = arg;
    }
  }
  SegmentDpResult out;
  out.cost = dp[static_cast<std::size_t>(K)][static_cast<std::size_t>(L)];
  if (std::isinf(out.cost)) return std::nullopt;
  out.starts.assign(static_cast<std::size_t>(K - 1), 0);
  int e = L;
  for (int k = K; k >= 2; --k) {
    const int p = prev[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)];
    out.starts[static_cast<std::size_t>(k - 2)] = p + 1;
    e = p;
  }
  return out;
}

}  // namespace detail

Segmentation k_sequence_segmentation(const ServicePath& path, const Request& request,
                                     const PhysicalNetwork& network, const ModelProfile& model,
                                     const PlacementCandidates& candidates) {
  const int K = path.submodel_count();
  const int L = model.layer_count();
  if (K < 2 || K > L || path.routes.size() != static_cast<std::size_t>(K) + 1) {
    throw ValidationError("service path shape does not fit the model");
  }
  if (candidates.slot_count() != K) {
    throw ValidationError("candidate slots do not match the service path");
  }
  // Per-link terms of each outgoing subpath, split by direction.
  struct LinkTerm {
    double r = 0.0;
    double d = 0.0;
    Direction dir = Direction::Forward;
  };
  std::vector<std::vector<LinkTerm>> outgoing(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    const auto& route = path.routes[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
      auto link = network.find_link(route[i], route[i + 1]);
      if (!link) throw ValidationError("service path uses a missing link");
      const LinkSpec& spec = network.link(*link);
      for (Direction dir : directions(request.mode)) {
        const bool fw = dir == Direction::Forward;
        outgoing[static_cast<std::size_t>(k - 1)].push_back(
            {fw ? spec.r_fw : spec.r_bw, fw ? spec.d_fw : spec.d_bw, dir});
      }
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  auto cost = [&](int k, LayerRange range) {
    const NodeSpec& host = network.node(path.hosts[static_cast<std::size_t>(k - 1)]);
    if (!capacity_feasible(host, model, range, request.batch, request.mode).feasible()) return inf;
    double c = 0.0;
    for (Direction dir : directions(request.mode)) {
      c += comp_delay(host, model, range, request.batch, dir);
    }
    for (const LinkTerm& term : outgoing[static_cast<std::size_t>(k - 1)]) {
      const double payload = k < K ? smashed_bytes(model, range.last(), term.dir) : 0.0;
      c += trans_delay(payload, request.batch, term.r) + term.d;
    }
    return c;
  };
  auto result = detail::segment_dp(L, K, cost);
  if (!result) throw InfeasibleError("no split fits the hosts of the current service path");
  return Segmentation{SplitAssignment(L, std::move(result->starts)), result->cost};
}

}  // namespace splitchain
