// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "splitchain/latency.hpp"
#include "splitchain/network.hpp"
#include "splitchain/profiles.hpp"

namespace splitchain {

struct ServicePath;
class PlacementCandidates;

/// Partition of layers 1..L into K contiguous, ordered, non-empty sub-models.
/// Stored as the start layers s^2 < ... < s^K of sub-models 2..K.
class SplitAssignment {
 public:
  /// Throws ValidationError unless 2 <= K <= L and the starts are strictly
  /// increasing within [2, L].
  SplitAssignment(int layer_count, std::vector<int> starts);

  static SplitAssignment from_sizes(int layer_count, std::span<const int> sizes);

  int layer_count() const { return layer_count_; }
  int submodel_count() const { return static_cast<int>(starts_.size()) + 1; }
  std::span<const int> starts() const { return starts_; }

  /// Layers of sub-model k (1-based).
  LayerRange range(int k) const;
  std::vector<int> sizes() const;

  bool operator==(const SplitAssignment&) const = default;

 private:
  int layer_count_;
  std::vector<int> starts_;
};

std::string to_string(const SplitAssignment& split);

/// y[k][l] = 1 iff layer l+1 belongs to sub-model k+1 (0-based storage).
using SplitMatrix = std::vector<std::vector<std::uint8_t>>;

SplitMatrix to_matrix(const SplitAssignment& split);

struct MatrixViolation {
  std::string constraint;  // e.g. "first-layer", "contiguity"
  int submodel = 0;        // 1-based, 0 when not row-specific
  int layer = 0;           // 1-based, 0 when not column-specific
};

/// Checks the binary assignment constraints literally: first layer on the first
/// sub-model, last layer on the last, every layer assigned exactly once, every
/// sub-model non-empty, contiguous rows and sequential order. Empty = valid.
std::vector<MatrixViolation> validate_matrix(const SplitMatrix& y);

/// Inverse of to_matrix; throws ValidationError if the matrix is invalid.
SplitAssignment from_matrix(const SplitMatrix& y);

struct CapacityCheck {
  double disk_required = 0.0;
  double mem_required = 0.0;
  bool disk_ok = true;
  bool mem_ok = true;

  bool feasible() const { return disk_ok && mem_ok; }
};

/// Storage: sum of r_disk <= C_disk. Memory: sum of r_mem plus b times the
/// largest smashed output of any layer in the range over the mode's
/// directions <= C_mem.
CapacityCheck capacity_feasible(const NodeSpec& node, const ModelProfile& model, LayerRange range,
                                int batch, Mode mode);

/// Sizes differ by at most one; the first L mod K sub-models get the extra layer.
SplitAssignment even_split(int layer_count, int submodels);

struct Segmentation {
  SplitAssignment split;
  double cost = 0.0;
};

/// Optimal split for fixed hosts and routes. Segment k costs its computation
/// on hosts[k] plus the transmission and propagation of its output over the
/// physical links of subpath k+1; segments that break host capacity cost +inf.
/// Ties prefer the smaller predecessor boundary. Throws InfeasibleError when
/// no split has finite cost.
Segmentation k_sequence_segmentation(const ServicePath& path, const Request& request,
                                     const PhysicalNetwork& network, const ModelProfile& model,
                                     const PlacementCandidates& candidates);

}  // namespace splitchain
