// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace splitchain {

/// Per-layer cost profile. FLOPs and bytes, decimal units.
struct LayerProfile {
  int layer_id = 0;
  double rho_fw = 0.0;    // forward FLOPs
  double rho_bw = 0.0;    // backward FLOPs
  double delta_fw = 0.0;  // activation bytes emitted by this layer
  double delta_bw = 0.0;  // gradient bytes emitted by this layer
  double r_mem = 0.0;     // parameter memory footprint, bytes
  double r_disk = 0.0;    // parameter storage footprint, bytes

  bool operator==(const LayerProfile&) const = default;
};

/// Ordered layer profile of a global model. Immutable once constructed.
class ModelProfile {
 public:
  /// Throws ValidationError unless layer ids are exactly 1..L, L >= 2 and
  /// every numeric field is a finite non-negative value.
  ModelProfile(std::string model_id, std::vector<LayerProfile> layers);

  const std::string& model_id() const { return model_id_; }
  int layer_count() const { return static_cast<int>(layers_.size()); }
  std::span<const LayerProfile> layers() const { return layers_; }

  /// 1-based access, matching layer_id.
  const LayerProfile& layer(int layer_id) const;

  bool operator==(const ModelProfile&) const = default;

 private:
  std::string model_id_;
  std::vector<LayerProfile> layers_;
};

/// Parses a JSON profile document:
///   {"model_id": "...", "layers": [{"layer_id": 1, "rho_fw": ..., ...}, ...]}
/// Numeric fields accept numbers or decimal-suffixed strings ("236.02M").
ModelProfile load_model_profile(std::string_view text);

std::string dump_model_profile(const ModelProfile& model);

/// ResNet101 at building-block granularity (37 layers, 3x224x224 input, b = 1).
/// FLOPs are the published per-block values; activation/gradient sizes are exact
/// element counts of each block output times 4 bytes.
ModelProfile builtin_resnet101();

}  // namespace splitchain
