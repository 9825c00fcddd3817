// SPDX-License-Identifier: Apache-2.0
#include "splitchain/profiles.hpp"

#include <cmath>
#include <string>
#include <utility>

#include <json.hpp>

#include "splitchain/error.hpp"
#include "splitchain/quantity.hpp"

namespace splitchain {
namespace {

using nlohmann::json;

constexpr const char* kNumericFields[] = {"rho_fw", "rho_bw", "delta_fw", "delta_bw", "r_mem",
                                          "r_disk"};

void check_field(double value, int layer_id, const char* field) {
  if (!std::isfinite(value) || value < 0.0) {
    throw ValidationError("layer " + std::to_string(layer_id) + ": " + field +
                          " must be finite and >= 0");
  }
}

}  // namespace

ModelProfile::ModelProfile(std::string model_id, std::vector<LayerProfile> layers)
    : model_id_(std::move(model_id)), layers_(std::move(layers)) {
  if (layers_.size() < 2) {
    throw ValidationError("model '" + model_id_ + "' needs at least 2 layers, got " +
                          std::to_string(layers_.size()));
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& layer = layers_[i];
    const int expected = static_cast<int>(i) + 1;
    if (layer.layer_id != expected) {
      throw ValidationError("layer ids must be 1..L in order: position " +
                            std::to_string(expected) + " has id " +
                            std::to_string(layer.layer_id));
    }
    check_field(layer.rho_fw, expected, "rho_fw");
    check_field(layer.rho_bw, expected, "rho_bw");
    check_field(layer.delta_fw, expected, "delta_fw");
    check_field(layer.delta_bw, expected, "delta_bw");
    check_field(layer.r_mem, expected, "r_mem");
    check_field(layer.r_disk, expected, "r_disk");
  }
}

const LayerProfile& ModelProfile::layer(int layer_id) const {
  if (layer_id < 1 || layer_id > layer_count()) {
    throw ValidationError("layer " + std::to_string(layer_id) + " outside 1.." +
                          std::to_string(layer_count()));
  }
  return layers_[static_cast<std::size_t>(layer_id - 1)];
}

ModelProfile load_model_profile(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("profile document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array()) {
    throw ParseError("profile document needs a \"layers\" array");
  }
  std::string model_id = doc.value("model_id", std::string("model"));
  std::vector<LayerProfile> layers;
  for (const auto& record : doc["layers"]) {
    if (!record.is_object()) throw ParseError("layer record must be an object");
    if (!record.contains("layer_id") || !record["layer_id"].is_number_integer()) {
      throw ParseError("layer record needs an integer layer_id");
    }
    LayerProfile layer;
    layer.layer_id = record["layer_id"].get<int>();
    double* targets[] = {&layer.rho_fw,   &layer.rho_bw, &layer.delta_fw,
                         &layer.delta_bw, &layer.r_mem,  &layer.r_disk};
    for (std::size_t f = 0; f < std::size(kNumericFields); ++f) {
      const char* field = kNumericFields[f];
      if (!record.contains(field)) {
        throw ParseError("layer " + std::to_string(layer.layer_id) + " lacks field " + field);
      }
      *targets[f] = quantity_from_json(record[field], field);
    }
    layers.push_back(layer);
  }
  return ModelProfile(std::move(model_id), std::move(layers));
}

std::string dump_model_profile(const ModelProfile& model) {
  json layers = json::array();
  for (const auto& layer : model.layers()) {
    layers.push_back({{"layer_id", layer.layer_id},
                      {"rho_fw", layer.rho_fw},
                      {"rho_bw", layer.rho_bw},
                      {"delta_fw", layer.delta_fw},
                      {"delta_bw", layer.delta_bw},
                      {"r_mem", layer.r_mem},
                      {"r_disk", layer.r_disk}});
  }
  json doc = {{"model_id", model.model_id()}, {"layers", std::move(layers)}};
  return doc.dump(2) + "\n";
}

ModelProfile builtin_resnet101() {
  // Output tensor element counts per building block (C x H x W).
  constexpr double kConv1Out = 64.0 * 112 * 112;
  constexpr double kPoolOut = 64.0 * 56 * 56;
  constexpr double kConv2Out = 256.0 * 56 * 56;
  constexpr double kConv3Out = 512.0 * 28 * 28;
  constexpr double kConv4Out = 1024.0 * 14 * 14;
  constexpr double kConv5Out = 2048.0 * 7 * 7;
  constexpr double kAvgPoolOut = 2048.0;
  constexpr double kFcOut = 1000.0;
  constexpr double kBytesPerElement = 4.0;

  struct Block {
    double rho_fw;
    double out_elements;
    double layer_bytes;
  };
  std::vector<Block> blocks;
  blocks.push_back({236.02e6, kConv1Out, 37e3});  // conv1
  blocks.push_back({6.43e6, kPoolOut, 512});      // bn, relu, maxpool
  blocks.push_back({4.74e9, kConv2Out, 3.02e6});  // conv2_x
  for (int i = 0; i < 2; ++i) blocks.push_back({7.40e9, kConv2Out, 4.72e6});
  blocks.push_back({5.76e9, kConv3Out, 14.68e6});  // conv3_x
  for (int i = 0; i < 3; ++i) blocks.push_back({7.40e9, kConv3Out, 18.88e6});
  blocks.push_back({5.76e9, kConv4Out, 58.76e6});  // conv4_x
  for (int i = 0; i < 22; ++i) blocks.push_back({7.40e9, kConv4Out, 75.52e6});
  blocks.push_back({5.76e9, kConv5Out, 234.92e6});  // conv5_x
  for (int i = 0; i < 2; ++i) blocks.push_back({7.40e9, kConv5Out, 302.04e6});
  blocks.push_back({200.70e3, kAvgPoolOut, 0});  // avgpool
  blocks.push_back({4.10e6, kFcOut, 8.20e6});    // fc

  std::vector<LayerProfile> layers;
  layers.reserve(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    const double bytes = b.out_elements * kBytesPerElement;
    layers.push_back(LayerProfile{static_cast<int>(i) + 1, b.rho_fw, 2.0 * b.rho_fw, bytes, bytes,
                                  b.layer_bytes, b.layer_bytes});
  }
  return ModelProfile("resnet101", std::move(layers));
}

}  // namespace splitchain
