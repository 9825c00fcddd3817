// SPDX-License-Identifier: Apache-2.0
#include "splitchain/scenario.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "splitchain/error.hpp"
#include "splitchain/quantity.hpp"

namespace splitchain {
namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  std::filesystem::path p(file);
  return p.is_absolute() ? p : base / p;
}

ModelProfile model_from(const json& spec, const std::filesystem::path& base) {
  if (spec.is_string()) {
    if (spec.get<std::string>() == "resnet101") return builtin_resnet101();
    throw ParseError("unknown builtin model '" + spec.get<std::string>() + "'");
  }
  if (spec.is_object() && spec.contains("profile_file") && spec["profile_file"].is_string()) {
    return load_model_profile(read_text_file(resolve(base, spec["profile_file"].get<std::string>())));
  }
  throw ParseError("scenario.model must be \"resnet101\" or {\"profile_file\": ...}");
}

PhysicalNetwork network_from(const json& spec, const std::filesystem::path& base) {
  if (!spec.is_object()) throw ParseError("scenario.topology must be an object");
  if (spec.contains("file")) {
    return load_topology(read_text_file(resolve(base, spec["file"].get<std::string>())));
  }
  if (spec.value("builtin", std::string()) != "nsfnet") {
    throw ParseError("scenario.topology needs \"file\" or \"builtin\": \"nsfnet\"");
  }
  if (!spec.contains("delays_file") || !spec["delays_file"].is_string()) {
    throw ParseError("builtin nsfnet topology needs a delays_file");
  }
  const auto delays =
      load_edge_delays(read_text_file(resolve(base, spec["delays_file"].get<std::string>())));
  std::vector<std::string> cpu_nodes;
  if (spec.contains("cpu_nodes")) cpu_nodes = spec["cpu_nodes"].get<std::vector<std::string>>();
  NsfnetOptions options;
  if (spec.contains("bandwidth_bps")) {
    options.bandwidth_bps = quantity_from_json(spec["bandwidth_bps"], "bandwidth_bps");
  }
  if (spec.contains("gpu_capacity_bytes")) {
    options.gpu_capacity_bytes = quantity_from_json(spec["gpu_capacity_bytes"], "gpu_capacity_bytes");
  }
  if (spec.contains("cpu_capacity_bytes")) {
    options.cpu_capacity_bytes = quantity_from_json(spec["cpu_capacity_bytes"], "cpu_capacity_bytes");
  }
  return builtin_nsfnet(delays, nsfnet_roles(cpu_nodes), options);
}

template <typename T>
T get_or(const json& doc, const char* field, T fallback) {
  if (!doc.contains(field)) return fallback;
  try {
    return doc[field].get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("scenario.") + field + " has the wrong type");
  }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError("cannot read " + file.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

PlacementCandidates ScenarioFile::candidates_for(int k) const {
  auto it = pinned_candidates.find(k);
  if (it != pinned_candidates.end()) {
    return PlacementCandidates(it->second, source, destination, network.node_count());
  }
  return draw_candidates(network, k, source, destination, candidates_per_slot, seed);
}

Scenario ScenarioFile::instantiate(int k, int b) const {
  Request request{model.model_id(), source, destination, b, mode};
  Scenario sc{network,       model,      request, candidates_for(k), epsilon, t_max, seed,
              reference_node, enumeration_budget};
  sc.validate();
  return sc;
}

namespace {

ScenarioFile parse_document(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("scenario document must be an object");
  for (const char* field : {"model", "topology", "request"}) {
    if (!doc.contains(field)) throw ParseError(std::string("scenario lacks \"") + field + "\"");
  }
  PhysicalNetwork network = network_from(doc["topology"], base_dir);
  ModelProfile model = model_from(doc["model"], base_dir);
  ScenarioFile out{get_or<std::string>(doc, "name", "scenario"),
                   std::move(network),
                   std::move(model),
                   0,
                   0,
                   1,
                   Mode::Inference,
                   2,
                   {},
                   2,
                   0,
                   0.0,
                   20,
                   std::nullopt,
                   100'000};

  const json& request = doc["request"];
  if (!request.is_object()) throw ParseError("scenario.request must be an object");
  for (const char* field : {"source", "destination"}) {
    if (!request.contains(field) || !request[field].is_string()) {
      throw ParseError(std::string("scenario.request.") + field + " must be a node id");
    }
  }
  out.source = out.network.index_of(request["source"].get<std::string>());
  out.destination = out.network.index_of(request["destination"].get<std::string>());
  out.batch = get_or<int>(request, "batch", 1);
  out.mode = mode_from_string(get_or<std::string>(request, "mode", "IF"));
  out.submodels = get_or<int>(doc, "K", 2);
  out.candidates_per_slot = get_or<std::size_t>(doc, "candidates_per_slot", 2);
  out.seed = get_or<std::uint64_t>(doc, "seed", 0);
  out.epsilon = doc.contains("epsilon") ? quantity_from_json(doc["epsilon"], "epsilon") : 0.0;
  out.t_max = get_or<int>(doc, "t_max", 20);
  out.enumeration_budget = get_or<std::uint64_t>(doc, "enumeration_budget", 100'000);
  if (doc.contains("reference_node")) {
    out.reference_node = out.network.index_of(get_or<std::string>(doc, "reference_node", ""));
  }
  if (doc.contains("candidates")) {
    if (!doc["candidates"].is_object()) throw ParseError("scenario.candidates must be an object");
    for (const auto& [key, slots] : doc["candidates"].items()) {
      int k = 0;
      try {
        k = std::stoi(key);
      } catch (const std::exception&) {
        throw ParseError("scenario.candidates key '" + key + "' is not a sub-model count");
      }
      if (!slots.is_array() || static_cast<int>(slots.size()) != k) {
        throw ParseError("scenario.candidates[" + key + "] needs one list per sub-model");
      }
      std::vector<std::vector<NodeIndex>> per_slot;
      for (const auto& slot : slots) {
        std::vector<NodeIndex> ids;
        for (const auto& id : slot) ids.push_back(out.network.index_of(id.get<std::string>()));
        per_slot.push_back(std::move(ids));
      }
      PlacementCandidates check(per_slot, out.source, out.destination, out.network.node_count());
      out.pinned_candidates.emplace(k, std::move(per_slot));
    }
  }
  if (out.batch < 1) throw ValidationError("scenario batch must be >= 1");
  if (out.submodels < 2 || out.submodels > out.model.layer_count()) {
    throw ValidationError("scenario K outside 2..L");
  }
  if (out.t_max < 1) throw ValidationError("scenario t_max must be >= 1");
  if (out.epsilon < 0.0) throw ValidationError("scenario epsilon must be >= 0");
  if (out.source == out.destination) throw ValidationError("source equals destination");
  return out;
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  try {
    return parse_document(text, base_dir);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario document: ") + e.what());
  }
}

ScenarioFile load_scenario(const std::filesystem::path& file) {
  return parse_scenario(read_text_file(file), file.parent_path());
}

}  // namespace splitchain
