// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace splitchain {

/// Parses a decimal quantity such as "236.02M", "37K", "8192" or "1.5e-3".
/// Suffixes K, M, G, T are powers of 10. Mantissas with a suffix are scaled
/// digit-exactly, so "236.02M" yields 236020000 with no rounding residue.
double parse_quantity(std::string_view text);

/// Accepts either a JSON number or a quantity string.
double quantity_from_json(const nlohmann::json& value, std::string_view field);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace splitchain
