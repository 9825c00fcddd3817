// SPDX-License-Identifier: Apache-2.0
#include "splitchain/quantity.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

#include "splitchain/error.hpp"

namespace splitchain {
namespace {

int suffix_exponent(char c) {
  switch (c) {
    case 'K': case 'k': return 3;
    case 'M': return 6;
    case 'G': return 9;
    case 'T': return 12;
    default: return -1;
  }
}

// "236.02" with exponent 6 -> 236020000, when the result stays an exact integer.
bool scale_exactly(std::string_view mantissa, int exponent, double& out) {
  std::uint64_t digits = 0;
  int fraction_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (char c : mantissa) {
    if (c == '.') {
      if (seen_point) return false;
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') return false;
    if (digits > (std::uint64_t{1} << 50)) return false;
    digits = digits * 10 + static_cast<std::uint64_t>(c - '0');
    any_digit = true;
    if (seen_point) ++fraction_digits;
  }
  if (!any_digit || fraction_digits > exponent) return false;
  for (int i = 0; i < exponent - fraction_digits; ++i) {
    if (digits > (std::uint64_t{1} << 49)) return false;
    digits *= 10;
  }
  out = static_cast<double>(digits);
  return true;
}

}  // namespace

double parse_quantity(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw ParseError("empty quantity");

  bool negative = false;
  std::string_view body = text;
  if (body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  const int exponent = body.empty() ? -1 : suffix_exponent(body.back());
  if (exponent >= 0) {
    std::string_view mantissa = body.substr(0, body.size() - 1);
    while (!mantissa.empty() && mantissa.back() == ' ') mantissa.remove_suffix(1);
    double exact = 0.0;
    if (scale_exactly(mantissa, exponent, exact)) return negative ? -exact : exact;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(mantissa.data(), mantissa.data() + mantissa.size(), value);
    if (ec != std::errc{} || ptr != mantissa.data() + mantissa.size()) {
      throw ParseError("malformed quantity '" + std::string(text) + "'");
    }
    value *= std::pow(10.0, exponent);
    return negative ? -value : value;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("malformed quantity '" + std::string(text) + "'");
  }
  return value;
}

double quantity_from_json(const nlohmann::json& value, std::string_view field) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) return parse_quantity(value.get<std::string>());
  throw ParseError("field '" + std::string(field) + "' must be a number or quantity string");
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf.data(), ptr);
}

}  // namespace splitchain
