// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "splitchain/error.hpp"
#include "splitchain/profiles.hpp"
#include "splitchain/quantity.hpp"

using namespace splitchain;

TEST_CASE("quantity strings scale digit-exactly") {
  CHECK(parse_quantity("236.02M") == 236020000.0);
  CHECK(parse_quantity("200.70K") == 200700.0);
  CHECK(parse_quantity("37K") == 37000.0);
  CHECK(parse_quantity("8192") == 8192.0);
  CHECK(parse_quantity("7.40G") == 7.4e9);
  CHECK(parse_quantity("1.5e-3") == 1.5e-3);
  CHECK(parse_quantity(" 3.21 M") == 3210000.0);
  CHECK(parse_quantity("-2K") == -2000.0);
  CHECK(std::isinf(parse_quantity("inf")));
}

TEST_CASE("malformed quantities are rejected") {
  for (const char* bad : {"", "M", "12X", "1.2.3M", "abc", "1,5"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_quantity(bad), ParseError);
  }
  CHECK_THROWS_AS(quantity_from_json(nlohmann::json::array(), "x"), ParseError);
  CHECK(quantity_from_json(nlohmann::json("4.10M"), "x") == 4100000.0);
  CHECK(quantity_from_json(nlohmann::json(12.5), "x") == 12.5);
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(static_cast<double>(rng() >> 11), static_cast<int>(rng() % 120) - 90);
    CHECK(parse_quantity(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("resnet101 block profile") {
  const ModelProfile m = builtin_resnet101();
  REQUIRE(m.layer_count() == 37);
  CHECK(m.model_id() == "resnet101");

  SUBCASE("table entries") {
    CHECK(m.layer(1).rho_fw == 236.02e6);
    CHECK(m.layer(2).rho_fw == 6.43e6);
    CHECK(m.layer(3).rho_fw == 4.74e9);
    CHECK(m.layer(36).rho_fw == 200.70e3);
    CHECK(m.layer(37).rho_fw == 4.10e6);
    CHECK(m.layer(36).delta_fw == 8192.0);
    CHECK(m.layer(37).r_mem == 8.20e6);
    CHECK(m.layer(36).r_mem == 0.0);
  }
  SUBCASE("smashed sizes are output tensors of four-byte elements") {
    CHECK(m.layer(1).delta_fw == 64.0 * 112 * 112 * 4);
    CHECK(m.layer(1).delta_bw == 3211264.0);
    CHECK(m.layer(2).delta_fw == 802816.0);
    CHECK(m.layer(17).delta_fw == 802816.0);
    CHECK(m.layer(33).delta_fw == 401408.0);
    CHECK(m.layer(35).delta_fw == 401408.0);
  }
  SUBCASE("per-layer relations") {
    for (const auto& layer : m.layers()) {
      CAPTURE(layer.layer_id);
      CHECK(layer.rho_bw == 2.0 * layer.rho_fw);
      CHECK(layer.delta_bw == layer.delta_fw);
      CHECK(layer.r_mem == layer.r_disk);
    }
  }
  SUBCASE("displayed two-decimal sizes") {
    // Sizes shown in megabytes with two decimals.
    CHECK(std::round(m.layer(1).delta_fw / 1e4) / 100 == doctest::Approx(3.21));
    CHECK(std::round(m.layer(17).delta_fw / 1e4) / 100 == doctest::Approx(0.80));
    CHECK(std::round(m.layer(33).delta_fw / 1e4) / 100 == doctest::Approx(0.40));
  }
}

TEST_CASE("profile documents round-trip") {
  const ModelProfile m = builtin_resnet101();
  const ModelProfile back = load_model_profile(dump_model_profile(m));
  CHECK(back == m);
}

TEST_CASE("profile documents accept quantity strings") {
  const char* doc = R"({"model_id": "tiny", "layers": [
    {"layer_id": 1, "rho_fw": "1.5G", "rho_bw": "3G", "delta_fw": "4K", "delta_bw": 4000,
     "r_mem": "2M", "r_disk": "2M"},
    {"layer_id": 2, "rho_fw": 10, "rho_bw": 20, "delta_fw": 0, "delta_bw": 0, "r_mem": 0,
     "r_disk": 0}]})";
  const ModelProfile m = load_model_profile(doc);
  CHECK(m.model_id() == "tiny");
  CHECK(m.layer(1).rho_fw == 1.5e9);
  CHECK(m.layer(1).delta_fw == 4000.0);
  CHECK(m.layer(1).r_mem == 2e6);
}

TEST_CASE("invalid profiles") {
  auto layer = [](int id) { return LayerProfile{id, 1, 1, 1, 1, 1, 1}; };
  CHECK_THROWS_AS(ModelProfile("m", {layer(1)}), ValidationError);
  CHECK_THROWS_AS(ModelProfile("m", {layer(1), layer(3)}), ValidationError);
  CHECK_THROWS_AS(ModelProfile("m", {layer(2), layer(1)}), ValidationError);
  auto negative = layer(2);
  negative.r_mem = -1;
  CHECK_THROWS_AS(ModelProfile("m", {layer(1), negative}), ValidationError);
  auto nan = layer(2);
  nan.rho_fw = std::nan("");
  CHECK_THROWS_AS(ModelProfile("m", {layer(1), nan}), ValidationError);
  CHECK_THROWS_AS(ModelProfile("m", {layer(1), layer(2)}).layer(3), ValidationError);

  CHECK_THROWS_AS(load_model_profile("{"), ParseError);
  CHECK_THROWS_AS(load_model_profile(R"({"layers": 3})"), ParseError);
  CHECK_THROWS_AS(load_model_profile(R"({"layers": [{"layer_id": 1, "rho_fw": 1}]})"), ParseError);
  CHECK_THROWS_AS(load_model_profile(R"({"layers": [{"rho_fw": 1}]})"), ParseError);
}
