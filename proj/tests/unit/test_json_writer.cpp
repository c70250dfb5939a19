#include "json_writer.hpp"

#include <gtest/gtest.h>

#include <cmath>

TEST(JsonWriter, SeventeenDigitsAndLayout) {
  nlohmann::ordered_json j;
  j["x"] = 0.1;
  j["n"] = 3;
  j["v"] = {1.0 / 3.0, 2.0};
  j["bad"] = NAN;
  j["m"] = nlohmann::ordered_json::array({nlohmann::ordered_json::array({1, 2})});
  EXPECT_EQ(dln::to_json_text(j),
            "{\n"
            "  \"x\": 0.10000000000000001,\n"
            "  \"n\": 3,\n"
            "  \"v\": [0.33333333333333331, 2],\n"
            "  \"bad\": null,\n"
            "  \"m\": [\n"
            "    [1, 2]\n"
            "  ]\n"
            "}\n");
}

TEST(JsonWriter, RoundTripsThroughParser) {
  nlohmann::ordered_json j;
  j["values"] = {1e-300, -2.5e17, 0.30000000000000004};
  j["name"] = "a \"quoted\" σ";
  const auto back = nlohmann::json::parse(dln::to_json_text(j));
  EXPECT_EQ(back["values"][0].get<double>(), 1e-300);
  EXPECT_EQ(back["values"][2].get<double>(), 0.30000000000000004);
  EXPECT_EQ(back["name"], "a \"quoted\" σ");
}
