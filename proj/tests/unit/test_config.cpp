#include <gtest/gtest.h>

#include <numbers>

#include "lnls/config.hpp"

namespace {

using namespace lnls;
constexpr double pi = std::numbers::pi;

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "<no ConfigError>";
}

json base(const std::string& command) {
  return {{"schema_version", 1}, {"command", command}};
}

TEST(ConfigParse, SyntaxErrorReportsLineAndColumn) {
  const auto msg = message_of([] { parse_config_text("{\n  \"a\": 1,\n  \"b\": ]\n}"); });
  EXPECT_NE(msg.find("line 3, column 8"), std::string::npos) << msg;
  const auto missing = message_of([] { load_config_file("/no/such/config.json"); });
  EXPECT_NE(missing.find("/no/such/config.json"), std::string::npos);
}

TEST(ConfigFields, NumbersAndPathsInMessages) {
  const json doc = {{"a", {{"h", "pi/16"}, {"r", "inf"}, {"list", {1, "pi/4"}}, {"bad", "pi/x"}}}};
  const Field root(doc, "");
  EXPECT_DOUBLE_EQ(root["a"]["h"].number(), pi / 16);
  EXPECT_TRUE(std::isinf(root["a"]["r"].number()));
  EXPECT_EQ(root["a"]["list"].numbers(), (std::vector<double>{1.0, pi / 4}));
  EXPECT_NE(message_of([&] { root["a"]["bad"].number(); }).find("field 'a.bad'"), std::string::npos);
  EXPECT_NE(message_of([&] { root["a"]["missing"].number(); }).find("field 'a.missing'"), std::string::npos);
  EXPECT_NE(message_of([&] { root["a"]["h"].integer(); }).find("field 'a.h'"), std::string::npos);
  EXPECT_EQ(root["a"].number_or("absent", 2.5), 2.5);
}

TEST(ConfigSettings, SchemaVersionAndSeed) {
  EXPECT_EQ(read_settings(base("converge")).command, "converge");
  auto doc = base("converge");
  doc["schema_version"] = 2;
  EXPECT_NE(message_of([&] { read_settings(doc); }).find("schema_version"), std::string::npos);
  doc = base("converge");
  doc["seed"] = 1.5;
  EXPECT_NE(message_of([&] { read_settings(doc); }).find("seed"), std::string::npos);
  EXPECT_NE(message_of([] { read_settings(json{{"command", "x"}}); }).find("schema_version"), std::string::npos);
}

TEST(ConfigParams, ExponentHypothesis) {
  const json doc = {{"params", {{"p", 0.5}}}};
  const auto msg = message_of([&] { read_params(Field(doc, "")["params"]); });
  EXPECT_NE(msg.find("p > 1 required"), std::string::npos) << msg;
  EXPECT_NE(msg.find("field 'params'"), std::string::npos) << msg;
  const json ok = {{"params", {{"p", 2.5}, {"lambda", -1}}}};
  const auto p = read_params(Field(ok, "")["params"]);
  EXPECT_EQ(p.p, 2.5);
  EXPECT_EQ(p.lambda, -1);
}

TEST(ConfigHList, LevelsListsAndValidation) {
  const json levels = {{"h_levels", {3, 5}}};
  EXPECT_EQ(read_h_list(Field(levels, "")), (std::vector<double>{pi / 8, pi / 16, pi / 32}));
  const json listed = {{"h_list", {"pi/8", "pi/16", "pi/32", "pi/64"}}};
  EXPECT_EQ(read_h_list(Field(listed, "")).size(), 4u);
  const json two = {{"h_list", {"pi/8", "pi/16"}}};
  const auto msg = message_of([&] { read_h_list(Field(two, "")); });
  EXPECT_NE(msg.find(">= 3 spacings required"), std::string::npos) << msg;
  const json odd = {{"h_list", {0.3, 0.2, 0.1}}};
  EXPECT_NE(message_of([&] { read_h_list(Field(odd, "")); }).find("field 'h_list'"), std::string::npos);
}

TEST(ConfigProfiles, KindsAndErrors) {
  const json doc = {{"a", {{"kind", "gaussian"}, {"dim", 2}, {"center", {0.1, 0.2}}, {"width", 0.5}, {"carrier", {1, 2}}}},
                    {"b", {{"kind", "plane_wave"}, {"dim", 1}, {"k", {3}}}},
                    {"c", {{"kind", "random_modes"}, {"dim", 2}, {"h1_norm", 4.0}}},
                    {"d", {{"kind", "spiral"}, {"dim", 2}}},
                    {"e", {{"kind", "gaussian"}, {"dim", 2}, {"width", -1.0}}}};
  const Field root(doc, "");
  EXPECT_EQ(read_profile(root["a"], 1)->dim(), 2);
  EXPECT_EQ(read_profile(root["b"], 1)->dim(), 1);
  // Cell averages damp mode k by about (hk)^2 / 12 per axis, so compare on a fine lattice.
  const auto u = discretize(*read_profile(root["c"], 4), Lattice(2, 256));
  EXPECT_NEAR(sobolev_norm(u, 1.0), 4.0, 4e-3);
  EXPECT_NE(message_of([&] { read_profile(root["d"], 1); }).find("field 'd.kind'"), std::string::npos);
  EXPECT_NE(message_of([&] { read_profile(root["e"], 1); }).find("field 'e.width'"), std::string::npos);
}

TEST(ConfigCommands, StrichartzRejectsExcludedEndpoint) {
  auto doc = base("strichartz");
  doc["strichartz"] = {{"d", 3}, {"pairs", {{2, "inf"}}}, {"profiles", json::array()}};
  const auto msg = message_of([&] { read_strichartz(doc, read_settings(doc)); });
  EXPECT_NE(msg.find("(2, inf, 3)"), std::string::npos) << msg;
  doc["strichartz"] = {{"d", 2}, {"pairs", {{6, 4}}}, {"h_levels", {3, 5}}, {"t_quadrature", 64}, {"profiles", json::array()}};
  EXPECT_NE(message_of([&] { read_strichartz(doc, read_settings(doc)); }).find("t_quadrature"), std::string::npos);
}

TEST(ConfigCommands, ShippedConfigsParse) {
  for (const auto& entry : std::filesystem::directory_iterator(LNLS_CONFIG_DIR)) {
    const auto doc = load_config_file(entry.path());
    const auto s = read_settings(doc);
    SCOPED_TRACE(entry.path().string());
    if (s.command == "simulate") {
      EXPECT_NO_THROW(read_simulate(doc, s));
    } else if (s.command == "converge") {
      EXPECT_NO_THROW(read_converge(doc, s));
    } else if (s.command == "strichartz") {
      EXPECT_NO_THROW(read_strichartz(doc, s));
    } else if (s.command == "dispersive") {
      EXPECT_NO_THROW(read_dispersive(doc));
    } else if (s.command == "inequalities") {
      EXPECT_NO_THROW(read_inequalities(doc));
    } else if (s.command == "conserve") {
      EXPECT_NO_THROW(read_conserve(doc, s));
    } else {
      ADD_FAILURE() << "unknown command " << s.command;
    }
  }
}

}  // namespace
