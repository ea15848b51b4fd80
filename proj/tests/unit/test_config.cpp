#include <gtest/gtest.h>

#include "pcbench/config_io.hpp"
#include "pcbench/error.hpp"
#include "test_support.hpp"

using namespace pcbench;
using test::tiny_cstr_json;

namespace {

ScenarioJson tiny() { return ScenarioJson::parse(tiny_cstr_json); }

struct Mutation {
  const char* label;
  const char* pointer;  // JSON pointer; empty erases `erase`
  const char* value;    // JSON text, nullptr = erase
  const char* field;    // expected in the message
};

}  // namespace

TEST(Config, TinyScenarioLoads) {
  const Scenario s = scenario_from_json(tiny());
  EXPECT_EQ(s.env.name, "tiny_cstr");
  EXPECT_EQ(s.env.steps, 10u);
  EXPECT_DOUBLE_EQ(s.env.dt(), 0.5);
  EXPECT_EQ(s.env.observation_space().size(), 3);
  EXPECT_EQ(s.oracle.horizon, 5u);
  EXPECT_EQ(s.env.integrator.substeps, 10);
}

TEST(Config, SegmentsExpand) {
  ScenarioJson j = tiny();
  j["setpoints"]["Ca"] = ScenarioJson::parse(R"({"segments": [[0.8, 3], [0.9, 7]]})");
  const Scenario s = scenario_from_json(j);
  EXPECT_DOUBLE_EQ(s.env.setpoints.at(0)[0], 0.8);
  EXPECT_DOUBLE_EQ(s.env.setpoints.at(2)[0], 0.8);
  EXPECT_DOUBLE_EQ(s.env.setpoints.at(3)[0], 0.9);
  EXPECT_DOUBLE_EQ(s.env.setpoints.at(9)[0], 0.9);
  EXPECT_THROW(s.env.setpoints.at(10), Error);
  EXPECT_DOUBLE_EQ(s.env.setpoints.at_clamped(15)[0], 0.9);
}

TEST(Config, DisturbanceWithBoundsExtendsObservation) {
  ScenarioJson j = tiny();
  j["disturbances"] = ScenarioJson::parse(R"({"Ti": {"values": {"segments": [[350, 5], [360, 5]]}, "bounds": [330, 370]}})");
  const Scenario s = scenario_from_json(j);
  EXPECT_EQ(s.env.observation_space().size(), 4);
  EXPECT_EQ(s.env.observation_names().back(), "Ti");
  const Vector d = s.env.disturbances.at(s.env.model, 7);
  EXPECT_DOUBLE_EQ(d[0], 360.0);
  EXPECT_DOUBLE_EQ(d[1], 1.0);  // Caf keeps its default
}

TEST(Config, MatrixShapes) {
  ScenarioJson j = tiny();
  j["reward"]["R"] = ScenarioJson::parse("[[0.5]]");
  EXPECT_DOUBLE_EQ(scenario_from_json(j).env.reward.R(0, 0), 0.5);
}

TEST(Config, Constraints) {
  ScenarioJson j = tiny();
  j["constraints"] = ScenarioJson::parse(R"([{"var": "T", "sense": "<=", "bound": 327}, {"var": "T", "sense": ">=", "bound": 321}])");
  Scenario s = scenario_from_json(j);
  Vector m(2);
  m << 0.8, 330.0;
  const Vector g = s.env.constraints.values(m);
  EXPECT_DOUBLE_EQ(g[0], 3.0);
  EXPECT_DOUBLE_EQ(g[1], -9.0);
  EXPECT_TRUE(any_violation(g));
  m[1] = 321.0;
  EXPECT_FALSE(any_violation(s.env.constraints.values(m)));  // boundary is feasible
}

TEST(Config, Rejections) {
  const Mutation cases[] = {
      {"unknown key", "/colour", "1", "colour"},
      {"missing model", "/model", nullptr, "model"},
      {"bad model", "/model", "\"nope\"", "nope"},
      {"zero steps", "/T", "0", "T"},
      {"negative tsim", "/tsim", "-1", "tsim"},
      {"short schedule", "/setpoints/Ca", "[0.85]", "setpoints"},
      {"unknown setpoint var", "/setpoints/Cb", "[0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1]", "Cb"},
      {"a_space size", "/a_space/low", "[1, 2]", "a_space"},
      {"a_space order", "/a_space/low", "[400]", "a_space"},
      {"o_space size", "/o_space/low", "[0, 0]", "o_space"},
      {"x0 size", "/x0", "[0.8]", "x0"},
      {"negative noise", "/noise_percentage", "-0.1", "noise_percentage"},
      {"custom reward", "/reward/kind", "\"custom\"", "reward.kind"},
      {"unknown reward", "/reward/kind", "\"bonus\"", "reward.kind"},
      {"Q shape", "/reward/Q", "[1, 2]", "Q"},
      {"bad integrator", "/integrator", "{\"method\": \"euler\"}", "integrator.method"},
      {"zero substeps", "/integrator", "{\"substeps\": 0}", "substeps"},
      {"bad gamma", "/gamma", "1.5", "gamma"},
      {"bad version", "/version", "2", "version"},
      {"bad sense", "/constraints", "[{\"var\": \"T\", \"sense\": \"<\", \"bound\": 1}]", "constraints"},
      {"bad constraint var", "/constraints", "[{\"var\": \"Z\", \"sense\": \"<=\", \"bound\": 1}]", "Z"},
      {"bad disturbance", "/disturbances", "{\"Tq\": [1]}", "Tq"},
      {"oracle horizon", "/oracle/N", "0", "oracle"},
      {"string number", "/tsim", "\"5\"", "tsim"},
  };
  for (const auto& c : cases) {
    ScenarioJson j = tiny();
    const ScenarioJson::json_pointer ptr(c.pointer);
    if (c.value) {
      j[ptr] = ScenarioJson::parse(c.value);
    } else {
      j.erase(ptr.back());
    }
    try {
      scenario_from_json(j);
      ADD_FAILURE() << c.label << ": accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::config) << c.label;
      EXPECT_NE(std::string(e.what()).find(c.field), std::string::npos) << c.label << ": " << e.what();
    }
  }
}

TEST(Config, MalformedTextAndMissingFile) {
  EXPECT_THROW(scenario_from_text("{\"model\": "), Error);
  try {
    load_scenario("/nonexistent/scenario.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config);
  }
}

TEST(Config, BundledScenariosLoad) {
  const auto files = list_scenario_files(test::data_path("scenarios"));
  EXPECT_GE(files.size(), 6u);
  for (const auto& f : files) {
    const Scenario s = load_scenario(f);
    EXPECT_FALSE(s.description.empty()) << f;
    const auto summary = scenario_summary(s);
    EXPECT_EQ(summary["model"], s.env.model.name) << f;
  }
}
