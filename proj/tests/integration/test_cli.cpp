#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pcbench/pcbench.h"
#include "process.hpp"

using nlohmann::json;
using pcbench::test::Child;
using pcbench::test::run_command;
namespace fs = std::filesystem;

namespace {

const std::string cli = PCBENCH_CLI_PATH;
const std::string agent = PCBENCH_ECHO_AGENT;
const std::string scenarios = std::string(PCBENCH_TEST_DATA_DIR) + "/scenarios";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pcbench_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& rel) const { return (dir_ / rel).string(); }

  // Small CSTR scenario written next to the outputs.
  std::string tiny_scenario() const {
    const std::string p = path("tiny.json");
    std::ofstream(p) << R"({
      "name": "cli_tiny", "version": 1, "model": "cstr", "T": 6, "tsim": 3,
      "setpoints": {"Ca": [0.85, 0.85, 0.85, 0.9, 0.9, 0.9]},
      "a_space": {"low": [295], "high": [302]},
      "o_space": {"low": [0.7, 300, 0.8], "high": [1.0, 350, 0.9]},
      "x0": [0.8, 330, 0.85], "noise_percentage": 0.001, "oracle": {"N": 4}
    })";
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ListShowsBundledData) {
  const auto r = run_command(cli + " list --scenario-dir " + scenarios);
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("cstr_base"), std::string::npos);
  EXPECT_NE(r.output.find("crystallization"), std::string::npos);
  const auto j = run_command(cli + " list --json --scenario-dir " + scenarios);
  ASSERT_EQ(j.exit_code, 0);
  EXPECT_EQ(json::parse(j.output)["models"].size(), 4u);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(run_command(cli + " rollout --scenario /nonexistent.json --policy random -o " + path("o")).exit_code, 2)
      << "missing file";
  std::ofstream(path("bad.json")) << "{\"model\": \"cstr\", \"T\": 0}";
  EXPECT_EQ(run_command(cli + " rollout --scenario " + path("bad.json") + " --policy random -o " + path("o")).exit_code, 2);
  EXPECT_EQ(run_command(cli + " rollout --scenario " + tiny_scenario() + " --policy warp -o " + path("o")).exit_code, 2);
  EXPECT_EQ(run_command(cli + " rollout --scenario " + tiny_scenario() + " --policy random --bogus").exit_code, 2);
  EXPECT_EQ(run_command(cli + " rollout --policy random").exit_code, 2);
  EXPECT_EQ(run_command(cli + " compare --scenario " + tiny_scenario() + " --policies random -o " + path("o")).exit_code, 2);
}

TEST_F(Cli, ProtocolAndTimeoutExitThree) {
  const auto wrong = run_command(cli + " rollout --scenario " + tiny_scenario() + " --policy 'external:" + agent +
                                 " --mode wrong-dim' -o " + path("w"));
  EXPECT_EQ(wrong.exit_code, 3) << wrong.output;
  EXPECT_NE(wrong.output.find("agent startup failed"), std::string::npos) << wrong.output;
  const auto slow = run_command(cli + " rollout --scenario " + tiny_scenario() + " --policy 'external:" + agent +
                                " --sleep-ms 3000' --timeout 0.2 -o " + path("s"));
  EXPECT_EQ(slow.exit_code, 3) << slow.output;
  EXPECT_NE(slow.output.find("timeout"), std::string::npos) << slow.output;
}

TEST_F(Cli, RolloutWritesOutputs) {
  const auto r = run_command(cli + " rollout --scenario " + tiny_scenario() + " --policy oracle -n 2 -o " + path("r"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  for (const char* f : {"trajectories.csv", "returns.csv", "report.json", "solver_diagnostics.csv", "summary.json",
                        "manifest.json"}) {
    EXPECT_TRUE(fs::exists(path("r/") + f)) << f;
  }
  const json rep = json::parse(slurp(path("r/report.json")));
  EXPECT_EQ(rep["episodes"], 2);
  EXPECT_EQ(rep["returns"].size(), 2u);
  const json man = json::parse(slurp(path("r/manifest.json")));
  EXPECT_EQ(man["engine"], "pcbench");
  EXPECT_EQ(man["version"], pcb_version());
}

TEST_F(Cli, ManifestRerunIsByteIdentical) {
  const std::string sc = tiny_scenario();
  ASSERT_EQ(run_command(cli + " rollout --scenario " + sc + " --policy random -n 3 --seed 77 -o " + path("a") +
                        " --quiet").exit_code, 0);
  const auto again = run_command(cli + " rollout --manifest " + path("a/manifest.json") + " -o " + path("b") + " --quiet");
  ASSERT_EQ(again.exit_code, 0) << again.output;
  EXPECT_EQ(slurp(path("a/trajectories.csv")), slurp(path("b/trajectories.csv")));
  EXPECT_EQ(slurp(path("a/returns.csv")), slurp(path("b/returns.csv")));
}

TEST_F(Cli, JobsDoNotChangeResults) {
  const std::string sc = tiny_scenario();
  ASSERT_EQ(run_command(cli + " rollout --scenario " + sc + " --policy random -n 6 -j 1 -o " + path("j1") + " --quiet").exit_code, 0);
  ASSERT_EQ(run_command(cli + " rollout --scenario " + sc + " --policy random -n 6 -j 3 -o " + path("j3") + " --quiet").exit_code, 0);
  EXPECT_EQ(slurp(path("j1/trajectories.csv")), slurp(path("j3/trajectories.csv")));
}

TEST_F(Cli, OutDirFromEnvironment) {
  const auto r = run_command("PCBENCH_OUT_DIR=" + path("env_out") + " " + cli + " rollout --scenario " +
                             tiny_scenario() + " --policy random --quiet");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(fs::exists(path("env_out/trajectories.csv")));
}

TEST_F(Cli, CompareWritesTable) {
  const auto r = run_command(cli + " compare --scenario " + tiny_scenario() + " --policies oracle random -n 2 -o " +
                             path("c"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("gap"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("c/comparison.txt")));
  const json s = json::parse(slurp(path("c/summary.json")));
  EXPECT_EQ(s["reference"], "oracle");
  ASSERT_EQ(s["reports"].size(), 2u);
  EXPECT_EQ(s["reports"][0]["optimality_gap"]["value"], 0.0);
  EXPECT_GT(s["reports"][1]["optimality_gap"]["value"].get<double>(), 0.0);
}

TEST_F(Cli, ExternalAgentRollout) {
  const auto r = run_command(cli + " rollout --scenario " + tiny_scenario() + " --policy 'external:" + agent +
                             "' -n 2 -o " + path("e") + " --quiet");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto c = run_command(cli + " rollout --scenario " + tiny_scenario() + " --policy constant:298.5 -n 2 -o " +
                             path("k") + " --quiet");
  ASSERT_EQ(c.exit_code, 0) << c.output;
  EXPECT_EQ(json::parse(slurp(path("e/report.json")))["returns"], json::parse(slurp(path("k/report.json")))["returns"]);
}

TEST_F(Cli, ServeReplayMatchesLibrary) {
  const std::string sc = tiny_scenario();
  Child child(cli + " serve --scenario " + sc);
  const json hello = json::parse(child.receive());
  ASSERT_EQ(hello["type"], "hello");
  EXPECT_EQ(hello["T"], 6);
  child.send(R"({"type": "ready", "obs_dim": 3, "act_dim": 1})");
  child.send(R"({"type": "reset", "seed": 5})");
  const json r = json::parse(child.receive());
  ASSERT_EQ(r["type"], "reset");

  pcb_scenario* s = nullptr;
  ASSERT_EQ(pcb_scenario_load(sc.c_str(), &s), PCB_OK);
  pcb_env* env = nullptr;
  ASSERT_EQ(pcb_env_create(s, &env), PCB_OK);
  double obs[3];
  pcb_env_reset(env, 5, obs);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(r["observation"][i].get<double>(), obs[i]);
  double ret = 0.0;
  for (int t = 0; t < 6; ++t) {
    const double u = 296.0 + t;
    child.send(json{{"type", "act"}, {"action", {u}}}.dump());
    const json o = json::parse(child.receive());
    pcb_step_info info{};
    pcb_env_step(env, &u, obs, nullptr, nullptr, &info);
    ret += info.reward;
    EXPECT_EQ(o["reward"].get<double>(), info.reward) << t;
    for (int i = 0; i < 3; ++i) EXPECT_EQ(o["observation"][i].get<double>(), obs[i]);
  }
  const json end = json::parse(child.receive());
  EXPECT_EQ(end["type"], "end");
  EXPECT_NEAR(end["return"].get<double>(), ret, 1e-12);
  child.send(R"({"type": "close"})");
  EXPECT_EQ(child.wait(), 0);
  pcb_env_free(env);
  pcb_scenario_free(s);
}
