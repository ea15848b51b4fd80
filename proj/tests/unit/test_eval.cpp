#include <gtest/gtest.h>

#include <sstream>

#include "pcbench/config_io.hpp"
#include "pcbench/error.hpp"
#include "pcbench/eval.hpp"
#include "pcbench/policy.hpp"
#include "pcbench/report_io.hpp"
#include "pcbench/rng.hpp"
#include "test_support.hpp"

using namespace pcbench;

namespace {

EnvConfig tiny(double noise = 0.001) {
  EnvConfig c = scenario_from_text(test::tiny_cstr_json).env;
  c.noise_percentage = noise;
  return c;
}

PolicyFactory factory(std::string spec, const EnvConfig& env) {
  return [spec, env] { return make_policy(spec, env, PolicyOptions{}); };
}

std::string trajectories(const EnvConfig& env, const std::vector<EpisodeRecord>& eps) {
  std::ostringstream out;
  write_trajectories_csv(out, env, eps);
  return out.str();
}

}  // namespace

TEST(Policies, ConstantAndRandomRespectBounds) {
  const EnvConfig env = tiny();
  auto c = make_policy("constant:301.5", env, {});
  const Vector o = Vector::Zero(3), x = Vector::Zero(2);
  EXPECT_DOUBLE_EQ(c->act(PolicyInput{0, o, x, 0.0})[0], 301.5);
  EXPECT_EQ(c->label(), "constant:301.5");
  EXPECT_THROW(make_policy("constant:400", env, {}), Error);
  EXPECT_THROW(make_policy("constant:300,301", env, {}), Error);
  EXPECT_THROW(make_policy("constant:abc", env, {}), Error);
  EXPECT_THROW(make_policy("greedy", env, {}), Error);
  EXPECT_THROW(validate_policy_spec("external:", env), Error);

  auto r = make_policy("random", env, {});
  r->reset(7, o, x);
  for (int i = 0; i < 1000; ++i) {
    const double u = r->act(PolicyInput{0, o, x, 0.0})[0];
    EXPECT_GE(u, 295.0);
    EXPECT_LE(u, 302.0);
  }
}

TEST(Policies, RandomMeanIsMidpoint) {
  const EnvConfig env = tiny();
  auto r = make_policy("random", env, {});
  const Vector o = Vector::Zero(3), x = Vector::Zero(2);
  r->reset(123, o, x);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += r->act(PolicyInput{0, o, x, 0.0})[0];
  EXPECT_NEAR(sum / n, 298.5, 0.01 * 298.5);
  // Tighter, normalized: uniform on [0, 1] has mean 1/2 and sd 0.289.
  EXPECT_NEAR((sum / n - 295.0) / 7.0, 0.5, 5 * 0.289 / std::sqrt(n));
}

TEST(Policies, RandomIsSeeded) {
  const EnvConfig env = tiny();
  auto a = make_policy("random", env, {}), b = make_policy("random", env, {});
  const Vector o = Vector::Zero(3), x = Vector::Zero(2);
  a->reset(9, o, x);
  b->reset(9, o, x);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a->act({0, o, x, 0.0})[0], b->act({0, o, x, 0.0})[0]);
}

TEST(Rollout, SeedsAreDerivedPerEpisode) {
  const EnvConfig env = tiny();
  RolloutOptions opt;
  opt.episodes = 3;
  opt.master_seed = 42;
  const auto eps = rollout(env, factory("random", env), opt);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(eps[i].index, i);
    EXPECT_EQ(eps[i].seed, derive_seed(42, i));
    EXPECT_EQ(eps[i].steps.size(), 10u);
  }
}

TEST(Rollout, ParallelJobsMatchSerial) {
  const EnvConfig env = tiny();
  RolloutOptions opt;
  opt.episodes = 7;
  opt.master_seed = 5;
  const auto serial = rollout(env, factory("random", env), opt);
  opt.jobs = 3;
  const auto parallel = rollout(env, factory("random", env), opt);
  EXPECT_EQ(trajectories(env, serial), trajectories(env, parallel));
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(serial[i].episode_return, parallel[i].episode_return);
}

TEST(Rollout, OracleParallelMatchesSerial) {
  const EnvConfig env = tiny();
  RolloutOptions opt;
  opt.episodes = 3;
  opt.master_seed = 1;
  Scenario s = scenario_from_text(test::tiny_cstr_json);
  PolicyOptions po;
  po.oracle = s.oracle;
  PolicyFactory f = [&] { return make_policy("oracle", env, po); };
  const auto serial = rollout(env, f, opt);
  opt.jobs = 2;
  const auto parallel = rollout(env, f, opt);
  EXPECT_EQ(trajectories(env, serial), trajectories(env, parallel));
  EXPECT_EQ(serial[0].diagnostics.size(), 10u);
}

TEST(Rollout, DiscountedReturn) {
  const EnvConfig env = tiny(0.0);
  RolloutOptions opt;
  opt.gamma = 0.9;
  const auto eps = rollout(env, factory("constant:300", env), opt);
  double expect = 0.0, w = 1.0;
  for (const auto& s : eps[0].steps) {
    expect += w * s.reward;
    w *= 0.9;
  }
  EXPECT_NEAR(eps[0].episode_return, expect, 1e-15);
  opt.gamma = 1.5;
  EXPECT_THROW(rollout(env, factory("constant:300", env), opt), Error);
}

TEST(Rollout, FailuresAreRecordedNotThrown) {
  EnvConfig env = tiny(0.0);
  env.reward.kind = RewardKind::custom;
  env.reward.hook = [](const RewardContext& c) { return c.step == 4 ? std::nan("") : -1.0; };
  RolloutOptions opt;
  opt.episodes = 2;
  const auto eps = rollout(env, factory("constant:300", env), opt);
  ASSERT_EQ(eps.size(), 2u);
  EXPECT_TRUE(eps[0].failed);
  EXPECT_EQ(eps[0].error, ErrorCode::hook);
  const EvaluationReport rep = summarize("constant", env, eps, 1.0);
  EXPECT_EQ(rep.failed, 2u);
  EXPECT_TRUE(rep.returns.empty());
  EXPECT_EQ(rep.first_failure, ErrorCode::hook);
}

TEST(Report, SummaryAndGap) {
  const EnvConfig env = tiny();
  RolloutOptions opt;
  opt.episodes = 5;
  auto ref = summarize("oracle-ish", env, rollout(env, factory("constant:298.4", env), opt), 1.0);
  auto pol = summarize("random", env, rollout(env, factory("random", env), opt), 1.0);
  attach_gap(pol, ref, Normalization::per_step);
  ASSERT_TRUE(pol.gap.has_value());
  EXPECT_NEAR(pol.gap->value, (ref.median - pol.median) / 10.0, 1e-15);
  EXPECT_EQ(pol.per_step_returns.size(), 5u);
  EXPECT_DOUBLE_EQ(pol.per_step_returns[0], pol.returns[0] / 10.0);
  const auto j = report_json(pol);
  EXPECT_EQ(j["label"], "random");
  EXPECT_EQ(j["returns"].size(), 5u);
  EXPECT_FALSE(comparison_table({ref, pol}).empty());
}

TEST(Report, TrajectoryCsvLayout) {
  const EnvConfig env = tiny();
  RolloutOptions opt;
  const auto eps = rollout(env, factory("constant:300", env), opt);
  const std::string csv = trajectories(env, eps);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "episode,t,Ca,T,obs_Ca,obs_T,obs_Ca_sp,Tc,reward,violation");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 10u);
}
