#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pcbench/config_io.hpp"
#include "pcbench/error.hpp"
#include "pcbench/oracle.hpp"
#include "riccati.hpp"
#include "test_support.hpp"

using namespace pcbench;

TEST(Oracle, MatchesRiccatiOnDoubleIntegrator) {
  const test::DoubleIntegrator di;
  OcpSolver solver(di.spec());
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    const Eigen::Vector2d x(d(rng), d(rng));
    const double u_prev = d(rng);
    solver.clear_warm_start();
    const OcpSolution sol = solver.solve(0, Vector(x), Vector::Constant(1, u_prev));
    EXPECT_NEAR(sol.controls.front()[0], di.first_control(x, u_prev), 1e-3) << i;
  }
}

TEST(Oracle, PredictedStatesFollowTheModel) {
  const test::DoubleIntegrator di;
  const OcpSpec spec = di.spec();
  OcpSolver solver(spec);
  const Eigen::Vector2d x(0.5, -0.2);
  const OcpSolution sol = solver.solve(0, Vector(x), Vector::Zero(1));
  ASSERT_EQ(sol.controls.size(), spec.horizon);
  ASSERT_EQ(sol.states.size(), spec.horizon + 1);
  Eigen::Vector2d s = x;
  for (std::size_t k = 0; k < spec.horizon; ++k) {
    s = di.A() * s + di.B() * sol.controls[k][0];
    EXPECT_NEAR((sol.states[k + 1] - Vector(s)).norm(), 0.0, 1e-12);
  }
}

TEST(Oracle, HoldsCstrSteadyState) {
  Scenario s = scenario_from_text(test::tiny_cstr_json);
  OracleSettings o = s.oracle;
  const OcpSpec spec = make_ocp_spec(s.env, o);
  OcpSolver solver(spec);
  // Mass balance fixes k(T) at Ca = 0.85; the energy balance then gives Tc.
  const double ca = 0.85, k = (1.0 - ca) / ca;
  const double temp = -8750.0 / std::log(k / 7.2e10);
  const double tc = temp - ((350.0 - temp) + 5.0e4 / 239.0 * k * ca) / (5.0e4 / 23900.0);
  Vector x(2), u(1);
  x << ca, temp;
  u << tc;
  ASSERT_LT(spec.model.rhs(x, u, spec.disturbances[0]).norm(), 1e-9);
  const OcpSolution sol = solver.solve(0, x, u);
  EXPECT_NEAR(sol.controls.front()[0], tc, 0.05);
  EXPECT_LT(sol.objective, 1e-8);
}

TEST(Oracle, ConstraintMarginKeepsPredictionFeasible) {
  Scenario s = test::bundled("cstr_constrained");
  const OcpSpec spec = make_ocp_spec(s.env, s.oracle);
  OcpSolver solver(spec);
  Vector x(2);
  x << 0.8, 326.0;
  const OcpSolution sol = solver.solve(0, x, std::nullopt);
  EXPECT_TRUE(sol.diagnostics.feasible);
  EXPECT_LE(sol.diagnostics.max_violation, 0.0);
  for (const auto& st : sol.states) {
    EXPECT_LE(st[1], 327.0);
    EXPECT_GE(st[1], 321.0 - 1e-9);
  }
}

TEST(Oracle, ForecastIsPaddedPastTheEpisode) {
  Scenario s = scenario_from_text(test::tiny_cstr_json);
  const OcpSpec spec = make_ocp_spec(s.env, s.oracle);
  EXPECT_GE(spec.setpoints.size(), s.env.steps + spec.horizon);
  EXPECT_DOUBLE_EQ(spec.setpoints.back()[0], 0.9);
  OcpSolver solver(spec);
  Vector x(2);
  x << 0.85, 320.0;
  EXPECT_NO_THROW(solver.solve(s.env.steps - 1, x, std::nullopt));
}

TEST(Oracle, SettingsValidate) {
  SolverSettings bad;
  bad.tolerance = -1.0;
  EXPECT_THROW(bad.validate(), Error);
  test::DoubleIntegrator di;
  OcpSpec spec = di.spec();
  spec.Q = Matrix::Identity(3, 3);
  EXPECT_THROW(OcpSolver{spec}, Error);
}
