#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "pcbench/config_io.hpp"
#include "pcbench/error.hpp"
#include "pcbench/models.hpp"
#include "pcbench/sim.hpp"
#include "test_support.hpp"

using namespace pcbench;

namespace {

// Seborg CSTR written out independently of the library.
Eigen::Vector2d cstr_reference(double ca, double t, double tc, double ti, double caf) {
  const double k = 7.2e10 * std::exp(-8750.0 / t);
  return {1.0 * (caf - ca) - k * ca, 1.0 * (ti - t) + 5.0e4 / 239.0 * k * ca + 5.0e4 / (239.0 * 100.0) * (tc - t)};
}

// Newton on the reference equations for (Ca, T) at a given jacket temperature.
Eigen::Vector2d cstr_steady_state(double tc, Eigen::Vector2d z) {
  for (int it = 0; it < 50; ++it) {
    const Eigen::Vector2d f = cstr_reference(z[0], z[1], tc, 350.0, 1.0);
    Eigen::Matrix2d jac;
    for (int j = 0; j < 2; ++j) {
      Eigen::Vector2d zp = z;
      const double h = 1e-7 * std::max(1.0, std::abs(z[j]));
      zp[j] += h;
      jac.col(j) = (cstr_reference(zp[0], zp[1], tc, 350.0, 1.0) - f) / h;
    }
    z -= jac.lu().solve(f);
  }
  return z;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST(Cstr, MatchesReferenceEquations) {
  const ModelDescriptor m = model_registry("cstr");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ca(0.0, 1.0), t(290.0, 420.0), tc(280.0, 320.0), ti(330.0, 370.0);
  for (int i = 0; i < 200; ++i) {
    const double a = ca(rng), b = t(rng), c = tc(rng), d = ti(rng);
    const Vector got = m.rhs(vec({a, b}), vec({c}), vec({d, 1.0}));
    const Eigen::Vector2d want = cstr_reference(a, b, c, d, 1.0);
    EXPECT_NEAR(got[0], want[0], 1e-9 * (1 + std::abs(want[0])));
    EXPECT_NEAR(got[1], want[1], 1e-9 * (1 + std::abs(want[1])));
  }
}

TEST(Cstr, SteadyStateStaysPut) {
  const ModelDescriptor m = model_registry("cstr");
  for (double tc : {295.0, 300.0, 302.0}) {
    const Eigen::Vector2d ss = cstr_steady_state(tc, {0.85, 320.0});
    const Vector x = integrate(m, vec({ss[0], ss[1]}), vec({tc}), m.default_disturbance_vector(), 10.0, {});
    EXPECT_NEAR(x[0], ss[0], 1e-8) << tc;
    EXPECT_NEAR(x[1], ss[1], 1e-6) << tc;
  }
}

TEST(Cstr, ZeroConcentrationHasNoReaction) {
  const ModelDescriptor m = model_registry("cstr");
  const Vector dx = m.rhs(vec({0.0, 350.0}), vec({300.0}), vec({350.0, 1.0}));
  EXPECT_DOUBLE_EQ(dx[0], 1.0);
}

TEST(Cstr, RejectsNonPositiveTemperature) {
  const ModelDescriptor m = model_registry("cstr");
  EXPECT_THROW(m.rhs(vec({0.5, 0.0}), vec({300.0}), vec({350.0, 1.0})), Error);
}

TEST(FourTank, ClosedFormSteadyState) {
  const ModelDescriptor m = model_registry("four_tank");
  const double g = 9.8;
  for (auto [v1, v2] : {std::pair{3.15, 3.15}, std::pair{6.0, 5.0}, std::pair{1.0, 9.0}}) {
    const double h3 = std::pow(0.8 * 9.5e-4 * v2 / 2.0e-3, 2) / (2 * g);
    const double h4 = std::pow(0.8 * 8.5e-4 * v1 / 2.5e-3, 2) / (2 * g);
    const double h1 = std::pow((2.0e-3 * std::sqrt(2 * g * h3) + 0.2 * 8.5e-4 * v1) / 3.5e-3, 2) / (2 * g);
    const double h2 = std::pow((2.5e-3 * std::sqrt(2 * g * h4) + 0.2 * 9.5e-4 * v2) / 3.0e-3, 2) / (2 * g);
    const Vector dx = m.rhs(vec({h1, h2, h3, h4}), vec({v1, v2}), Vector());
    EXPECT_LT(dx.lpNorm<Eigen::Infinity>(), 1e-12) << v1 << "," << v2;
  }
}

TEST(FourTank, EmptyTanksFillFromPumps) {
  const ModelDescriptor m = model_registry("four_tank");
  const Vector dx = m.rhs(vec({0, 0, 0, 0}), vec({2.0, 3.0}), Vector());
  EXPECT_NEAR(dx[0], 0.2 * 8.5e-4 * 2.0, 1e-15);
  EXPECT_NEAR(dx[1], 0.2 * 9.5e-4 * 3.0, 1e-15);
  EXPECT_NEAR(dx[2], 0.8 * 9.5e-4 * 3.0, 1e-15);
  EXPECT_NEAR(dx[3], 0.8 * 8.5e-4 * 2.0, 1e-15);
}

TEST(Extraction, SoluteBalance) {
  // d/dt (Vl sum X + Vg sum Y) = L (X0 - X5) + G (Y6 - Y1)
  const ModelDescriptor m = model_registry("multistage_extraction");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(0.0, 0.7), f(5.0, 200.0);
  for (int i = 0; i < 50; ++i) {
    Vector x(10);
    for (Eigen::Index k = 0; k < 10; ++k) x[k] = c(rng);
    const Vector u = vec({f(rng), f(rng)});
    const Vector d = vec({0.6, 0.05});
    const Vector dx = m.rhs(x, u, d);
    const double lhs = 5.0 * dx.head(5).sum() + 5.0 * dx.tail(5).sum();
    const double rhs = u[0] * (d[0] - x[4]) + u[1] * (d[1] - x[5]);
    EXPECT_NEAR(lhs, rhs, 1e-10 * (1 + std::abs(rhs)));
  }
}

TEST(Extraction, EquilibriumStageHasNoTransfer) {
  // With X = sqrt(Y) in every stage, no inflow difference and no transfer.
  const ModelDescriptor m = model_registry("multistage_extraction");
  Vector x(10);
  x << 0.3, 0.3, 0.3, 0.3, 0.3, 0.09, 0.09, 0.09, 0.09, 0.09;
  const Vector dx = m.rhs(x, vec({40, 100}), vec({0.3, 0.09}));
  EXPECT_LT(dx.lpNorm<Eigen::Infinity>(), 1e-14);
}

TEST(Crystallization, NoKineticsWhenUndersaturated) {
  const CrystallizationParams p;
  for (double temp : {10.0, 25.0, 40.0}) {
    const double c_eq = crystallization_equilibrium(temp);
    Vector x = vec({1000, 2e4, 2e6, 2e8, 0.9 * c_eq * 1e-3});
    const auto k = crystallization_kinetics(x, temp, p);
    EXPECT_LE(k.supersat, 0.0);
    EXPECT_EQ(k.nucleation, 0.0);
    EXPECT_EQ(k.growth, 0.0);
    const Vector dx = crystallization_rhs(x, vec({temp}), p);
    EXPECT_EQ(dx.lpNorm<Eigen::Infinity>(), 0.0);
  }
}

TEST(Crystallization, KineticsPowerLaws) {
  const CrystallizationParams p;
  const Vector x = vec({1478.01, 22995.82, 1800863.24, 248516167.94, 0.1586});
  const double temp = 25.0, tk = 298.15;
  const double c_eq = -686.2686 + 3.579165 * tk - 0.00292874 * tk * tk;
  const double s = 0.1586 * 1e3 - c_eq;
  ASSERT_GT(s, 0.0);
  const auto k = crystallization_kinetics(x, temp, p);
  EXPECT_NEAR(k.supersat, s, 1e-9);
  EXPECT_NEAR(k.nucleation, 0.92 * std::exp(-6800.0 / tk) * std::pow(s, 0.92) * std::pow(x[3], 1.3),
              1e-9 * k.nucleation);
  EXPECT_NEAR(k.growth, 48.0 * std::exp(-4900.0 / tk) * std::pow(s, 1.9), 1e-12 * k.growth);
}

TEST(Crystallization, OutputsFromMoments) {
  const Vector x = vec({1478.01, 22995.82, 1800863.24, 248516167.94, 0.1586});
  const auto o = crystallization_outputs(x);
  EXPECT_NEAR(o.mean_length, 22995.82 / 1478.01, 1e-12);
  EXPECT_NEAR(o.cv, std::sqrt(1800863.24 * 1478.01 / (22995.82 * 22995.82) - 1.0), 1e-12);
  EXPECT_THROW(crystallization_outputs(vec({0.0, 1.0, 1.0, 1.0, 0.1})), Error);
}

TEST(Crystallization, ObserverSeesEveryEvaluation) {
  const ModelDescriptor m = model_registry("crystallization");
  int calls = 0;
  set_kinetics_observer([&](const Vector&, double, const CrystallizationKinetics&) { ++calls; });
  IntegratorConfig cfg;
  cfg.substeps = 5;
  integrate(m, vec({1478.01, 22995.82, 1800863.24, 248516167.94, 0.1586}), vec({30.0}), Vector(), 1.0, cfg);
  set_kinetics_observer({});
  EXPECT_EQ(calls, 20);
}

TEST(Registry, ParameterFilesMatchBuiltins) {
  for (const auto& name : model_names()) {
    std::string file_model;
    const ParameterMap file = load_model_parameters(test::data_path("models/" + name + ".json"), &file_model);
    const ModelDescriptor m = model_registry(name);
    EXPECT_EQ(file_model, name);
    ASSERT_EQ(file.size(), m.params.size()) << name;
    for (const auto& [k, p] : m.params) {
      ASSERT_TRUE(file.contains(k)) << name << "." << k;
      EXPECT_EQ(file.at(k).value, p.value) << name << "." << k;
      EXPECT_EQ(file.at(k).unit, p.unit) << name << "." << k;
    }
  }
}

TEST(Registry, OverridesApplyAndUnknownsFail) {
  const ModelDescriptor m = model_registry("cstr", {{"UA", 6.0e4}});
  EXPECT_EQ(m.params.at("UA").value, 6.0e4);
  EXPECT_THROW(model_registry("cstr", {{"nope", 1.0}}), Error);
  try {
    model_registry("reactor9");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config);
    EXPECT_NE(std::string(e.what()).find("four_tank"), std::string::npos);
  }
}

TEST(Registry, DescriptorsValidate) {
  for (const auto& name : model_names()) {
    const ModelDescriptor m = model_registry(name);
    EXPECT_NO_THROW(m.validate());
    EXPECT_EQ(m.measured_names().size(), static_cast<std::size_t>(m.n_measured()));
  }
}
