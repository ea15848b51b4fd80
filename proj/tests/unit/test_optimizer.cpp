#include <gtest/gtest.h>

#include <cmath>

#include "pcbench/optimizer.hpp"

using namespace pcbench;

TEST(Optimizer, BoxConstrainedQuadratic) {
  // min (z0 - 2)^2 + (z1 + 1)^2 + 0.5 z0 z1 on [0,1]^2 -> z0 = 1, z1 = 0
  const ObjectiveFn f = [](const Vector& z) {
    return (z[0] - 2) * (z[0] - 2) + (z[1] + 1) * (z[1] + 1) + 0.5 * z[0] * z[1];
  };
  QuasiNewtonSettings s;
  const auto r = minimize_box(f, {}, Vector::Constant(2, 0.5), Vector::Zero(2), Vector::Ones(2), s);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.z[0], 1.0, 1e-6);
  EXPECT_NEAR(r.z[1], 0.0, 1e-6);
}

TEST(Optimizer, InteriorMinimumWithAnalyticGradient) {
  const ObjectiveFn f = [](const Vector& z) { return (z.array() - 0.3).square().sum() * 4.0; };
  const GradientFn g = [](const Vector& z, double, Vector& grad) { grad = 8.0 * (z.array() - 0.3).matrix(); };
  QuasiNewtonSettings s;
  s.tolerance = 1e-12;
  const auto r = minimize_box(f, g, Vector::Zero(5), Vector::Zero(5), Vector::Ones(5), s);
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.z.array() - 0.3).abs().maxCoeff(), 1e-9);
}

TEST(Optimizer, RosenbrockInBox) {
  const ObjectiveFn f = [](const Vector& z) {
    const double a = z[0] * 3 - 1.5, b = z[1] * 3 - 1.5;  // [0,1] -> [-1.5, 1.5]
    return 100 * (b - a * a) * (b - a * a) + (1 - a) * (1 - a);
  };
  QuasiNewtonSettings s;
  s.max_iterations = 2000;
  s.tolerance = 1e-7;
  const auto r = minimize_box(f, {}, Vector::Constant(2, 0.1), Vector::Zero(2), Vector::Ones(2), s);
  EXPECT_NEAR(r.z[0] * 3 - 1.5, 1.0, 1e-3);
  EXPECT_NEAR(r.z[1] * 3 - 1.5, 1.0, 2e-3);
}

TEST(Optimizer, ForwardDifferenceStepsInward) {
  const ObjectiveFn f = [](const Vector& z) { return z[0] * z[0]; };
  Vector z = Vector::Ones(1);
  const Vector g = forward_difference_gradient(f, z, 1.0, 1e-6, Vector::Zero(1), Vector::Ones(1));
  EXPECT_NEAR(g[0], 2.0, 1e-5);
}

TEST(Optimizer, ProjectedGradientNorm) {
  Vector z(2), g(2);
  z << 0.0, 0.5;
  g << 1.0, -0.25;  // first coordinate blocked at the lower bound
  EXPECT_DOUBLE_EQ(projected_gradient_norm(z, g, Vector::Zero(2), Vector::Ones(2)), 0.25);
}
