#pragma once

#include <functional>

#include "pcbench/types.hpp"

namespace pcbench {

struct QuasiNewtonSettings {
  int max_iterations = 200;
  double tolerance = 1e-6;   // on the infinity norm of the projected gradient
  double fd_step = 1e-6;     // forward-difference step
  int max_backtracks = 40;
  double armijo = 1e-4;
};

struct OptimizeResult {
  Vector z;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  double projected_gradient_norm = 0.0;
  bool converged = false;
};

using ObjectiveFn = std::function<double(const Vector& z)>;
/// Gradient at z given f(z); implementations may reuse work from the objective.
using GradientFn = std::function<void(const Vector& z, double fz, Vector& grad)>;

/// Forward differences; steps backwards on coordinates sitting at the upper bound.
Vector forward_difference_gradient(const ObjectiveFn& f, const Vector& z, double fz, double h, const Vector& lo,
                                   const Vector& hi);

/// ||z - P(z - g)||_inf.
double projected_gradient_norm(const Vector& z, const Vector& g, const Vector& lo, const Vector& hi);

/// Projected BFGS (two-metric projection) on lo <= z <= hi with an Armijo search
/// along the projection arc. An empty `grad` selects forward differences.
OptimizeResult minimize_box(const ObjectiveFn& f, const GradientFn& grad, const Vector& z0, const Vector& lo,
                            const Vector& hi, const QuasiNewtonSettings& settings);

}  // namespace pcbench
