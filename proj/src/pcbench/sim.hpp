#pragma once

#include <functional>

#include "pcbench/models.hpp"
#include "pcbench/types.hpp"

namespace pcbench {

struct IntegratorConfig {
  enum class Method { rk4 };

  int substeps = 10;
  Method method = Method::rk4;

  void validate() const;
};

/// dx/dt = f(x) with inputs already bound (zero-order hold over the interval).
using AutonomousRhs = std::function<void(const Vector& x, Vector& dxdt)>;

/// Fixed-step classic RK4 over [0, dt] with cfg.substeps equal steps.
/// Throws IntegrationError naming the substep where a non-finite value appeared.
Vector integrate(const AutonomousRhs& f, const Vector& x0, double dt, const IntegratorConfig& cfg);

/// One control interval of a model: u and d are held constant over dt.
Vector integrate(const ModelDescriptor& model, const Vector& x, const Vector& u, const Vector& d, double dt,
                 const IntegratorConfig& cfg);

}  // namespace pcbench
