#include "pcbench/sim.hpp"

#include <cmath>

#include "pcbench/error.hpp"

namespace pcbench {

void IntegratorConfig::validate() const {
  if (substeps < 1) config_error("integrator.substeps", "must be >= 1, got " + std::to_string(substeps));
}

Vector integrate(const AutonomousRhs& f, const Vector& x0, double dt, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::argument, "integrate: dt must be positive and finite");
  if (!x0.allFinite()) throw IntegrationError(0, "integrate: non-finite initial state " + to_string(x0));

  const double h = dt / cfg.substeps;
  const Eigen::Index n = x0.size();
  Vector x = x0;
  Vector k1(n), k2(n), k3(n), k4(n), stage(n);
  for (int s = 0; s < cfg.substeps; ++s) {
    const auto idx = static_cast<std::size_t>(s);
    try {
      f(x, k1);
      stage = x + 0.5 * h * k1;
      f(stage, k2);
      stage = x + 0.5 * h * k2;
      f(stage, k3);
      stage = x + h * k3;
      f(stage, k4);
    } catch (const IntegrationError&) {
      throw;
    } catch (const Error& e) {
      throw IntegrationError(idx, "integrate: right-hand side failed at substep " + std::to_string(s) + ": " +
                                      e.what());
    }
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) {
      throw IntegrationError(idx, "integrate: non-finite state at substep " + std::to_string(s) + ": " +
                                      to_string(x));
    }
  }
  return x;
}

Vector integrate(const ModelDescriptor& model, const Vector& x, const Vector& u, const Vector& d, double dt,
                 const IntegratorConfig& cfg) {
  return integrate([&](const Vector& xs, Vector& dx) { model.rhs(xs, u, d, dx); }, x, dt, cfg);
}

}  // namespace pcbench
