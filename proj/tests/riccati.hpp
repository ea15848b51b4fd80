#pragma once

// Finite-horizon LQR reference for the oracle on a double integrator.
//
// The oracle penalizes moves, so the reference runs the Riccati recursion on the
// augmented state z = [x; u_prev] with the move v = u - u_prev as the input:
//   z+ = [A B; 0 I] z + [B; I] v,   cost  sum_{k=1..N} z_k' diag(Q, 0) z_k + sum_{k=0..N-1} v_k' R v_k.

#include <Eigen/Dense>

#include "pcbench/models.hpp"
#include "pcbench/oracle.hpp"

namespace pcbench::test {

struct DoubleIntegrator {
  double dt = 0.5;
  double span = 5.0;  // bounds are [-span, span] on states and input, so normalization is a common scale
  std::size_t horizon = 17;
  double r = 0.1;

  Eigen::Matrix2d A() const { return (Eigen::Matrix2d() << 1, dt, 0, 1).finished(); }
  Eigen::Vector2d B() const { return {dt * dt / 2, dt}; }

  ModelDescriptor model() const {
    ModelDescriptor m;
    m.name = "double_integrator";
    m.state_names = {"p", "v"};
    m.input_names = {"a"};
    m.time_unit = "s";
    m.default_substeps = 1;  // RK4 is exact on this system
    m.rhs_fn = [](const Vector& x, const Vector& u, const Vector&, Vector& dx) {
      dx.resize(2);
      dx << x[1], u[0];
    };
    return m;
  }

  OcpSpec spec() const {
    OcpSpec s;
    s.model = model();
    s.integrator.substeps = 1;
    s.dt = dt;
    s.horizon = horizon;
    s.Q = Matrix::Identity(2, 2);
    s.R = Matrix::Identity(1, 1) * r;
    s.a_space = Box{Vector::Constant(1, -span), Vector::Constant(1, span)};
    s.tracked_space = Box{Vector::Constant(2, -span), Vector::Constant(2, span)};
    s.tracked_indices = {0, 1};
    s.setpoints.assign(horizon + 1, Vector::Zero(2));
    s.disturbances.assign(horizon + 1, Vector());
    s.solver.tolerance = 1e-8;
    s.solver.max_iterations = 500;
    return s;
  }

  // First optimal input from state x with previous input u_prev.
  double first_control(const Eigen::Vector2d& x, double u_prev) const {
    Eigen::Matrix3d Abar = Eigen::Matrix3d::Zero();
    Abar.topLeftCorner<2, 2>() = A();
    Abar.topRightCorner<2, 1>() = B();
    Abar(2, 2) = 1.0;
    const Eigen::Vector3d Bbar(B()[0], B()[1], 1.0);
    Eigen::Matrix3d Qbar = Eigen::Matrix3d::Zero();
    Qbar.topLeftCorner<2, 2>() = Eigen::Matrix2d::Identity();
    // Normalized coordinates scale states and moves by the same 1/(2 span), so R keeps its value.
    Eigen::Matrix3d P = Qbar;
    Eigen::RowVector3d K;
    for (std::size_t k = horizon; k-- > 0;) {
      const double s = r + Bbar.dot(P * Bbar);
      K = (Bbar.transpose() * P * Abar) / s;
      P = Qbar + Abar.transpose() * P * (Abar - Bbar * K);
    }
    const Eigen::Vector3d z(x[0], x[1], u_prev);
    return u_prev - K.dot(z);
  }
};

}  // namespace pcbench::test
