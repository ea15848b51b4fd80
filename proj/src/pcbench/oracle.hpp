#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pcbench/env.hpp"
#include "pcbench/models.hpp"
#include "pcbench/optimizer.hpp"
#include "pcbench/scenario.hpp"
#include "pcbench/sim.hpp"
#include "pcbench/types.hpp"

namespace pcbench {

struct SolverSettings {
  int max_iterations = 100;
  double tolerance = 1e-5;       // projected-gradient norm; forward differences limit accuracy to about fd_step
  double fd_step = 1e-6;         // normalized control units
  double penalty_weight = 10.0;  // initial mu of the exact l1 penalty
  double penalty_growth = 10.0;
  int max_escalations = 3;
  int multistart = 1;            // >1 adds cold starts next to the warm start
  double constraint_margin = 0.0;  // raw units; the OCP enforces g + margin <= 0

  void validate() const;
};

/// Oracle settings as they appear in scenario files. Empty Q/R inherit the reward weights.
struct OracleSettings {
  std::size_t horizon = 10;
  Matrix Q;
  Matrix R;
  SolverSettings solver;
};

/// Finite-horizon tracking problem in normalized coordinates:
///   min  sum_k (xbar_{k+1} - xbar*_k)^T Q (...) + (ubar_k - ubar_{k-1})^T R (...) + mu * sum max(0, g + margin)
/// over the N normalized controls, states from forward simulation with the sim module.
/// Stage k compares the state after the k-th interval with the setpoint of that
/// interval, which is exactly the environment's reward for the same transition.
struct OcpSpec {
  ModelDescriptor model;
  IntegratorConfig integrator;
  double dt = 1.0;
  std::size_t horizon = 1;
  Matrix Q;
  Matrix R;
  Box a_space;
  Box tracked_space;
  std::vector<Eigen::Index> tracked_indices;  // into the measured vector
  ConstraintSet constraints;                  // bound to `model`
  std::vector<Vector> setpoints;              // raw targets per absolute step
  std::vector<Vector> disturbances;           // full disturbance vector per absolute step
  SolverSettings solver;

  void validate() const;
};

/// Builds the oracle problem for a scenario. Forecasts are the scenario's exact
/// schedules, padded past the end of the episode by holding the last value.
OcpSpec make_ocp_spec(const EnvConfig& env, const OracleSettings& settings);

struct SolveDiagnostics {
  int iterations = 0;
  int evaluations = 0;
  double gradient_norm = 0.0;
  double penalty_weight = 0.0;
  int escalations = 0;
  bool converged = false;
  bool feasible = true;
  double max_violation = 0.0;        // max g over the predicted states, raw units
  std::vector<double> violation_by_level;  // one entry per penalty level tried
};

struct OcpSolution {
  std::vector<Vector> controls;  // raw u_t .. u_{t+N-1}
  std::vector<Vector> states;    // raw x_t .. x_{t+N}
  double objective = 0.0;        // tracking objective without the penalty
  SolveDiagnostics diagnostics;
};

class OcpSolver {
 public:
  explicit OcpSolver(OcpSpec spec);

  /// Solves the problem at absolute step t from raw state x_t. Without u_prev the
  /// first move is free. Warm-starts from the previous solution shifted by one step.
  OcpSolution solve(std::size_t t, const Vector& x_t, const std::optional<Vector>& u_prev);

  /// Solve from an explicit normalized starting guess (N * n_u, stage-major); no warm start.
  OcpSolution solve_from(std::size_t t, const Vector& x_t, const std::optional<Vector>& u_prev, const Vector& z0);

  void clear_warm_start() { warm_.reset(); }
  const OcpSpec& spec() const { return spec_; }

  /// Tracking objective and summed penalty of a normalized control sequence.
  struct Evaluation {
    double tracking = 0.0;
    double violation = 0.0;      // sum max(0, g + margin)
    double max_violation = 0.0;  // max g without margin
    std::vector<Vector> states;
  };
  Evaluation evaluate(std::size_t t, const Vector& x_t, const std::optional<Vector>& u_prev, const Vector& z) const;

 private:
  struct Trace;
  double run(std::size_t t, const Vector& z, const std::optional<Vector>& ubar_prev, double mu, Trace& trace,
             std::size_t from_stage) const;
  OcpSolution solve_starts(std::size_t t, const Vector& x_t, const std::optional<Vector>& u_prev,
                           const std::vector<Vector>& starts);

  OcpSpec spec_;
  Eigen::Index n_u_;
  std::optional<std::pair<std::size_t, Vector>> warm_;  // (step, normalized solution)
};

OcpSolution solve_ocp(const OcpSpec& spec, std::size_t t, const Vector& x_t, const std::optional<Vector>& u_prev);

}  // namespace pcbench
