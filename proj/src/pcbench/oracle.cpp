#include "pcbench/oracle.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "pcbench/error.hpp"
#include "pcbench/rng.hpp"

namespace pcbench {

void SolverSettings::validate() const {
  if (max_iterations < 1) config_error("oracle.max_iterations", "must be >= 1");
  if (!(tolerance > 0.0)) config_error("oracle.tolerance", "must be > 0");
  if (!(fd_step > 0.0)) config_error("oracle.fd_step", "must be > 0");
  if (!(penalty_weight > 0.0)) config_error("oracle.penalty_weight", "must be > 0");
  if (!(penalty_growth > 1.0)) config_error("oracle.penalty_growth", "must be > 1");
  if (max_escalations < 0) config_error("oracle.max_escalations", "must be >= 0");
  if (multistart < 1) config_error("oracle.multistart", "must be >= 1");
  if (!(constraint_margin >= 0.0)) config_error("oracle.constraint_margin", "must be >= 0");
}

void OcpSpec::validate() const {
  model.validate();
  integrator.validate();
  solver.validate();
  if (horizon < 1) config_error("oracle.horizon", "must be >= 1");
  if (!(dt > 0.0)) config_error("oracle.dt", "must be > 0");
  const auto n_tr = static_cast<Eigen::Index>(tracked_indices.size());
  if (Q.rows() != n_tr || Q.cols() != n_tr) config_error("oracle.Q", "must be square over the setpoint entries");
  if (R.rows() != model.n_u() || R.cols() != model.n_u()) config_error("oracle.R", "must be n_u x n_u");
  if (a_space.size() != model.n_u()) config_error("oracle.a_space", "size mismatch");
  if (tracked_space.size() != n_tr) config_error("oracle.tracked_space", "size mismatch");
  if (setpoints.empty() || disturbances.empty()) config_error("oracle.forecast", "empty forecast");
}

OcpSpec make_ocp_spec(const EnvConfig& env, const OracleSettings& settings) {
  OcpSpec spec;
  spec.model = env.model;
  spec.integrator = env.integrator;
  spec.dt = env.dt();
  spec.horizon = settings.horizon;
  spec.Q = settings.Q.size() ? settings.Q : env.reward.Q;
  spec.R = settings.R.size() ? settings.R : env.reward.R;
  spec.a_space = env.a_space;
  spec.tracked_space = env.tracked_space();
  spec.tracked_indices = env.tracked_indices();
  spec.constraints = env.constraints;
  spec.solver = settings.solver;
  const std::size_t n = env.steps + settings.horizon;
  spec.setpoints.reserve(n);
  spec.disturbances.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    spec.setpoints.push_back(env.setpoints.at_clamped(t));
    spec.disturbances.push_back(env.disturbances.at_clamped(env.model, t));
  }
  spec.validate();
  return spec;
}

struct OcpSolver::Trace {
  std::vector<Vector> states;
  std::vector<double> cost_before;
};

OcpSolver::OcpSolver(OcpSpec spec) : spec_(std::move(spec)), n_u_(spec_.model.n_u()) { spec_.validate(); }

double OcpSolver::run(std::size_t t, const Vector& z, const std::optional<Vector>& ubar_prev, double mu, Trace& trace,
                      std::size_t from_stage) const {
  const std::size_t N = spec_.horizon;
  double acc = trace.cost_before[from_stage];
  Vector x = trace.states[from_stage];
  const Vector& lo = spec_.a_space.low;
  const Vector span = spec_.a_space.high - spec_.a_space.low;
  const Vector tr_lo = spec_.tracked_space.low;
  const Vector tr_span = spec_.tracked_space.high - spec_.tracked_space.low;
  const auto n_tr = static_cast<Eigen::Index>(spec_.tracked_indices.size());
  Vector e(n_tr);
  try {
    for (std::size_t k = from_stage; k < N; ++k) {
      const auto ik = static_cast<Eigen::Index>(k);
      const auto zk = z.segment(ik * n_u_, n_u_);
      const Vector u = lo + zk.cwiseProduct(span);
      const std::size_t at = std::min(t + k, spec_.setpoints.size() - 1);
      x = integrate(spec_.model, x, u, spec_.disturbances[at], spec_.dt, spec_.integrator);
      const Vector m = spec_.model.measured(x);
      const Vector& sp = spec_.setpoints[at];
      for (Eigen::Index i = 0; i < n_tr; ++i) {
        e[i] = (m[spec_.tracked_indices[static_cast<std::size_t>(i)]] - sp[i]) / tr_span[i];
      }
      acc += e.dot(spec_.Q * e);
      if (k > 0) {
        const Vector du = zk - z.segment((ik - 1) * n_u_, n_u_);
        acc += du.dot(spec_.R * du);
      } else if (ubar_prev) {
        const Vector du = zk - *ubar_prev;
        acc += du.dot(spec_.R * du);
      }
      if (!spec_.constraints.empty()) {
        const Vector g = spec_.constraints.values(m).array() + spec_.solver.constraint_margin;
        acc += mu * g.cwiseMax(0.0).sum();
      }
      trace.states[k + 1] = x;
      trace.cost_before[k + 1] = acc;
    }
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
  return std::isfinite(acc) ? acc : std::numeric_limits<double>::infinity();
}

OcpSolver::Evaluation OcpSolver::evaluate(std::size_t t, const Vector& x_t, const std::optional<Vector>& u_prev,
                                          const Vector& z) const {
  const std::size_t N = spec_.horizon;
  std::optional<Vector> ubar_prev;
  if (u_prev) ubar_prev = normalize(*u_prev, spec_.a_space);
  Trace trace{std::vector<Vector>(N + 1), std::vector<double>(N + 1, 0.0)};
  trace.states[0] = x_t;

  Evaluation ev;
  ev.tracking = run(t, z, ubar_prev, 0.0, trace, 0);
  ev.states = trace.states;
  if (!std::isfinite(ev.tracking)) {
    ev.max_violation = std::numeric_limits<double>::infinity();
    ev.violation = std::numeric_limits<double>::infinity();
    return ev;
  }
  ev.max_violation = spec_.constraints.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= N; ++k) {
    if (spec_.constraints.empty()) break;
    const Vector g = spec_.constraints.values(spec_.model.measured(trace.states[k]));
    ev.max_violation = std::max(ev.max_violation, g.maxCoeff());
    ev.violation += (g.array() + spec_.solver.constraint_margin).cwiseMax(0.0).sum();
  }
  return ev;
}

OcpSolution OcpSolver::solve_starts(std::size_t t, const Vector& x_t, const std::optional<Vector>& u_prev,
                                    const std::vector<Vector>& starts) {
  if (!x_t.allFinite()) fail(ErrorCode::argument, "solve_ocp: non-finite state " + to_string(x_t));
  if (x_t.size() != spec_.model.n_x()) fail(ErrorCode::argument, "solve_ocp: state dimension mismatch");
  const std::size_t N = spec_.horizon;
  const Eigen::Index nz = static_cast<Eigen::Index>(N) * n_u_;
  const Vector lo = Vector::Zero(nz);
  const Vector hi = Vector::Ones(nz);
  std::optional<Vector> ubar_prev;
  if (u_prev) ubar_prev = normalize(*u_prev, spec_.a_space);

  Trace nominal{std::vector<Vector>(N + 1), std::vector<double>(N + 1, 0.0)};
  nominal.states[0] = x_t;
  Trace scratch = nominal;
  Vector nominal_z;
  double mu = spec_.solver.penalty_weight;

  const ObjectiveFn objective = [&](const Vector& z) {
    const double v = run(t, z, ubar_prev, mu, nominal, 0);
    nominal_z = z;
    return v;
  };
  // Perturbing stage k only changes stages >= k; walk stages backwards so the
  // scratch prefix is always the nominal one.
  const GradientFn gradient = [&](const Vector& z, double fz, Vector& grad) {
    if (nominal_z.size() != z.size() || nominal_z != z) fz = objective(z);
    grad.resize(nz);
    scratch.states = nominal.states;
    scratch.cost_before = nominal.cost_before;
    Vector zp = z;
    const double h = spec_.solver.fd_step;
    for (std::size_t k = N; k-- > 0;) {
      for (Eigen::Index j = n_u_ - 1; j >= 0; --j) {
        const Eigen::Index i = static_cast<Eigen::Index>(k) * n_u_ + j;
        const double step = z[i] + h > 1.0 ? -h : h;
        zp[i] = z[i] + step;
        const double fp = run(t, zp, ubar_prev, mu, scratch, k);
        grad[i] = (fp - fz) / step;
        zp[i] = z[i];
      }
    }
    if (!grad.allFinite()) {
      // Perturbation left the model's domain; fall back to a zero component so
      // the projected step is driven by the remaining coordinates.
      for (Eigen::Index i = 0; i < nz; ++i) {
        if (!std::isfinite(grad[i])) grad[i] = 0.0;
      }
    }
  };

  QuasiNewtonSettings qn;
  qn.max_iterations = spec_.solver.max_iterations;
  qn.tolerance = spec_.solver.tolerance;
  qn.fd_step = spec_.solver.fd_step;

  struct Level {
    Vector z;
    OptimizeResult opt;
    double max_violation;
  };
  std::vector<Level> levels;
  SolveDiagnostics diag;

  for (int level = 0; level <= spec_.solver.max_escalations; ++level) {
    std::vector<Vector> level_starts = level == 0 ? starts : std::vector<Vector>{levels.back().z};
    std::optional<OptimizeResult> best;
    for (const auto& s0 : level_starts) {
      if (!std::isfinite(objective(s0))) continue;
      OptimizeResult res = minimize_box(objective, gradient, s0, lo, hi, qn);
      diag.iterations += res.iterations;
      diag.evaluations += res.evaluations;
      if (!best || res.value < best->value) best = std::move(res);
    }
    if (!best) fail(ErrorCode::solver, "solve_ocp: every starting point leaves the model's domain at step " +
                                           std::to_string(t));
    const Evaluation ev = evaluate(t, x_t, u_prev, best->z);
    Level lv{best->z, *best, ev.max_violation};
    // The returned sequence never gets more violating as mu grows.
    if (!levels.empty() && lv.max_violation > levels.back().max_violation) {
      lv = levels.back();
    }
    levels.push_back(lv);
    diag.violation_by_level.push_back(std::max(lv.max_violation, 0.0));
    diag.penalty_weight = mu;
    diag.escalations = level;
    if (spec_.constraints.empty() || lv.max_violation <= 0.0) break;
    if (level < spec_.solver.max_escalations) mu *= spec_.solver.penalty_growth;
  }

  const Level& chosen = levels.back();
  const Evaluation ev = evaluate(t, x_t, u_prev, chosen.z);
  diag.converged = chosen.opt.converged;
  diag.gradient_norm = chosen.opt.projected_gradient_norm;
  diag.max_violation = spec_.constraints.empty() ? 0.0 : ev.max_violation;
  diag.feasible = diag.max_violation <= 0.0;

  OcpSolution sol;
  sol.objective = ev.tracking;
  sol.states = ev.states;
  sol.controls.reserve(N);
  for (std::size_t k = 0; k < N; ++k) {
    const Vector zk = chosen.z.segment(static_cast<Eigen::Index>(k) * n_u_, n_u_);
    sol.controls.push_back(denormalize(zk, spec_.a_space));
  }
  sol.diagnostics = std::move(diag);
  warm_ = std::make_pair(t, chosen.z);
  return sol;
}

OcpSolution OcpSolver::solve(std::size_t t, const Vector& x_t, const std::optional<Vector>& u_prev) {
  const std::size_t N = spec_.horizon;
  const Eigen::Index nz = static_cast<Eigen::Index>(N) * n_u_;
  std::vector<Vector> starts;

  if (warm_ && warm_->first < t) {
    const auto shift = static_cast<Eigen::Index>(t - warm_->first);
    const Vector& prev = warm_->second;
    Vector z(nz);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(N); ++k) {
      const Eigen::Index src = std::min<Eigen::Index>(k + shift, static_cast<Eigen::Index>(N) - 1);
      z.segment(k * n_u_, n_u_) = prev.segment(src * n_u_, n_u_);
    }
    starts.push_back(z);
  }

  const Vector hold = u_prev ? Vector(normalize(*u_prev, spec_.a_space).cwiseMax(0.0).cwiseMin(1.0))
                             : Vector(Vector::Constant(n_u_, 0.5));
  std::vector<Vector> cold;
  cold.push_back(hold.replicate(static_cast<Eigen::Index>(N), 1));
  cold.push_back(Vector::Constant(nz, 0.5));
  Rng rng(derive_seed(0x5eed, t));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  while (static_cast<int>(cold.size()) < spec_.solver.multistart) {
    Vector z(nz);
    for (Eigen::Index i = 0; i < nz; ++i) z[i] = unif(rng);
    cold.push_back(z);
  }
  for (const auto& c : cold) {
    if (static_cast<int>(starts.size()) >= spec_.solver.multistart) break;
    starts.push_back(c);
  }
  return solve_starts(t, x_t, u_prev, starts);
}

OcpSolution OcpSolver::solve_from(std::size_t t, const Vector& x_t, const std::optional<Vector>& u_prev,
                                  const Vector& z0) {
  if (z0.size() != static_cast<Eigen::Index>(spec_.horizon) * n_u_) {
    fail(ErrorCode::argument, "solve_from: starting guess has the wrong size");
  }
  return solve_starts(t, x_t, u_prev, {z0.cwiseMax(0.0).cwiseMin(1.0)});
}

OcpSolution solve_ocp(const OcpSpec& spec, std::size_t t, const Vector& x_t, const std::optional<Vector>& u_prev) {
  OcpSolver solver(spec);
  return solver.solve(t, x_t, u_prev);
}

}  // namespace pcbench
