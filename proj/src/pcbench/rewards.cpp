#include "pcbench/rewards.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "pcbench/error.hpp"

namespace pcbench {

std::string_view to_string(RewardKind kind) {
  switch (kind) {
    case RewardKind::tracking_quadratic: return "tracking_quadratic";
    case RewardKind::constraint_shaped: return "constraint_shaped";
    case RewardKind::abs_error: return "abs_error";
    case RewardKind::squared_error: return "squared_error";
    case RewardKind::sparse: return "sparse";
    case RewardKind::custom: return "custom";
  }
  return "unknown";
}

RewardKind reward_kind_from_string(std::string_view name) {
  for (auto k : {RewardKind::tracking_quadratic, RewardKind::constraint_shaped, RewardKind::abs_error,
                 RewardKind::squared_error, RewardKind::sparse, RewardKind::custom}) {
    if (to_string(k) == name) return k;
  }
  config_error("reward.kind", "unknown reward kind '" + std::string(name) + "'");
}

namespace {

void check_psd(const Matrix& m, Eigen::Index n, const char* field) {
  if (m.rows() != n || m.cols() != n) {
    config_error(field, "expected " + std::to_string(n) + "x" + std::to_string(n) + ", got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) config_error(field, "non-finite entry");
  if (!m.isApprox(m.transpose(), 1e-12) && !(m - m.transpose()).isZero(1e-12)) {
    config_error(field, "must be symmetric");
  }
  if (n == 0) return;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    config_error(field, "must be positive semidefinite");
  }
}

}  // namespace

void RewardSelector::resolve(Eigen::Index n_tracked, Eigen::Index n_u) {
  if (Q.size() == 0) Q = Matrix::Identity(n_tracked, n_tracked);
  if (R.size() == 0) R = Matrix::Zero(n_u, n_u);
  check_psd(Q, n_tracked, "reward.Q");
  check_psd(R, n_u, "reward.R");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) config_error("reward.lambda", "must be >= 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) config_error("reward.epsilon", "must be > 0");
  if (kind == RewardKind::custom && !hook) config_error("reward.kind", "custom reward selected without a hook");
}

double RewardSelector::evaluate(const RewardContext& c) const {
  switch (kind) {
    case RewardKind::tracking_quadratic:
      return rewards::tracking(c.tracked, c.setpoint, c.action, c.previous_action, Q, R);
    case RewardKind::constraint_shaped:
      return rewards::shaped(rewards::tracking(c.tracked, c.setpoint, c.action, c.previous_action, Q, R),
                             c.constraint_g, lambda);
    case RewardKind::abs_error: return rewards::abs_error(c.tracked, c.setpoint);
    case RewardKind::squared_error: return rewards::squared_error(c.tracked, c.setpoint);
    case RewardKind::sparse: return rewards::sparse(c.tracked, c.setpoint, epsilon);
    case RewardKind::custom: {
      const double r = hook(c);
      if (!std::isfinite(r)) {
        fail(ErrorCode::hook, "custom reward returned non-finite value at step " + std::to_string(c.step));
      }
      return r;
    }
  }
  fail(ErrorCode::internal, "unhandled reward kind");
}

namespace rewards {

namespace {
void same_size(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    fail(ErrorCode::argument, std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) + " vs " +
                                  std::to_string(b.size()) + ")");
  }
}
}  // namespace

double tracking(const Vector& x_next, const Vector& x_star, const Vector& u, const Vector& u_prev, const Matrix& Q,
                const Matrix& R) {
  same_size(x_next, x_star, "tracking reward state");
  same_size(u, u_prev, "tracking reward action");
  if (Q.rows() != x_next.size() || Q.cols() != x_next.size() || R.rows() != u.size() || R.cols() != u.size()) {
    fail(ErrorCode::argument, "tracking reward: weight matrix dimension mismatch");
  }
  const Vector e = x_next - x_star;
  const Vector du = u - u_prev;
  return -(e.dot(Q * e) + du.dot(R * du));
}

double constraint_penalty(const Vector& g, double lambda) {
  if (g.size() == 0 || lambda == 0.0) return 0.0;
  return lambda * g.cwiseMax(0.0).sum();
}

double shaped(double r_base, const Vector& g, double lambda) { return r_base - constraint_penalty(g, lambda); }

double abs_error(const Vector& x_next, const Vector& x_star) {
  same_size(x_next, x_star, "abs_error reward");
  return -(x_star - x_next).lpNorm<1>();
}

double squared_error(const Vector& x_next, const Vector& x_star) {
  same_size(x_next, x_star, "squared_error reward");
  return -(x_star - x_next).norm();
}

double sparse(const Vector& x_next, const Vector& x_star, double epsilon) {
  same_size(x_next, x_star, "sparse reward");
  return (x_star - x_next).norm() < epsilon ? 1.0 : 0.0;
}

}  // namespace rewards

}  // namespace pcbench
