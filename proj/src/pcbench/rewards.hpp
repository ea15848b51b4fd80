#pragma once

#include <cstddef>
#include <functional>
#include <string_view>

#include "pcbench/types.hpp"

namespace pcbench {

/// Everything a reward may look at for the transition t -> t+1.
struct RewardContext {
  std::size_t step = 0;          // t
  Vector raw_measured;           // raw next state followed by model outputs
  Vector normalized_measured;    // same, mapped through the observation bounds
  Vector tracked;                // normalized values of the setpoint variables (schedule order)
  Vector setpoint;               // normalized targets of step t, same order as `tracked`
  Vector action;                 // normalized applied action u_t
  Vector previous_action;        // normalized u_{t-1}
  Vector constraint_g;           // raw-unit constraint values, g > 0 violated
};

using RewardHook = std::function<double(const RewardContext&)>;

enum class RewardKind { tracking_quadratic, constraint_shaped, abs_error, squared_error, sparse, custom };

std::string_view to_string(RewardKind kind);
RewardKind reward_kind_from_string(std::string_view name);

struct RewardSelector {
  RewardKind kind = RewardKind::tracking_quadratic;
  Matrix Q;              // over the setpoint entries; empty means identity
  Matrix R;              // n_u x n_u; empty means zero
  double lambda = 1.0;   // constraint penalty coefficient
  double epsilon = 0.003;
  RewardHook hook;       // required when kind == custom

  /// Fills defaults for empty Q/R and checks symmetry, PSD and parameter ranges.
  void resolve(Eigen::Index n_tracked, Eigen::Index n_u);

  /// Dispatches on kind. Custom hooks must return a finite value (ErrorCode::hook otherwise).
  double evaluate(const RewardContext& ctx) const;
};

namespace rewards {

/// -[(x - x*)^T Q (x - x*) + (u - u_prev)^T R (u - u_prev)]
double tracking(const Vector& x_next, const Vector& x_star, const Vector& u, const Vector& u_prev, const Matrix& Q,
                const Matrix& R);

/// r_base - lambda * sum_i max(0, g_i)
double shaped(double r_base, const Vector& g, double lambda);

/// lambda * sum_i max(0, g_i)
double constraint_penalty(const Vector& g, double lambda);

double abs_error(const Vector& x_next, const Vector& x_star);
double squared_error(const Vector& x_next, const Vector& x_star);

/// 1 when ||x* - x|| < epsilon (strict), else 0.
double sparse(const Vector& x_next, const Vector& x_star, double epsilon);

}  // namespace rewards

}  // namespace pcbench
