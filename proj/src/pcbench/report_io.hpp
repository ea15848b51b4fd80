#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcbench/env.hpp"
#include "pcbench/eval.hpp"

namespace pcbench {

/// One row per transition: episode, t, measured variables after the step,
/// observation entries (obs_ prefix), applied actions, reward, g_i, violation.
void write_trajectories_csv(std::ostream& out, const EnvConfig& env, const std::vector<EpisodeRecord>& episodes);

/// episode, seed, return, per_step_return, violated, failed, error
void write_returns_csv(std::ostream& out, const EnvConfig& env, const std::vector<EpisodeRecord>& episodes);

/// episode, t, iterations, evaluations, gradient_norm, penalty_weight, escalations, converged, feasible, max_violation
void write_diagnostics_csv(std::ostream& out, const std::vector<EpisodeRecord>& episodes);

nlohmann::json report_json(const EvaluationReport& report);

/// Fixed-width table with median, MAD, std, gap and violation probability per policy.
std::string comparison_table(const std::vector<EvaluationReport>& reports);

}  // namespace pcbench
