#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pcbench/env.hpp"
#include "pcbench/error.hpp"
#include "pcbench/metrics.hpp"
#include "pcbench/oracle.hpp"
#include "pcbench/policy.hpp"

namespace pcbench {

/// One transition t -> t+1 as recorded in trajectory dumps.
struct StepRecord {
  std::size_t t = 0;
  Vector measured;     // raw measured vector after the step
  Vector observation;  // noisy observation after the step
  Vector action;       // applied (post-clip)
  double reward = 0.0;
  Vector constraint_g;
  bool violation = false;
};

struct EpisodeRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double episode_return = 0.0;
  bool violated = false;
  bool failed = false;
  ErrorCode error = ErrorCode::internal;
  std::string error_message;
  Vector initial_measured;
  Vector initial_observation;
  std::vector<StepRecord> steps;  // empty unless trajectories are kept
  std::vector<SolveDiagnostics> diagnostics;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

struct RolloutOptions {
  std::size_t episodes = 1;
  std::uint64_t master_seed = 0;
  std::size_t jobs = 1;
  double gamma = 1.0;
  bool keep_trajectories = true;
};

/// Episode i resets environment and policy with derive_seed(master_seed, i).
/// Each worker thread owns one environment and one policy; results are ordered
/// by episode index, so any job count gives the same records.
std::vector<EpisodeRecord> rollout(const EnvConfig& env, const PolicyFactory& factory, const RolloutOptions& options);

/// Runs one episode with an existing environment and policy.
EpisodeRecord run_episode(Environment& env, Policy& policy, std::size_t index, std::uint64_t seed, double gamma,
                          bool keep_trajectory);

struct SolverSummary {
  std::size_t solves = 0;
  std::size_t not_converged = 0;
  std::size_t infeasible = 0;
  int max_iterations = 0;
  int max_escalations = 0;
  double max_gradient_norm = 0.0;
  double max_violation = 0.0;
};

struct GapEntry {
  std::string reference;
  Normalization normalization = Normalization::per_step;
  double value = 0.0;
};

struct EvaluationReport {
  std::string label;
  std::string scenario;
  std::size_t steps = 0;
  double gamma = 1.0;
  std::vector<double> returns;           // successful episodes, index order
  std::vector<double> per_step_returns;  // returns / T
  std::vector<std::size_t> episode_indices;
  std::vector<bool> violation_flags;
  std::size_t failed = 0;
  std::vector<std::pair<std::size_t, std::string>> failures;
  std::optional<ErrorCode> first_failure;
  double median = 0.0;
  double mad = 0.0;
  std::optional<double> std_dev;
  double violation_probability = 0.0;
  std::optional<GapEntry> gap;
  std::optional<SolverSummary> solver;
  Histogram histogram;
};

/// Summarizes episode records. Needs at least one successful episode for the metrics;
/// with none they stay zero and `failed` equals the episode count.
EvaluationReport summarize(const std::string& label, const EnvConfig& env, const std::vector<EpisodeRecord>& episodes,
                           double gamma);

/// Sets report.gap relative to `reference`.
void attach_gap(EvaluationReport& report, const EvaluationReport& reference, Normalization normalization);

}  // namespace pcbench
