#include "pcbench/eval.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "pcbench/rng.hpp"

namespace pcbench {

EpisodeRecord run_episode(Environment& env, Policy& policy, std::size_t index, std::uint64_t seed, double gamma,
                          bool keep_trajectory) {
  EpisodeRecord rec;
  rec.index = index;
  rec.seed = seed;
  const auto& cfg = env.config();
  try {
    const ResetResult start = env.reset(seed);
    rec.initial_measured = start.info.raw_measured;
    rec.initial_observation = start.observation;
    policy.reset(seed, start.observation, start.info.raw_state);
    Vector obs = start.observation;
    Vector raw = start.info.raw_state;
    double last_reward = 0.0;
    double discount = 1.0;
    if (keep_trajectory) rec.steps.reserve(cfg.steps);
    for (std::size_t t = 0; t < cfg.steps; ++t) {
      const Vector u = policy.act(PolicyInput{t, obs, raw, last_reward});
      StepResult r = env.step(u);
      rec.episode_return += discount * r.reward;
      discount *= gamma;
      rec.violated = rec.violated || r.info.any_violation;
      if (keep_trajectory) {
        rec.steps.push_back(StepRecord{t, r.info.raw_measured, r.observation, r.info.action_applied, r.reward,
                                       r.info.constraint_g, r.info.any_violation});
      }
      obs = std::move(r.observation);
      raw = std::move(r.info.raw_state);
      last_reward = r.reward;
    }
    policy.end_episode(PolicyInput{cfg.steps, obs, raw, last_reward}, rec.episode_return);
  } catch (const Error& e) {
    rec.failed = true;
    rec.error = e.code();
    rec.error_message = e.what();
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = ErrorCode::internal;
    rec.error_message = e.what();
  }
  if (const auto* d = policy.diagnostics()) rec.diagnostics = *d;
  return rec;
}

std::vector<EpisodeRecord> rollout(const EnvConfig& env, const PolicyFactory& factory, const RolloutOptions& options) {
  if (options.episodes == 0) fail(ErrorCode::argument, "episode count must be at least 1");
  if (!(options.gamma > 0.0 && options.gamma <= 1.0)) fail(ErrorCode::argument, "gamma must lie in (0, 1]");
  EnvConfig cfg = env;
  cfg.finalize();
  std::vector<EpisodeRecord> records(options.episodes);
  std::atomic<std::size_t> next{0};
  std::exception_ptr setup_error;
  std::mutex setup_mutex;

  auto worker = [&] {
    std::unique_ptr<Policy> policy;
    try {
      policy = factory();
    } catch (...) {
      std::lock_guard lock(setup_mutex);
      if (!setup_error) setup_error = std::current_exception();
      return;
    }
    Environment e(cfg);
    for (std::size_t i = next++; i < options.episodes; i = next++) {
      records[i] = run_episode(e, *policy, i, derive_seed(options.master_seed, i), options.gamma,
                               options.keep_trajectories);
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, options.episodes));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (setup_error) std::rethrow_exception(setup_error);
  return records;
}

EvaluationReport summarize(const std::string& label, const EnvConfig& env, const std::vector<EpisodeRecord>& episodes,
                           double gamma) {
  EvaluationReport r;
  r.label = label;
  r.scenario = env.name;
  r.steps = env.steps;
  r.gamma = gamma;
  SolverSummary solver;
  bool any_diag = false;
  for (const auto& ep : episodes) {
    for (const auto& d : ep.diagnostics) {
      any_diag = true;
      solver.solves++;
      if (!d.converged) solver.not_converged++;
      if (!d.feasible) solver.infeasible++;
      solver.max_iterations = std::max(solver.max_iterations, d.iterations);
      solver.max_escalations = std::max(solver.max_escalations, d.escalations);
      solver.max_gradient_norm = std::max(solver.max_gradient_norm, d.gradient_norm);
      solver.max_violation = std::max(solver.max_violation, d.max_violation);
    }
    if (ep.failed) {
      r.failed++;
      r.failures.emplace_back(ep.index, ep.error_message);
      if (!r.first_failure) r.first_failure = ep.error;
      continue;
    }
    r.returns.push_back(ep.episode_return);
    r.per_step_returns.push_back(ep.episode_return / static_cast<double>(env.steps));
    r.episode_indices.push_back(ep.index);
    r.violation_flags.push_back(ep.violated);
  }
  if (any_diag) r.solver = solver;
  if (!r.returns.empty()) {
    r.median = median(r.returns);
    r.mad = mad(r.returns);
    r.std_dev = sample_std(r.returns);
    r.violation_probability = violation_probability(r.violation_flags);
    r.histogram = histogram(r.returns, std::min<std::size_t>(20, std::max<std::size_t>(1, r.returns.size())));
  }
  return r;
}

void attach_gap(EvaluationReport& report, const EvaluationReport& reference, Normalization normalization) {
  if (report.returns.empty() || reference.returns.empty()) {
    fail(ErrorCode::argument, "optimality gap needs successful episodes of both '" + reference.label + "' and '" +
                                  report.label + "'");
  }
  report.gap = GapEntry{reference.label, normalization,
                        optimality_gap(reference.returns, report.returns, normalization,
                                       static_cast<double>(report.steps))};
}

}  // namespace pcbench
