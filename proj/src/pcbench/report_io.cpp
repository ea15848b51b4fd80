#include "pcbench/report_io.hpp"

#include <cstdio>

namespace pcbench {

namespace {

void put(std::ostream& out, double v) { out << format_double(v); }

void put_vector(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out << ',';
    put(out, v[i]);
  }
}

}  // namespace

void write_trajectories_csv(std::ostream& out, const EnvConfig& env, const std::vector<EpisodeRecord>& episodes) {
  out << "episode,t";
  for (const auto& n : env.model.measured_names()) out << ',' << n;
  for (const auto& n : env.observation_names()) out << ",obs_" << n;
  for (const auto& n : env.model.input_names) out << ',' << n;
  out << ",reward";
  for (std::size_t i = 0; i < env.constraints.size(); ++i) out << ",g" << i;
  out << ",violation\n";
  for (const auto& ep : episodes) {
    for (const auto& s : ep.steps) {
      out << ep.index << ',' << s.t;
      put_vector(out, s.measured);
      put_vector(out, s.observation);
      put_vector(out, s.action);
      out << ',';
      put(out, s.reward);
      put_vector(out, s.constraint_g);
      out << ',' << (s.violation ? 1 : 0) << '\n';
    }
  }
}

void write_returns_csv(std::ostream& out, const EnvConfig& env, const std::vector<EpisodeRecord>& episodes) {
  out << "episode,seed,return,per_step_return,violated,failed,error\n";
  for (const auto& ep : episodes) {
    out << ep.index << ',' << ep.seed << ',';
    if (ep.failed) {
      out << ",,," << 1 << ',' << to_string(ep.error) << '\n';
      continue;
    }
    put(out, ep.episode_return);
    out << ',';
    put(out, ep.episode_return / static_cast<double>(env.steps));
    out << ',' << (ep.violated ? 1 : 0) << ",0,\n";
  }
}

void write_diagnostics_csv(std::ostream& out, const std::vector<EpisodeRecord>& episodes) {
  out << "episode,t,iterations,evaluations,gradient_norm,penalty_weight,escalations,converged,feasible,max_violation\n";
  for (const auto& ep : episodes) {
    for (std::size_t t = 0; t < ep.diagnostics.size(); ++t) {
      const auto& d = ep.diagnostics[t];
      out << ep.index << ',' << t << ',' << d.iterations << ',' << d.evaluations << ',';
      put(out, d.gradient_norm);
      out << ',';
      put(out, d.penalty_weight);
      out << ',' << d.escalations << ',' << (d.converged ? 1 : 0) << ',' << (d.feasible ? 1 : 0) << ',';
      put(out, d.max_violation);
      out << '\n';
    }
  }
}

nlohmann::json report_json(const EvaluationReport& r) {
  nlohmann::json j;
  j["label"] = r.label;
  j["scenario"] = r.scenario;
  j["steps"] = r.steps;
  j["gamma"] = r.gamma;
  j["episodes"] = r.returns.size() + r.failed;
  j["episode_indices"] = r.episode_indices;
  j["returns"] = r.returns;
  j["per_step_returns"] = r.per_step_returns;
  if (r.returns.empty()) {
    j["median"] = nullptr;
    j["mad"] = nullptr;
    j["violation_probability"] = nullptr;
  } else {
    j["median"] = r.median;
    j["median_per_step"] = r.median / static_cast<double>(r.steps);
    j["mad"] = r.mad;
    j["violation_probability"] = r.violation_probability;
  }
  j["std"] = r.std_dev ? nlohmann::json(*r.std_dev) : nlohmann::json(nullptr);
  j["violation_flags"] = r.violation_flags;
  if (r.gap) {
    j["optimality_gap"] = {{"reference", r.gap->reference},
                           {"normalization", std::string(to_string(r.gap->normalization))},
                           {"value", r.gap->value}};
  } else {
    j["optimality_gap"] = nullptr;
  }
  j["failed"] = r.failed;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& [idx, msg] : r.failures) failures.push_back({{"episode", idx}, {"error", msg}});
  j["failures"] = failures;
  j["histogram"] = {{"edges", r.histogram.edges}, {"counts", r.histogram.counts}};
  if (r.solver) {
    const auto& s = *r.solver;
    j["solver"] = {{"solves", s.solves},
                   {"not_converged", s.not_converged},
                   {"infeasible", s.infeasible},
                   {"max_iterations", s.max_iterations},
                   {"max_escalations", s.max_escalations},
                   {"max_gradient_norm", s.max_gradient_norm},
                   {"max_violation", s.max_violation}};
    j["solver_not_converged"] = s.not_converged > 0;
  }
  return j;
}

std::string comparison_table(const std::vector<EvaluationReport>& reports) {
  std::string out;
  char line[512];
  std::snprintf(line, sizeof line, "%-28s %8s %16s %14s %14s %16s %10s %7s\n", "policy", "episodes", "median", "MAD",
                "std", "gap", "P(viol)", "failed");
  out += line;
  for (const auto& r : reports) {
    char stdbuf[32] = "-", gapbuf[48] = "-", medbuf[32] = "-", madbuf[32] = "-", pbuf[32] = "-";
    if (!r.returns.empty()) {
      std::snprintf(medbuf, sizeof medbuf, "%.6g", r.median);
      std::snprintf(madbuf, sizeof madbuf, "%.6g", r.mad);
      std::snprintf(pbuf, sizeof pbuf, "%.4f", r.violation_probability);
    }
    if (r.std_dev) std::snprintf(stdbuf, sizeof stdbuf, "%.6g", *r.std_dev);
    if (r.gap) std::snprintf(gapbuf, sizeof gapbuf, "%.6g", r.gap->value);
    std::string label = r.label.size() > 28 ? r.label.substr(0, 25) + "..." : r.label;
    std::snprintf(line, sizeof line, "%-28s %8zu %16s %14s %14s %16s %10s %7zu\n", label.c_str(),
                  r.returns.size() + r.failed, medbuf, madbuf, stdbuf, gapbuf, pbuf, r.failed);
    out += line;
  }
  if (!reports.empty() && reports.front().gap) {
    out += "gap: median(reference) - median(policy), reference '" + reports.front().gap->reference +
           "', normalization " + std::string(to_string(reports.front().gap->normalization)) + "\n";
  }
  return out;
}

}  // namespace pcbench
