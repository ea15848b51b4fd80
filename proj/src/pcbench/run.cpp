#include "pcbench/run.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "pcbench/error.hpp"
#include "pcbench/report_io.hpp"

#ifndef PCBENCH_VERSION
#define PCBENCH_VERSION "0.0.0"
#endif

namespace pcbench {

nlohmann::json to_json(const RunOptions& o) {
  nlohmann::json j;
  j["scenario"] = o.scenario;
  j["policies"] = o.policies;
  j["reference"] = o.reference;
  j["compare"] = o.compare;
  j["episodes"] = o.episodes;
  j["seed"] = o.seed;
  j["jobs"] = o.jobs;
  j["gamma"] = o.gamma ? nlohmann::json(*o.gamma) : nlohmann::json(nullptr);
  j["normalization"] = std::string(to_string(o.normalization));
  j["timeout_ms"] = o.timeout_ms;
  nlohmann::json oracle = nlohmann::json::object();
  if (o.oracle.horizon) oracle["N"] = *o.oracle.horizon;
  if (o.oracle.max_iterations) oracle["max_iterations"] = *o.oracle.max_iterations;
  if (o.oracle.tolerance) oracle["tolerance"] = *o.oracle.tolerance;
  if (o.oracle.multistart) oracle["multistart"] = *o.oracle.multistart;
  j["oracle"] = oracle;
  j["out"] = o.out_dir;
  return j;
}

RunOptions run_options_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::config, "run options must be a JSON object");
  RunOptions o;
  try {
    o.scenario = j.at("scenario").get<std::string>();
    if (j.contains("policies")) o.policies = j["policies"].get<std::vector<std::string>>();
    if (j.contains("policy")) o.policies.push_back(j["policy"].get<std::string>());
    o.reference = j.value("reference", std::string());
    o.compare = j.value("compare", false);
    o.episodes = j.value("episodes", std::size_t{1});
    o.seed = j.value("seed", std::uint64_t{0});
    o.jobs = j.value("jobs", std::size_t{1});
    if (j.contains("gamma") && !j["gamma"].is_null()) o.gamma = j["gamma"].get<double>();
    o.normalization = normalization_from_string(j.value("normalization", std::string("per_step")));
    o.timeout_ms = j.value("timeout_ms", 10000LL);
    if (j.contains("oracle") && j["oracle"].is_object()) {
      const auto& oj = j["oracle"];
      if (oj.contains("N")) o.oracle.horizon = oj["N"].get<std::size_t>();
      if (oj.contains("max_iterations")) o.oracle.max_iterations = oj["max_iterations"].get<int>();
      if (oj.contains("tolerance")) o.oracle.tolerance = oj["tolerance"].get<double>();
      if (oj.contains("multistart")) o.oracle.multistart = oj["multistart"].get<int>();
    }
    o.out_dir = j.value("out", std::string());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::config, std::string("invalid run options: ") + e.what());
  }
  return o;
}

OracleSettings apply_overrides(OracleSettings base, const OracleOverrides& o) {
  if (o.horizon) base.horizon = *o.horizon;
  if (o.max_iterations) base.solver.max_iterations = *o.max_iterations;
  if (o.tolerance) base.solver.tolerance = *o.tolerance;
  if (o.multistart) base.solver.multistart = *o.multistart;
  return base;
}

RunResult execute(const RunOptions& options) {
  RunResult result;
  result.options = options;
  if (options.policies.empty()) fail(ErrorCode::config, "no policy given");
  if (options.episodes == 0) fail(ErrorCode::config, "episode count must be at least 1");
  if (options.jobs == 0) fail(ErrorCode::config, "job count must be at least 1");
  if (options.timeout_ms <= 0) fail(ErrorCode::config, "timeout must be positive");
  result.scenario = load_scenario(options.scenario);
  const Scenario& sc = result.scenario;

  std::vector<std::string> specs = options.policies;
  std::string reference = options.reference;
  if (options.compare) {
    if (reference.empty()) {
      if (std::find(specs.begin(), specs.end(), "oracle") == specs.end()) {
        fail(ErrorCode::config, "compare needs the oracle among the policies or a named reference");
      }
      reference = "oracle";
    }
    if (std::find(specs.begin(), specs.end(), reference) == specs.end()) specs.insert(specs.begin(), reference);
    if (specs.size() < 2) fail(ErrorCode::config, "compare needs at least two policies");
  } else if (!reference.empty() && std::find(specs.begin(), specs.end(), reference) == specs.end()) {
    specs.insert(specs.begin(), reference);
  }

  PolicyOptions popts;
  popts.oracle = apply_overrides(sc.oracle, options.oracle);
  popts.oracle.solver.validate();
  popts.timeout = std::chrono::milliseconds(options.timeout_ms);
  for (const auto& spec : specs) validate_policy_spec(spec, sc.env);
  if (popts.oracle.horizon < 1) fail(ErrorCode::config, "oracle horizon must be at least 1");

  const double gamma = options.gamma.value_or(sc.gamma);
  RolloutOptions ro;
  ro.episodes = options.episodes;
  ro.master_seed = options.seed;
  ro.jobs = options.jobs;
  ro.gamma = gamma;
  ro.keep_trajectories = true;

  for (const auto& spec : specs) {
    PolicyFactory factory = [&spec, &sc, &popts] { return make_policy(spec, sc.env, popts); };
    auto eps = rollout(sc.env, factory, ro);
    result.reports.push_back(summarize(factory()->label(), sc.env, eps, gamma));
    result.episodes.push_back(std::move(eps));
    if (!reference.empty() && spec == reference) result.reference_index = result.reports.size() - 1;
  }
  if (result.reference_index) {
    const EvaluationReport ref = result.reports[*result.reference_index];
    for (auto& r : result.reports) {
      if (!r.returns.empty() && !ref.returns.empty()) attach_gap(r, ref, options.normalization);
    }
  }
  return result;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write '" + p.string() + "'");
  out << content;
  if (!out) fail(ErrorCode::io, "write failed for '" + p.string() + "'");
}

template <class F>
void write_stream(const std::filesystem::path& p, F&& f) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write '" + p.string() + "'");
  f(out);
  if (!out) fail(ErrorCode::io, "write failed for '" + p.string() + "'");
}

std::string sanitize(const std::string& label) {
  std::string s;
  for (char c : label) s.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c : '_');
  if (s.size() > 48) s.resize(48);
  return s;
}

void write_policy_dir(const std::filesystem::path& dir, const EnvConfig& env, const EvaluationReport& report,
                      const std::vector<EpisodeRecord>& episodes) {
  std::filesystem::create_directories(dir);
  write_stream(dir / "trajectories.csv", [&](std::ostream& o) { write_trajectories_csv(o, env, episodes); });
  write_stream(dir / "returns.csv", [&](std::ostream& o) { write_returns_csv(o, env, episodes); });
  write_file(dir / "report.json", report_json(report).dump(2) + "\n");
  if (report.solver) {
    write_stream(dir / "solver_diagnostics.csv", [&](std::ostream& o) { write_diagnostics_csv(o, episodes); });
  }
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void write_outputs(const RunResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path root(out_dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) fail(ErrorCode::io, "cannot create output directory '" + out_dir + "': " + ec.message());
  const EnvConfig& env = result.scenario.env;
  if (result.reports.size() == 1) {
    write_policy_dir(root, env, result.reports[0], result.episodes[0]);
  } else {
    for (std::size_t i = 0; i < result.reports.size(); ++i) {
      write_policy_dir(root / (std::to_string(i) + "_" + sanitize(result.reports[i].label)), env, result.reports[i],
                       result.episodes[i]);
    }
    write_file(root / "comparison.txt", comparison_table(result.reports));
  }
  write_file(root / "summary.json", summary_json(result).dump(2) + "\n");
  nlohmann::json manifest;
  RunOptions opts = result.options;
  opts.out_dir = out_dir;
  manifest["options"] = to_json(opts);
  manifest["scenario"] = result.scenario.path;
  manifest["engine"] = "pcbench";
  manifest["version"] = PCBENCH_VERSION;
  manifest["timestamp"] = timestamp();
  write_file(root / "manifest.json", manifest.dump(2) + "\n");
}

nlohmann::json summary_json(const RunResult& result) {
  nlohmann::json j;
  j["scenario"] = result.scenario.env.name;
  j["reference"] = result.reference_index ? nlohmann::json(result.reports[*result.reference_index].label)
                                          : nlohmann::json(nullptr);
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& r : result.reports) reports.push_back(report_json(r));
  j["reports"] = reports;
  return j;
}

std::optional<ErrorCode> first_failure(const RunResult& result) {
  for (const auto& r : result.reports) {
    if (r.first_failure) return r.first_failure;
  }
  return std::nullopt;
}

}  // namespace pcbench
