// Command-line front end over the C API.
//
// Exit codes: 0 success (solver warnings included), 1 runtime failure,
// 2 configuration error, 3 protocol or timeout error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcbench/pcbench.h"

namespace {

int exit_code(pcb_status s) {
  switch (s) {
    case PCB_OK: return 0;
    case PCB_ERR_CONFIG:
    case PCB_ERR_ARGUMENT: return 2;
    case PCB_ERR_PROTOCOL:
    case PCB_ERR_TIMEOUT: return 3;
    default: return 1;
  }
}

int report_failure(pcb_status s) {
  std::fprintf(stderr, "pcbench: %s error: %s\n", pcb_status_name(s), pcb_last_error());
  return exit_code(s);
}

std::string take(char* s) {
  std::string out = s ? s : "";
  pcb_string_free(s);
  return out;
}

struct RunArgs {
  std::string scenario;
  std::vector<std::string> policies;
  std::string reference;
  std::size_t episodes = 1;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  double gamma = 0.0;
  std::string normalization = "per_step";
  double timeout = 10.0;
  std::size_t horizon = 0;
  int max_iter = 0;
  double tol = 0.0;
  int multistart = 0;
  std::string out;
  std::string manifest;
  bool quiet = false;
};

void add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--scenario", a.scenario, "Scenario file (JSON)");
  cmd->add_option("--episodes,-n", a.episodes, "Number of episodes")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a.seed, "Master seed");
  cmd->add_option("--jobs,-j", a.jobs, "Parallel rollout workers")->check(CLI::PositiveNumber);
  cmd->add_option("--gamma", a.gamma, "Discount factor in (0, 1]; scenario value by default");
  cmd->add_option("--normalization", a.normalization, "Gap normalization")
      ->check(CLI::IsMember({"none", "per_step", "minmax"}));
  cmd->add_option("--timeout", a.timeout, "External policy timeout in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--oracle-horizon", a.horizon, "Override the oracle horizon N");
  cmd->add_option("--oracle-max-iter", a.max_iter, "Override the solver iteration limit");
  cmd->add_option("--oracle-tol", a.tol, "Override the solver tolerance");
  cmd->add_option("--oracle-multistart", a.multistart, "Override the solver multistart count");
  cmd->add_option("--out,-o", a.out, "Output directory (default $PCBENCH_OUT_DIR, else pcbench_out)");
  cmd->add_option("--manifest", a.manifest, "Re-run the options stored in a manifest.json");
  cmd->add_flag("--quiet,-q", a.quiet, "Print nothing on success");
}

nlohmann::json options_json(const RunArgs& a, bool compare) {
  nlohmann::json j;
  j["scenario"] = a.scenario;
  j["policies"] = a.policies;
  j["reference"] = a.reference;
  j["compare"] = compare;
  j["episodes"] = a.episodes;
  j["seed"] = a.seed;
  j["jobs"] = a.jobs;
  if (a.gamma > 0.0) j["gamma"] = a.gamma;
  j["normalization"] = a.normalization;
  j["timeout_ms"] = static_cast<long long>(a.timeout * 1000.0);
  nlohmann::json o = nlohmann::json::object();
  if (a.horizon > 0) o["N"] = a.horizon;
  if (a.max_iter > 0) o["max_iterations"] = a.max_iter;
  if (a.tol > 0.0) o["tolerance"] = a.tol;
  if (a.multistart > 0) o["multistart"] = a.multistart;
  j["oracle"] = o;
  return j;
}

int run_command(const RunArgs& a, bool compare, CLI::App* cmd) {
  nlohmann::json opts;
  if (!a.manifest.empty()) {
    char* text = nullptr;
    if (const pcb_status s = pcb_manifest_options(a.manifest.c_str(), &text); s != PCB_OK) return report_failure(s);
    opts = nlohmann::json::parse(take(text));
  } else {
    if (a.scenario.empty()) {
      std::fprintf(stderr, "pcbench: config error: --scenario is required\n");
      return 2;
    }
    opts = options_json(a, compare);
  }
  // An explicit --out beats the manifest; otherwise environment, then default.
  std::string out = a.out;
  if (out.empty() && !cmd->count("--out") && opts.contains("out") && opts["out"].is_string()) {
    out = opts["out"].get<std::string>();
  }
  if (out.empty()) {
    const char* env_out = std::getenv("PCBENCH_OUT_DIR");
    out = env_out && *env_out ? env_out : "pcbench_out";
  }
  opts["out"] = out;

  pcb_run* run = nullptr;
  if (const pcb_status s = pcb_run_execute(opts.dump().c_str(), &run); s != PCB_OK) return report_failure(s);
  std::unique_ptr<pcb_run, decltype(&pcb_run_free)> guard(run, pcb_run_free);
  if (const pcb_status s = pcb_run_write(run, out.c_str()); s != PCB_OK) return report_failure(s);
  if (!a.quiet) {
    char* table = nullptr;
    if (pcb_run_table(run, &table) == PCB_OK) std::cout << take(table);
    std::cout << "outputs written to " << out << "\n";
  }
  if (pcb_run_solver_warning(run)) {
    std::fprintf(stderr, "pcbench: warning: some oracle solves did not converge or stayed infeasible; "
                         "see solver_diagnostics.csv\n");
  }
  if (const pcb_status s = pcb_run_episode_status(run); s != PCB_OK) return report_failure(s);
  return 0;
}

int list_command(const std::string& dir, bool json_out) {
  char* text = nullptr;
  if (const pcb_status s = pcb_list_json(dir.empty() ? nullptr : dir.c_str(), &text); s != PCB_OK) {
    return report_failure(s);
  }
  const std::string raw = take(text);
  if (json_out) {
    std::cout << raw << "\n";
    return 0;
  }
  const auto j = nlohmann::json::parse(raw);
  std::cout << "models:\n";
  for (const auto& m : j["models"]) {
    std::printf("  %-24s states=%zu inputs=%zu disturbances=%zu time=%s\n", m["name"].get<std::string>().c_str(),
                m["states"].size(), m["inputs"].size(), m["disturbances"].size(),
                m["time_unit"].get<std::string>().c_str());
  }
  std::cout << "scenarios (" << j["scenario_dir"].get<std::string>() << "):\n";
  if (j["scenarios"].empty()) std::cout << "  (none)\n";
  for (const auto& s : j["scenarios"]) {
    if (s.contains("error")) {
      std::printf("  %s: invalid: %s\n", s["path"].get<std::string>().c_str(), s["error"].get<std::string>().c_str());
      continue;
    }
    std::string cons;
    for (const auto& c : s["constraints"]) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%s%s %s %g", cons.empty() ? "" : ", ", c["var"].get<std::string>().c_str(),
                    c["sense"].get<std::string>().c_str(), c["bound"].get<double>());
      cons += buf;
    }
    std::printf("  %-24s model=%s T=%zu tsim=%g %s N=%zu%s%s\n", s["name"].get<std::string>().c_str(),
                s["model"].get<std::string>().c_str(), s["T"].get<std::size_t>(), s["tsim"].get<double>(),
                s["time_unit"].get<std::string>().c_str(), s["oracle_horizon"].get<std::size_t>(),
                cons.empty() ? "" : " constraints: ", cons.c_str());
  }
  return 0;
}

void print_port(uint16_t port, void*) {
  std::fprintf(stderr, "listening on 127.0.0.1:%u\n", static_cast<unsigned>(port));
  std::fflush(stderr);
}

int serve_command(const std::string& scenario, int port) {
  pcb_scenario* sc = nullptr;
  if (const pcb_status s = pcb_scenario_load(scenario.c_str(), &sc); s != PCB_OK) return report_failure(s);
  std::unique_ptr<pcb_scenario, decltype(&pcb_scenario_free)> guard(sc, pcb_scenario_free);
  const pcb_status s = port < 0 ? pcb_serve_fd(sc, 0, 1) : pcb_serve_tcp(sc, static_cast<uint16_t>(port), print_port, nullptr);
  return s == PCB_OK ? 0 : report_failure(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pcbench: process-control benchmark environments, NMPC oracle and policy evaluation"};
  app.set_version_flag("--version", pcb_version());
  app.require_subcommand(1);

  std::string list_dir;
  bool list_json = false;
  auto* list = app.add_subcommand("list", "List models and bundled scenarios");
  list->add_option("--scenario-dir", list_dir, "Scenario directory to list instead of the bundled one");
  list->add_flag("--json", list_json, "Print JSON");

  RunArgs rollout_args;
  std::string policy;
  auto* rollout = app.add_subcommand("rollout", "Roll out one policy and write trajectories, returns and a report");
  add_run_options(rollout, rollout_args);
  rollout->add_option("--policy,-p", policy, "oracle | random | constant:<v1,v2,...> | external:<cmd|tcp://host:port>");
  rollout->add_option("--reference", rollout_args.reference, "Policy spec to compute the optimality gap against");

  RunArgs compare_args;
  auto* compare = app.add_subcommand("compare", "Evaluate several policies side by side with optimality gaps");
  add_run_options(compare, compare_args);
  compare->add_option("--policies", compare_args.policies, "Policy specs")->expected(1, -1);
  compare->add_option("--reference", compare_args.reference, "Reference policy (default: oracle)");

  std::string serve_scenario;
  int listen_port = -1;
  auto* serve = app.add_subcommand("serve", "Serve an environment to an external trainer over the line protocol");
  serve->add_option("--scenario", serve_scenario, "Scenario file")->required();
  serve->add_option("--listen", listen_port, "TCP port on 127.0.0.1 (0 = any); stdin/stdout otherwise")
      ->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*list) return list_command(list_dir, list_json);
  if (*rollout) {
    if (rollout_args.manifest.empty() && policy.empty()) {
      std::fprintf(stderr, "pcbench: config error: --policy is required\n");
      return 2;
    }
    if (!policy.empty()) rollout_args.policies = {policy};
    return run_command(rollout_args, false, rollout);
  }
  if (*compare) return run_command(compare_args, true, compare);
  if (*serve) return serve_command(serve_scenario, listen_port);
  return 2;
}
