#include "pcbench/pcbench.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "pcbench/config_io.hpp"
#include "pcbench/env.hpp"
#include "pcbench/error.hpp"
#include "pcbench/models.hpp"
#include "pcbench/report_io.hpp"
#include "pcbench/run.hpp"
#include "pcbench/serve.hpp"
#include "pcbench/wire.hpp"

struct pcb_scenario {
  pcbench::Scenario scenario;
};

struct pcb_env {
  pcbench::EnvConfig config;
  std::unique_ptr<pcbench::Environment> env;
  bool reconfigure = false;
};

struct pcb_run {
  pcbench::RunResult result;
};

namespace {

thread_local std::string last_error;

pcb_status status_of(pcbench::ErrorCode code) {
  using pcbench::ErrorCode;
  switch (code) {
    case ErrorCode::config: return PCB_ERR_CONFIG;
    case ErrorCode::argument: return PCB_ERR_ARGUMENT;
    case ErrorCode::out_of_range: return PCB_ERR_RANGE;
    case ErrorCode::episode_complete: return PCB_ERR_EPISODE_COMPLETE;
    case ErrorCode::integration: return PCB_ERR_INTEGRATION;
    case ErrorCode::undefined_output: return PCB_ERR_UNDEFINED_OUTPUT;
    case ErrorCode::protocol: return PCB_ERR_PROTOCOL;
    case ErrorCode::timeout: return PCB_ERR_TIMEOUT;
    case ErrorCode::hook: return PCB_ERR_HOOK;
    case ErrorCode::solver: return PCB_ERR_SOLVER;
    case ErrorCode::io: return PCB_ERR_IO;
    case ErrorCode::internal: return PCB_ERR_INTERNAL;
  }
  return PCB_ERR_INTERNAL;
}

template <class F>
pcb_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return PCB_OK;
  } catch (const pcbench::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return PCB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PCB_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return PCB_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) pcbench::fail(pcbench::ErrorCode::argument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json models_json() {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& name : pcbench::model_names()) {
    const auto m = pcbench::model_registry(name);
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, p] : m.params) params[k] = {{"value", p.value}, {"unit", p.unit}, {"description", p.description}};
    arr.push_back({{"name", m.name},
                   {"states", m.state_names},
                   {"inputs", m.input_names},
                   {"disturbances", m.disturbance_names},
                   {"outputs", m.output_names},
                   {"default_disturbances", m.default_disturbances},
                   {"time_unit", m.time_unit},
                   {"default_substeps", m.default_substeps},
                   {"parameters", params}});
  }
  return arr;
}

void copy_out(const pcbench::Vector& v, double* dst) {
  if (dst) std::memcpy(dst, v.data(), static_cast<std::size_t>(v.size()) * sizeof(double));
}

}  // namespace

extern "C" {

const char* pcb_version(void) { return PCBENCH_VERSION; }

const char* pcb_status_name(pcb_status status) {
  switch (status) {
    case PCB_OK: return "ok";
    case PCB_ERR_CONFIG: return "config";
    case PCB_ERR_ARGUMENT: return "argument";
    case PCB_ERR_RANGE: return "out_of_range";
    case PCB_ERR_EPISODE_COMPLETE: return "episode_complete";
    case PCB_ERR_INTEGRATION: return "integration";
    case PCB_ERR_UNDEFINED_OUTPUT: return "undefined_output";
    case PCB_ERR_PROTOCOL: return "protocol";
    case PCB_ERR_TIMEOUT: return "timeout";
    case PCB_ERR_HOOK: return "hook";
    case PCB_ERR_SOLVER: return "solver";
    case PCB_ERR_IO: return "io";
    case PCB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* pcb_last_error(void) { return last_error.c_str(); }

void pcb_string_free(char* s) { std::free(s); }

pcb_status pcb_models_json(char** out) {
  return guard([&] {
    require(out, "out");
    *out = dup_string(models_json().dump(2));
  });
}

pcb_status pcb_data_dir(char** out) {
  return guard([&] {
    require(out, "out");
    *out = dup_string(pcbench::data_dir());
  });
}

pcb_status pcb_list_json(const char* scenario_dir, char** out) {
  return guard([&] {
    require(out, "out");
    const std::string dir = scenario_dir ? scenario_dir : pcbench::data_dir() + "/scenarios";
    nlohmann::json j;
    j["models"] = models_json();
    nlohmann::json scenarios = nlohmann::json::array();
    for (const auto& path : pcbench::list_scenario_files(dir)) {
      try {
        auto s = pcbench::load_scenario(path);
        auto summary = pcbench::scenario_summary(s);
        summary["path"] = path;
        scenarios.push_back(summary);
      } catch (const pcbench::Error& e) {
        scenarios.push_back({{"path", path}, {"error", e.what()}});
      }
    }
    j["scenarios"] = scenarios;
    j["scenario_dir"] = dir;
    *out = dup_string(j.dump(2));
  });
}

pcb_status pcb_scenario_load(const char* path, pcb_scenario** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new pcb_scenario{pcbench::load_scenario(path)};
  });
}

pcb_status pcb_scenario_from_json(const char* json_text, pcb_scenario** out) {
  return guard([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = new pcb_scenario{pcbench::scenario_from_text(json_text)};
  });
}

pcb_status pcb_scenario_info_json(const pcb_scenario* scenario, char** out) {
  return guard([&] {
    require(scenario, "scenario");
    require(out, "out");
    auto j = pcbench::scenario_summary(scenario->scenario);
    j["path"] = scenario->scenario.path;
    *out = dup_string(j.dump(2));
  });
}

void pcb_scenario_free(pcb_scenario* scenario) { delete scenario; }

pcb_status pcb_env_create(const pcb_scenario* scenario, pcb_env** out) {
  return guard([&] {
    require(scenario, "scenario");
    require(out, "out");
    auto h = std::make_unique<pcb_env>();
    h->config = scenario->scenario.env;
    h->env = std::make_unique<pcbench::Environment>(h->config);
    *out = h.release();
  });
}

pcb_status pcb_env_dims_get(const pcb_env* env, pcb_env_dims* out) {
  return guard([&] {
    require(env, "env");
    require(out, "out");
    const auto& c = env->env->config();
    out->obs_dim = static_cast<size_t>(env->env->observation_size());
    out->act_dim = static_cast<size_t>(env->env->action_size());
    out->state_dim = static_cast<size_t>(c.model.n_x());
    out->measured_dim = static_cast<size_t>(c.model.n_measured());
    out->constraint_count = c.constraints.size();
    out->steps = c.steps;
  });
}

pcb_status pcb_env_reset(pcb_env* env, int64_t seed, double* obs) {
  return guard([&] {
    require(env, "env");
    require(obs, "obs");
    if (env->reconfigure) {
      env->env = std::make_unique<pcbench::Environment>(env->config);
      env->reconfigure = false;
    }
    const auto r = seed < 0 ? env->env->reset() : env->env->reset(static_cast<std::uint64_t>(seed));
    copy_out(r.observation, obs);
  });
}

pcb_status pcb_env_step(pcb_env* env, const double* action, double* obs, double* raw_state, double* constraint_g,
                        pcb_step_info* info) {
  return guard([&] {
    require(env, "env");
    require(action, "action");
    require(obs, "obs");
    const auto n_u = env->env->action_size();
    const pcbench::Vector u = Eigen::Map<const pcbench::Vector>(action, n_u);
    const auto r = env->env->step(u);
    copy_out(r.observation, obs);
    copy_out(r.info.raw_state, raw_state);
    copy_out(r.info.constraint_g, constraint_g);
    if (info) {
      info->reward = r.reward;
      info->step = env->env->step_index();
      info->truncated = r.truncated ? 1 : 0;
      info->terminated = r.terminated ? 1 : 0;
      info->any_violation = r.info.any_violation ? 1 : 0;
    }
  });
}

pcb_status pcb_env_set_custom_reward(pcb_env* env, pcb_reward_fn fn, void* user_data) {
  return guard([&] {
    require(env, "env");
    require(reinterpret_cast<const void*>(fn), "fn");
    env->config.reward.kind = pcbench::RewardKind::custom;
    env->config.reward.hook = [fn, user_data](const pcbench::RewardContext& c) {
      pcb_reward_context ctx{c.step,
                             c.raw_measured.data(),
                             c.normalized_measured.data(),
                             static_cast<size_t>(c.raw_measured.size()),
                             c.tracked.data(),
                             c.setpoint.data(),
                             static_cast<size_t>(c.tracked.size()),
                             c.action.data(),
                             c.previous_action.data(),
                             static_cast<size_t>(c.action.size()),
                             c.constraint_g.data(),
                             static_cast<size_t>(c.constraint_g.size())};
      return fn(&ctx, user_data);
    };
    env->config.finalize();
    env->reconfigure = true;
  });
}

void pcb_env_free(pcb_env* env) { delete env; }

pcb_status pcb_run_execute(const char* options_json, pcb_run** out) {
  return guard([&] {
    require(options_json, "options_json");
    require(out, "out");
    const auto j = nlohmann::json::parse(options_json, nullptr, false);
    if (j.is_discarded()) pcbench::fail(pcbench::ErrorCode::config, "run options are not valid JSON");
    *out = new pcb_run{pcbench::execute(pcbench::run_options_from_json(j))};
  });
}

pcb_status pcb_run_episode_status(const pcb_run* run) {
  if (!run) {
    last_error = "run is NULL";
    return PCB_ERR_ARGUMENT;
  }
  const auto code = pcbench::first_failure(run->result);
  if (!code) return PCB_OK;
  for (const auto& r : run->result.reports) {
    if (!r.failures.empty()) {
      last_error = r.label + ", episode " + std::to_string(r.failures.front().first) + ": " + r.failures.front().second;
      break;
    }
  }
  return status_of(*code);
}

pcb_status pcb_run_write(const pcb_run* run, const char* out_dir) {
  return guard([&] {
    require(run, "run");
    require(out_dir, "out_dir");
    pcbench::write_outputs(run->result, out_dir);
  });
}

pcb_status pcb_run_summary_json(const pcb_run* run, char** out) {
  return guard([&] {
    require(run, "run");
    require(out, "out");
    *out = dup_string(pcbench::summary_json(run->result).dump(2));
  });
}

pcb_status pcb_run_table(const pcb_run* run, char** out) {
  return guard([&] {
    require(run, "run");
    require(out, "out");
    *out = dup_string(pcbench::comparison_table(run->result.reports));
  });
}

int pcb_run_solver_warning(const pcb_run* run) {
  if (!run) return 0;
  for (const auto& r : run->result.reports) {
    if (r.solver && (r.solver->not_converged > 0 || r.solver->infeasible > 0)) return 1;
  }
  return 0;
}

void pcb_run_free(pcb_run* run) { delete run; }

pcb_status pcb_manifest_options(const char* manifest_path, char** options_json) {
  return guard([&] {
    require(manifest_path, "manifest_path");
    require(options_json, "options_json");
    std::ifstream in(manifest_path);
    if (!in) pcbench::fail(pcbench::ErrorCode::config, std::string("cannot open manifest '") + manifest_path + "'");
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("options") || !j["options"].is_object()) {
      pcbench::fail(pcbench::ErrorCode::config, std::string("'") + manifest_path + "' is not a run manifest");
    }
    *options_json = dup_string(j["options"].dump());
  });
}

pcb_status pcb_serve_fd(const pcb_scenario* scenario, int in_fd, int out_fd) {
  return guard([&] {
    require(scenario, "scenario");
    pcbench::FdChannel channel(in_fd, out_fd, false);
    pcbench::serve(scenario->scenario.env, channel);
  });
}

pcb_status pcb_serve_tcp(const pcb_scenario* scenario, uint16_t port, void (*on_listen)(uint16_t, void*),
                         void* user_data) {
  return guard([&] {
    require(scenario, "scenario");
    pcbench::TcpListener listener(port);
    if (on_listen) on_listen(listener.port(), user_data);
    auto channel = listener.accept(std::chrono::hours(24));
    pcbench::serve(scenario->scenario.env, *channel);
  });
}

}  // extern "C"
