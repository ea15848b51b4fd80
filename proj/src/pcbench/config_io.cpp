#include "pcbench/config_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pcbench/error.hpp"

#ifndef PCBENCH_DATA_DIR
#define PCBENCH_DATA_DIR "data"
#endif

namespace pcbench {

namespace {

using Json = ScenarioJson;

[[noreturn]] void bad(const std::string& field, const std::string& msg) { config_error(field, msg); }

double number(const Json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number, got " + j.dump());
  return j.get<double>();
}

std::size_t count(const Json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) bad(field, "expected a non-negative integer, got " + j.dump());
  return j.get<std::size_t>();
}

std::vector<double> numbers(const Json& j, const std::string& field) {
  if (!j.is_array()) bad(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Vector vec(const Json& j, const std::string& field) {
  auto v = numbers(j, field);
  return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Box box(const Json& j, const std::string& field) {
  if (j.is_object()) {
    if (!j.contains("low") || !j.contains("high")) bad(field, "needs 'low' and 'high'");
    return Box{vec(j["low"], field + ".low"), vec(j["high"], field + ".high")};
  }
  if (j.is_array() && j.size() == 2 && j[0].is_array()) return Box{vec(j[0], field + "[0]"), vec(j[1], field + "[1]")};
  bad(field, "expected {\"low\": [...], \"high\": [...]} or [[low...], [high...]]");
}

/// Plain array, or {"segments": [[value, count], ...]}.
std::vector<double> schedule(const Json& j, const std::string& field) {
  if (j.is_array()) return numbers(j, field);
  if (j.is_object() && j.contains("segments")) {
    std::vector<double> out;
    const auto& segs = j["segments"];
    if (!segs.is_array()) bad(field + ".segments", "expected an array of [value, count] pairs");
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const std::string f = field + ".segments[" + std::to_string(i) + "]";
      if (!segs[i].is_array() || segs[i].size() != 2) bad(f, "expected [value, count]");
      const double v = number(segs[i][0], f);
      out.insert(out.end(), count(segs[i][1], f), v);
    }
    return out;
  }
  bad(field, "expected an array or {\"segments\": [[value, count], ...]}");
}

/// 1-D array = diagonal, 2-D array = full matrix.
Matrix matrix(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) bad(field, "expected a nonempty array");
  if (!j[0].is_array()) {
    const Vector d = vec(j, field);
    return d.asDiagonal();
  }
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Vector row = vec(j[static_cast<std::size_t>(r)], field + "[" + std::to_string(r) + "]");
    if (row.size() != n) bad(field, "matrix must be square");
    m.row(r) = row.transpose();
  }
  return m;
}

void check_keys(const Json& j, const std::string& field, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(field.empty() ? "scenario" : field, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) {
      bad(field.empty() ? it.key() : field + "." + it.key(), "unknown key");
    }
  }
}

std::string text(const Json& j, const std::string& field) {
  if (!j.is_string()) bad(field, "expected a string");
  return j.get<std::string>();
}

SolverSettings solver_settings(const Json& j, SolverSettings s) {
  if (j.contains("max_iterations")) s.max_iterations = static_cast<int>(count(j["max_iterations"], "oracle.max_iterations"));
  if (j.contains("tolerance")) s.tolerance = number(j["tolerance"], "oracle.tolerance");
  if (j.contains("fd_step")) s.fd_step = number(j["fd_step"], "oracle.fd_step");
  if (j.contains("penalty_weight")) s.penalty_weight = number(j["penalty_weight"], "oracle.penalty_weight");
  if (j.contains("penalty_growth")) s.penalty_growth = number(j["penalty_growth"], "oracle.penalty_growth");
  if (j.contains("max_escalations")) s.max_escalations = static_cast<int>(count(j["max_escalations"], "oracle.max_escalations"));
  if (j.contains("multistart")) s.multistart = static_cast<int>(count(j["multistart"], "oracle.multistart"));
  if (j.contains("constraint_margin")) s.constraint_margin = number(j["constraint_margin"], "oracle.constraint_margin");
  return s;
}

}  // namespace

Scenario scenario_from_json(const Json& doc, const std::string& origin) {
  check_keys(doc, "",
             {"name", "description", "version", "model", "model_params", "T", "tsim", "setpoints", "a_space", "o_space",
              "x0", "noise_percentage", "disturbances", "constraints", "reward", "integrator", "oracle", "gamma"});
  Scenario s;
  s.path = origin;
  EnvConfig& env = s.env;
  for (const char* required : {"model", "T", "tsim", "a_space", "o_space", "x0"}) {
    if (!doc.contains(required)) bad(required, "missing");
  }
  env.name = doc.contains("name") ? text(doc["name"], "name")
                                  : std::filesystem::path(origin).stem().string();
  if (doc.contains("description")) s.description = text(doc["description"], "description");
  if (doc.contains("version") && count(doc["version"], "version") != 1) bad("version", "only version 1 is supported");

  std::map<std::string, double> overrides;
  if (doc.contains("model_params")) {
    const auto& mp = doc["model_params"];
    if (!mp.is_object()) bad("model_params", "expected an object");
    for (auto it = mp.begin(); it != mp.end(); ++it) overrides[it.key()] = number(it.value(), "model_params." + it.key());
  }
  env.model = model_registry(text(doc["model"], "model"), overrides);

  env.steps = count(doc["T"], "T");
  env.tsim = number(doc["tsim"], "tsim");
  env.a_space = box(doc["a_space"], "a_space");
  env.o_space = box(doc["o_space"], "o_space");
  env.x0 = vec(doc["x0"], "x0");
  if (doc.contains("noise_percentage")) env.noise_percentage = number(doc["noise_percentage"], "noise_percentage");

  if (doc.contains("setpoints")) {
    const auto& sp = doc["setpoints"];
    if (!sp.is_object()) bad("setpoints", "expected an object mapping variable names to schedules");
    Names names;
    std::vector<std::vector<double>> values;
    for (auto it = sp.begin(); it != sp.end(); ++it) {
      names.push_back(it.key());
      values.push_back(schedule(it.value(), "setpoints." + it.key()));
    }
    env.setpoints = SetpointSchedule(std::move(names), std::move(values));
  }

  if (doc.contains("disturbances")) {
    const auto& ds = doc["disturbances"];
    if (!ds.is_object()) bad("disturbances", "expected an object mapping disturbance names to schedules");
    std::vector<DisturbanceSchedule::Entry> entries;
    for (auto it = ds.begin(); it != ds.end(); ++it) {
      const std::string f = "disturbances." + it.key();
      DisturbanceSchedule::Entry e{it.key(), {}, std::nullopt};
      const auto& v = it.value();
      if (v.is_object() && !v.contains("segments")) {
        check_keys(v, f, {"values", "bounds"});
        if (v.contains("values")) e.values = schedule(v["values"], f + ".values");
        if (v.contains("bounds")) {
          const auto b = numbers(v["bounds"], f + ".bounds");
          if (b.size() != 2) bad(f + ".bounds", "expected [low, high]");
          e.bounds = std::pair{b[0], b[1]};
        }
      } else {
        e.values = schedule(v, f);
      }
      entries.push_back(std::move(e));
    }
    env.disturbances = DisturbanceSchedule(std::move(entries));
  }

  if (doc.contains("constraints")) {
    const auto& cs = doc["constraints"];
    if (!cs.is_array()) bad("constraints", "expected an array");
    std::vector<Constraint> list;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string f = "constraints[" + std::to_string(i) + "]";
      check_keys(cs[i], f, {"var", "sense", "bound"});
      if (!cs[i].contains("var") || !cs[i].contains("sense") || !cs[i].contains("bound")) {
        bad(f, "needs 'var', 'sense' and 'bound'");
      }
      const std::string sense = text(cs[i]["sense"], f + ".sense");
      Constraint c;
      c.var = text(cs[i]["var"], f + ".var");
      if (sense == "<=") c.sense = Sense::less_equal;
      else if (sense == ">=") c.sense = Sense::greater_equal;
      else bad(f + ".sense", "expected \"<=\" or \">=\"");
      c.bound = number(cs[i]["bound"], f + ".bound");
      list.push_back(c);
    }
    env.constraints = ConstraintSet(std::move(list));
  }

  if (doc.contains("reward")) {
    const auto& r = doc["reward"];
    check_keys(r, "reward", {"kind", "Q", "R", "lambda", "epsilon"});
    if (r.contains("kind")) {
      const std::string kind = text(r["kind"], "reward.kind");
      try {
        env.reward.kind = reward_kind_from_string(kind);
      } catch (const Error& e) {
        bad("reward.kind", e.what());
      }
      if (env.reward.kind == RewardKind::custom) bad("reward.kind", "custom rewards are installed through the API");
    }
    if (r.contains("Q")) env.reward.Q = matrix(r["Q"], "reward.Q");
    if (r.contains("R")) env.reward.R = matrix(r["R"], "reward.R");
    if (r.contains("lambda")) env.reward.lambda = number(r["lambda"], "reward.lambda");
    if (r.contains("epsilon")) env.reward.epsilon = number(r["epsilon"], "reward.epsilon");
  }

  env.integrator.substeps = env.model.default_substeps;
  if (doc.contains("integrator")) {
    const auto& ig = doc["integrator"];
    check_keys(ig, "integrator", {"substeps", "method"});
    if (ig.contains("substeps")) env.integrator.substeps = static_cast<int>(count(ig["substeps"], "integrator.substeps"));
    if (ig.contains("method") && text(ig["method"], "integrator.method") != "rk4") {
      bad("integrator.method", "only \"rk4\" is available");
    }
  }

  if (doc.contains("oracle")) {
    const auto& o = doc["oracle"];
    check_keys(o, "oracle",
               {"N", "Q", "R", "max_iterations", "tolerance", "fd_step", "penalty_weight", "penalty_growth",
                "max_escalations", "multistart", "constraint_margin"});
    if (o.contains("N")) {
      s.oracle.horizon = count(o["N"], "oracle.N");
      if (s.oracle.horizon < 1) bad("oracle.N", "must be >= 1");
    }
    if (o.contains("Q")) s.oracle.Q = matrix(o["Q"], "oracle.Q");
    if (o.contains("R")) s.oracle.R = matrix(o["R"], "oracle.R");
    s.oracle.solver = solver_settings(o, s.oracle.solver);
  }
  try {
    s.oracle.solver.validate();
  } catch (const Error& e) {
    bad("oracle", e.what());
  }
  if (doc.contains("gamma")) s.gamma = number(doc["gamma"], "gamma");
  if (!(s.gamma > 0.0 && s.gamma <= 1.0)) bad("gamma", "must lie in (0, 1]");

  env.finalize();
  return s;
}

Scenario scenario_from_text(const std::string& text_doc, const std::string& origin) {
  Json doc = Json::parse(text_doc, nullptr, false);
  if (doc.is_discarded()) fail(ErrorCode::config, "scenario '" + origin + "' is not valid JSON");
  return scenario_from_json(doc, origin);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, "cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return scenario_from_text(ss.str(), path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) fail(ErrorCode::config, path + ": " + e.what());
    throw;
  }
}

nlohmann::json scenario_summary(const Scenario& s) {
  const EnvConfig& e = s.env;
  nlohmann::json j;
  j["name"] = e.name;
  j["model"] = e.model.name;
  j["description"] = s.description;
  j["T"] = e.steps;
  j["tsim"] = e.tsim;
  j["time_unit"] = e.model.time_unit;
  j["obs_dim"] = e.observation_space().size();
  j["act_dim"] = e.a_space.size();
  j["setpoints"] = e.setpoints.names();
  j["observation_names"] = e.observation_names();
  j["action_names"] = e.model.input_names;
  j["noise_percentage"] = e.noise_percentage;
  j["reward"] = std::string(to_string(e.reward.kind));
  j["oracle_horizon"] = s.oracle.horizon;
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& c : e.constraints.constraints()) {
    cons.push_back({{"var", c.var}, {"sense", c.sense == Sense::less_equal ? "<=" : ">="}, {"bound", c.bound}});
  }
  j["constraints"] = cons;
  return j;
}

ParameterMap load_model_parameters(const std::string& path, std::string* model_name) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, "cannot open parameter file '" + path + "'");
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) fail(ErrorCode::config, "'" + path + "' is not a JSON object");
  if (!doc.contains("parameters") || !doc["parameters"].is_object()) {
    fail(ErrorCode::config, "'" + path + "' lacks a 'parameters' object");
  }
  if (model_name && doc.contains("model") && doc["model"].is_string()) *model_name = doc["model"].get<std::string>();
  ParameterMap out;
  for (auto it = doc["parameters"].begin(); it != doc["parameters"].end(); ++it) {
    const auto& p = it.value();
    if (!p.is_object() || !p.contains("value") || !p["value"].is_number()) {
      fail(ErrorCode::config, "'" + path + "': parameter '" + it.key() + "' needs a numeric 'value'");
    }
    out[it.key()] = Parameter{p["value"].get<double>(), p.value("unit", std::string()),
                              p.value("description", std::string())};
  }
  return out;
}

std::string data_dir() {
  if (const char* d = std::getenv("PCBENCH_DATA_DIR"); d && *d) return d;
  return PCBENCH_DATA_DIR;
}

std::vector<std::string> list_scenario_files(const std::string& dir) {
  std::vector<std::string> out;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pcbench
