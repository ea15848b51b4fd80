#include "pcbench/models.hpp"

#include <algorithm>
#include <cmath>

#include "pcbench/error.hpp"

namespace pcbench {

namespace {

void require_finite(std::string_view model, const Vector& x, const Vector& u, const Vector& d) {
  if (!x.allFinite() || !u.allFinite() || !d.allFinite()) {
    fail(ErrorCode::argument, std::string(model) + ": non-finite input x=" + to_string(x) +
                                  " u=" + to_string(u) + " d=" + to_string(d));
  }
}

void require_size(std::string_view model, std::string_view what, const Vector& v, Eigen::Index n) {
  if (v.size() != n) {
    fail(ErrorCode::argument, std::string(model) + ": " + std::string(what) + " has size " +
                                  std::to_string(v.size()) + ", expected " + std::to_string(n));
  }
}

double param(const ParameterMap& p, const char* key) { return p.at(key).value; }

}  // namespace

// ---------------------------------------------------------------------------
// Model right-hand sides.

Vector cstr_rhs(const Vector& x, const Vector& u, const Vector& d, const CstrParams& p) {
  require_size("cstr", "x", x, 2);
  require_size("cstr", "u", u, 1);
  require_size("cstr", "d", d, 2);
  require_finite("cstr", x, u, d);
  const double ca = x[0], temp = x[1], tc = u[0], ti = d[0], caf = d[1];
  if (temp <= 0.0) fail(ErrorCode::argument, "cstr: non-positive absolute temperature " + format_double(temp));

  const double rate = p.k0 * std::exp(-p.ea_over_r / temp) * ca;
  Vector dx(2);
  dx[0] = p.q / p.V * (caf - ca) - rate;
  dx[1] = p.q / p.V * (ti - temp) - p.dH_r / p.rho_cp * rate + p.UA / (p.rho_cp * p.V) * (tc - temp);
  return dx;
}

Vector extraction_rhs(const Vector& x, const Vector& u, const Vector& d, const ExtractionParams& p) {
  constexpr int stages = 5;
  constexpr double negative_tolerance = -1e-9;
  require_size("multistage_extraction", "x", x, 2 * stages);
  require_size("multistage_extraction", "u", u, 2);
  require_size("multistage_extraction", "d", d, 2);
  require_finite("multistage_extraction", x, u, d);
  if ((x.array() < negative_tolerance).any()) {
    fail(ErrorCode::argument, "multistage_extraction: negative concentration in x=" + to_string(x));
  }
  const double liquid = u[0], gas = u[1];
  if (liquid < 0.0 || gas < 0.0) {
    fail(ErrorCode::argument, "multistage_extraction: negative flow rate u=" + to_string(u));
  }

  Vector dx(2 * stages);
  for (int n = 0; n < stages; ++n) {
    const double cx = x[n];
    const double cy = x[stages + n];
    const double cx_in = n == 0 ? d[0] : x[n - 1];               // liquid flows down from stage n-1
    const double cy_in = n == stages - 1 ? d[1] : x[stages + n + 1];  // gas flows up from stage n+1
    const double cx_eq = std::pow(std::max(cy, 0.0) / p.m, 1.0 / p.e);
    const double transfer = p.Kla * (cx - cx_eq) * p.Vl;
    dx[n] = (liquid * (cx_in - cx) - transfer) / p.Vl;
    dx[stages + n] = (gas * (cy_in - cy) + transfer) / p.Vg;
  }
  return dx;
}

double crystallization_equilibrium(double temperature_celsius) {
  const double tk = temperature_celsius + 273.15;
  return -686.2686 + 3.579165 * tk - 0.00292874 * tk * tk;
}

CrystallizationKinetics crystallization_kinetics(const Vector& x, double temperature_celsius,
                                                 const CrystallizationParams& p) {
  const double tk = temperature_celsius + 273.15;
  CrystallizationKinetics k{};
  k.c_eq = crystallization_equilibrium(temperature_celsius);
  k.supersat = x[4] * 1e3 - k.c_eq;
  if (!std::isfinite(k.supersat)) {
    fail(ErrorCode::argument, "crystallization: non-finite supersaturation at x=" + to_string(x));
  }
  // No nucleation or growth in an undersaturated solution; |S|^k keeps the powers real.
  if (k.supersat <= 0.0) {
    k.nucleation = 0.0;
    k.growth = 0.0;
    return k;
  }
  k.nucleation = p.ka * std::exp(p.kb / tk) * std::pow(k.supersat, p.kc) * std::pow(std::abs(x[3]), p.kd);
  k.growth = p.kg * std::exp(p.k1 / tk) * std::pow(k.supersat, p.k2);
  return k;
}

namespace {
thread_local KineticsObserver kinetics_observer;
}

void set_kinetics_observer(KineticsObserver observer) { kinetics_observer = std::move(observer); }

Vector crystallization_rhs(const Vector& x, const Vector& u, const CrystallizationParams& p) {
  require_size("crystallization", "x", x, 5);
  require_size("crystallization", "u", u, 1);
  require_finite("crystallization", x, u, Vector());
  const auto k = crystallization_kinetics(x, u[0], p);
  if (kinetics_observer) kinetics_observer(x, u[0], k);
  const double g = k.growth;
  const double mu0 = x[0], mu1 = x[1], mu2 = x[2], mu3 = x[3];

  Vector dx(5);
  dx[0] = k.nucleation;
  dx[1] = g * (p.a * mu0 + p.b * mu1 * 1e-4) * 1e4;
  dx[2] = 2.0 * g * (p.a * mu1 * 1e-4 + p.b * mu2 * 1e-8) * 1e8;
  dx[3] = 3.0 * g * (p.a * mu2 * 1e-8 + p.b * mu3 * 1e-12) * 1e12;
  dx[4] = -0.5 * p.rho * p.alpha * g * (p.a * mu2 * 1e-8 + p.b * mu3 * 1e-12);
  return dx;
}

CrystallizationOutputs crystallization_outputs(const Vector& x) {
  if (x.size() < 3) fail(ErrorCode::argument, "crystallization_outputs: need at least mu0..mu2");
  const double mu0 = x[0], mu1 = x[1], mu2 = x[2];
  if (!(mu0 > 0.0) || !(mu1 > 0.0)) {
    fail(ErrorCode::undefined_output,
         "crystallization_outputs: mean size undefined for mu0=" + format_double(mu0) +
             ", mu1=" + format_double(mu1));
  }
  const double ratio = mu0 * mu2 / (mu1 * mu1);
  return {mu1 / mu0, std::sqrt(std::max(ratio - 1.0, 0.0))};
}

Vector four_tank_rhs(const Vector& x, const Vector& u, const FourTankParams& p) {
  require_size("four_tank", "x", x, 4);
  require_size("four_tank", "u", u, 2);
  require_finite("four_tank", x, u, Vector());
  auto outflow = [&](double area, double h) { return area * std::sqrt(2.0 * p.g * std::max(h, 0.0)); };
  const double q1 = outflow(p.a1, x[0]), q2 = outflow(p.a2, x[1]);
  const double q3 = outflow(p.a3, x[2]), q4 = outflow(p.a4, x[3]);
  const double v1 = u[0], v2 = u[1];

  Vector dx(4);
  dx[0] = (-q1 + q3 + p.gamma1 * p.k1 * v1) / p.A1;
  dx[1] = (-q2 + q4 + p.gamma2 * p.k2 * v2) / p.A2;
  dx[2] = (-q3 + (1.0 - p.gamma2) * p.k2 * v2) / p.A3;
  dx[3] = (-q4 + (1.0 - p.gamma1) * p.k1 * v1) / p.A4;
  return dx;
}

// ---------------------------------------------------------------------------
// Descriptor plumbing.

Vector ModelDescriptor::rhs(const Vector& x, const Vector& u, const Vector& d) const {
  Vector out(n_x());
  rhs_fn(x, u, d, out);
  return out;
}

Vector ModelDescriptor::outputs(const Vector& x) const {
  if (!output_fn) return Vector(0);
  return output_fn(x);
}

Vector ModelDescriptor::measured(const Vector& x) const {
  if (n_y() == 0) return x;
  Vector m(n_measured());
  m.head(n_x()) = x;
  m.tail(n_y()) = outputs(x);
  return m;
}

Names ModelDescriptor::measured_names() const {
  Names all = state_names;
  all.insert(all.end(), output_names.begin(), output_names.end());
  return all;
}

std::optional<Eigen::Index> ModelDescriptor::measured_index(std::string_view var) const {
  for (std::size_t i = 0; i < state_names.size(); ++i) {
    if (state_names[i] == var) return static_cast<Eigen::Index>(i);
  }
  for (std::size_t i = 0; i < output_names.size(); ++i) {
    if (output_names[i] == var) return n_x() + static_cast<Eigen::Index>(i);
  }
  return std::nullopt;
}

std::optional<Eigen::Index> ModelDescriptor::disturbance_index(std::string_view var) const {
  for (std::size_t i = 0; i < disturbance_names.size(); ++i) {
    if (disturbance_names[i] == var) return static_cast<Eigen::Index>(i);
  }
  return std::nullopt;
}

Vector ModelDescriptor::default_disturbance_vector() const {
  Vector d(n_d());
  for (Eigen::Index i = 0; i < n_d(); ++i) d[i] = default_disturbances.at(disturbance_names[static_cast<std::size_t>(i)]);
  return d;
}

void ModelDescriptor::validate() const {
  if (name.empty()) config_error("model.name", "empty model name");
  if (n_x() < 1) config_error("model.state_names", "model needs at least one state");
  if (n_u() < 1) config_error("model.input_names", "model needs at least one input");
  if (!rhs_fn) config_error("model.rhs", "missing right-hand side");
  if (n_y() > 0 && !output_fn) config_error("model.outputs", "output names declared without an output function");
  for (const auto& dname : disturbance_names) {
    if (!default_disturbances.contains(dname)) {
      config_error("model.default_disturbances", "no default for disturbance '" + dname + "'");
    }
  }
  if (default_substeps < 1) config_error("model.default_substeps", "must be >= 1");
}

namespace {

struct ModelDefinition {
  std::string name;
  ParameterMap defaults;
  ModelDescriptor (*build)(const ParameterMap&);
};

ModelDescriptor build_cstr(const ParameterMap& pm) {
  CstrParams p;
  p.q = param(pm, "q");
  p.V = param(pm, "V");
  p.rho_cp = param(pm, "rho_Cp");
  p.dH_r = param(pm, "dH_R");
  p.ea_over_r = param(pm, "EA_over_R");
  p.k0 = param(pm, "k0");
  p.UA = param(pm, "UA");

  ModelDescriptor m;
  m.name = "cstr";
  m.state_names = {"Ca", "T"};
  m.input_names = {"Tc"};
  m.disturbance_names = {"Ti", "Caf"};
  m.default_disturbances = {{"Ti", 350.0}, {"Caf", 1.0}};
  m.time_unit = "min";
  m.default_substeps = 10;
  m.rhs_fn = [p](const Vector& x, const Vector& u, const Vector& d, Vector& dx) { dx = cstr_rhs(x, u, d, p); };
  return m;
}

ModelDescriptor build_extraction(const ParameterMap& pm) {
  ExtractionParams p;
  p.Vl = param(pm, "Vl");
  p.Vg = param(pm, "Vg");
  p.m = param(pm, "m");
  p.Kla = param(pm, "Kla");
  p.e = param(pm, "eq_exponent");

  ModelDescriptor m;
  m.name = "multistage_extraction";
  m.state_names = {"X1", "X2", "X3", "X4", "X5", "Y1", "Y2", "Y3", "Y4", "Y5"};
  m.input_names = {"L", "G"};
  m.disturbance_names = {"X0", "Y6"};
  m.default_disturbances = {{"X0", 0.60}, {"Y6", 0.050}};
  m.time_unit = "hr";
  m.default_substeps = 20;
  m.rhs_fn = [p](const Vector& x, const Vector& u, const Vector& d, Vector& dx) {
    dx = extraction_rhs(x, u, d, p);
  };
  return m;
}

ModelDescriptor build_crystallization(const ParameterMap& pm) {
  CrystallizationParams p;
  p.ka = param(pm, "ka");
  p.kb = param(pm, "kb");
  p.kc = param(pm, "kc");
  p.kd = param(pm, "kd");
  p.kg = param(pm, "kg");
  p.k1 = param(pm, "k1");
  p.k2 = param(pm, "k2");
  p.a = param(pm, "a");
  p.b = param(pm, "b");
  p.alpha = param(pm, "alpha");
  p.rho = param(pm, "rho");

  ModelDescriptor m;
  m.name = "crystallization";
  m.state_names = {"mu0", "mu1", "mu2", "mu3", "c"};
  m.input_names = {"T"};
  m.output_names = {"CV", "Ln"};
  m.time_unit = "hr";
  m.default_substeps = 30;
  m.rhs_fn = [p](const Vector& x, const Vector& u, const Vector&, Vector& dx) { dx = crystallization_rhs(x, u, p); };
  m.output_fn = [](const Vector& x) {
    const auto y = crystallization_outputs(x);
    Vector out(2);
    out << y.cv, y.mean_length;
    return out;
  };
  return m;
}

ModelDescriptor build_four_tank(const ParameterMap& pm) {
  FourTankParams p;
  p.g = param(pm, "g");
  p.gamma1 = param(pm, "gamma1");
  p.gamma2 = param(pm, "gamma2");
  p.k1 = param(pm, "k1");
  p.k2 = param(pm, "k2");
  p.a1 = param(pm, "a1");
  p.a2 = param(pm, "a2");
  p.a3 = param(pm, "a3");
  p.a4 = param(pm, "a4");
  p.A1 = param(pm, "A1");
  p.A2 = param(pm, "A2");
  p.A3 = param(pm, "A3");
  p.A4 = param(pm, "A4");

  ModelDescriptor m;
  m.name = "four_tank";
  m.state_names = {"h1", "h2", "h3", "h4"};
  m.input_names = {"v1", "v2"};
  m.time_unit = "s";
  m.default_substeps = 10;
  m.rhs_fn = [p](const Vector& x, const Vector& u, const Vector&, Vector& dx) { dx = four_tank_rhs(x, u, p); };
  return m;
}

const std::vector<ModelDefinition>& definitions() {
  static const std::vector<ModelDefinition> defs = {
      {"cstr",
       {{"q", {100.0, "L/min", "feed flow rate"}},
        {"V", {100.0, "L", "reactor volume"}},
        {"rho_Cp", {239.0, "J/(L K)", "volumetric heat capacity (rho = 1000 g/L, Cp = 0.239 J/(g K))"}},
        {"dH_R", {-5.0e4, "J/mol", "heat of reaction"}},
        {"EA_over_R", {8750.0, "K", "activation temperature"}},
        {"k0", {7.2e10, "1/min", "pre-exponential factor"}},
        {"UA", {5.0e4, "J/(min K)", "jacket heat transfer coefficient times area"}}},
       build_cstr},
      {"multistage_extraction",
       {{"Vl", {5.0, "m3", "liquid volume in each stage"}},
        {"Vg", {5.0, "m3", "gas volume in each stage"}},
        {"m", {1.0, "-", "equilibrium constant"}},
        {"Kla", {5.0, "1/hr", "mass transfer capacity constant"}},
        {"eq_exponent", {2.0, "-", "equilibrium exponent e in X_eq = (Y/m)^(1/e)"}}},
       build_extraction},
      {"crystallization",
       {{"ka", {0.92, "-", "nucleation rate constant"}},
        {"kb", {-6800.0, "K", "nucleation temperature dependency"}},
        {"kc", {0.92, "-", "nucleation supersaturation exponent"}},
        {"kd", {1.3, "-", "nucleation crystal content exponent"}},
        {"kg", {48.0, "-", "growth rate constant"}},
        {"k1", {-4900.0, "K", "growth rate temperature dependency"}},
        {"k2", {1.9, "-", "growth rate supersaturation exponent"}},
        {"a", {0.51, "-", "size-dependent growth parameter"}},
        {"b", {7.3, "-", "size-dependent growth parameter"}},
        {"alpha", {7.5, "-", "volumetric shape factor"}},
        {"rho", {2.7, "g/cm3", "crystal density"}}},
       build_crystallization},
      {"four_tank",
       {{"g", {9.8, "m/s2", "acceleration due to gravity"}},
        {"gamma1", {0.20, "-", "fraction bypassed by valve to tank 1"}},
        {"gamma2", {0.20, "-", "fraction bypassed by valve to tank 2"}},
        {"k1", {8.5e-4, "m3/(V s)", "pump 1 gain"}},
        {"k2", {9.5e-4, "m3/(V s)", "pump 2 gain"}},
        {"a1", {3.5e-3, "m2", "outlet area of tank 1"}},
        {"a2", {3.0e-3, "m2", "outlet area of tank 2"}},
        {"a3", {2.0e-3, "m2", "outlet area of tank 3"}},
        {"a4", {2.5e-3, "m2", "outlet area of tank 4"}},
        {"A1", {1.0, "m2", "cross-section of tank 1"}},
        {"A2", {1.0, "m2", "cross-section of tank 2"}},
        {"A3", {1.0, "m2", "cross-section of tank 3"}},
        {"A4", {1.0, "m2", "cross-section of tank 4"}}},
       build_four_tank},
  };
  return defs;
}

}  // namespace

const Names& model_names() {
  static const Names names = [] {
    Names n;
    for (const auto& d : definitions()) n.push_back(d.name);
    return n;
  }();
  return names;
}

ModelDescriptor model_registry(std::string_view name, const std::map<std::string, double>& overrides) {
  for (const auto& def : definitions()) {
    if (def.name != name) continue;
    ParameterMap params = def.defaults;
    for (const auto& [key, value] : overrides) {
      auto it = params.find(key);
      if (it == params.end()) {
        config_error("model_params", "model '" + def.name + "' has no parameter '" + key + "'");
      }
      if (!std::isfinite(value)) config_error("model_params", "parameter '" + key + "' is not finite");
      it->second.value = value;
    }
    ModelDescriptor m = def.build(params);
    m.params = std::move(params);
    m.validate();
    return m;
  }
  std::string available;
  for (const auto& n : model_names()) available += (available.empty() ? "" : ", ") + n;
  config_error("model", "unknown model '" + std::string(name) + "' (available: " + available + ")");
}

}  // namespace pcbench
