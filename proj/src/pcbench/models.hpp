#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "pcbench/types.hpp"

namespace pcbench {

struct Parameter {
  double value = 0.0;
  std::string unit;
  std::string description;
};

using ParameterMap = std::map<std::string, Parameter>;

/// A named ODE system dx/dt = f(x, u, d) plus optional algebraic outputs y = h(x).
///
/// The "measured" vector seen by environments is the states followed by the
/// outputs; setpoints, constraints and observation bounds all index into it.
struct ModelDescriptor {
  using RhsFn = std::function<void(const Vector& x, const Vector& u, const Vector& d, Vector& dxdt)>;
  using OutputFn = std::function<Vector(const Vector& x)>;

  std::string name;
  Names state_names;
  Names input_names;
  Names disturbance_names;
  Names output_names;
  ParameterMap params;
  std::map<std::string, double> default_disturbances;
  std::string time_unit;
  int default_substeps = 10;

  RhsFn rhs_fn;
  OutputFn output_fn;  // empty when output_names is empty

  Eigen::Index n_x() const { return static_cast<Eigen::Index>(state_names.size()); }
  Eigen::Index n_u() const { return static_cast<Eigen::Index>(input_names.size()); }
  Eigen::Index n_d() const { return static_cast<Eigen::Index>(disturbance_names.size()); }
  Eigen::Index n_y() const { return static_cast<Eigen::Index>(output_names.size()); }
  Eigen::Index n_measured() const { return n_x() + n_y(); }

  Vector rhs(const Vector& x, const Vector& u, const Vector& d) const;
  void rhs(const Vector& x, const Vector& u, const Vector& d, Vector& dxdt) const { rhs_fn(x, u, d, dxdt); }
  Vector outputs(const Vector& x) const;
  /// States followed by outputs.
  Vector measured(const Vector& x) const;
  Names measured_names() const;
  std::optional<Eigen::Index> measured_index(std::string_view var) const;
  std::optional<Eigen::Index> disturbance_index(std::string_view var) const;
  Vector default_disturbance_vector() const;

  /// Checks the structural invariants (dimensions, labels, disturbance defaults).
  void validate() const;
};

// Typed parameter sets, one per bundled process.

struct CstrParams {
  double q = 100.0;           // L/min
  double V = 100.0;           // L
  double rho_cp = 239.0;      // J/(L K)
  double dH_r = -5.0e4;       // J/mol
  double ea_over_r = 8750.0;  // K
  double k0 = 7.2e10;         // 1/min
  double UA = 5.0e4;          // J/(min K)
};

struct ExtractionParams {
  double Vl = 5.0;   // m3
  double Vg = 5.0;   // m3
  double m = 1.0;
  double Kla = 5.0;  // 1/hr
  double e = 2.0;
};

struct CrystallizationParams {
  double ka = 0.92;
  double kb = -6800.0;
  double kc = 0.92;
  double kd = 1.3;
  double kg = 48.0;
  double k1 = -4900.0;
  double k2 = 1.9;
  double a = 0.51;
  double b = 7.3;
  double alpha = 7.5;
  double rho = 2.7;  // g/cm3
};

struct FourTankParams {
  double g = 9.8;
  double gamma1 = 0.20;
  double gamma2 = 0.20;
  double k1 = 8.5e-4;
  double k2 = 9.5e-4;
  double a1 = 3.5e-3, a2 = 3.0e-3, a3 = 2.0e-3, a4 = 2.5e-3;
  double A1 = 1.0, A2 = 1.0, A3 = 1.0, A4 = 1.0;
};

/// x = [Ca, T], u = [Tc], d = [Ti, Caf].
Vector cstr_rhs(const Vector& x, const Vector& u, const Vector& d, const CstrParams& p);

/// x = [X1..X5, Y1..Y5], u = [L, G], d = [X0, Y6]. Equilibrium X_eq = (Y / m)^(1/e).
Vector extraction_rhs(const Vector& x, const Vector& u, const Vector& d, const ExtractionParams& p);

/// Supersaturation-driven kinetics of the moment model.
struct CrystallizationKinetics {
  double c_eq;        // equilibrium concentration, g/L
  double supersat;    // S = c * 1e3 - c_eq
  double nucleation;  // B0
  double growth;      // G_inf
};

double crystallization_equilibrium(double temperature_celsius);
CrystallizationKinetics crystallization_kinetics(const Vector& x, double temperature_celsius,
                                                 const CrystallizationParams& p);
/// Called with every kinetics evaluation made by crystallization_rhs on the
/// installing thread. Pass an empty function to remove it.
using KineticsObserver = std::function<void(const Vector& x, double temperature_celsius,
                                            const CrystallizationKinetics& k)>;
void set_kinetics_observer(KineticsObserver observer);

/// x = [mu0, mu1, mu2, mu3, c], u = [T (degC)].
Vector crystallization_rhs(const Vector& x, const Vector& u, const CrystallizationParams& p);

struct CrystallizationOutputs {
  double mean_length;  // number-mean size mu1/mu0, um
  double cv;           // coefficient of variation
};

CrystallizationOutputs crystallization_outputs(const Vector& x);

/// x = [h1..h4], u = [v1, v2].
Vector four_tank_rhs(const Vector& x, const Vector& u, const FourTankParams& p);

/// Bundled model names in registry order.
const Names& model_names();

/// Fully parameterized descriptor for a bundled model. Unknown names throw
/// ErrorCode::config listing the available models; unknown override keys also throw.
ModelDescriptor model_registry(std::string_view name, const std::map<std::string, double>& overrides = {});

}  // namespace pcbench
