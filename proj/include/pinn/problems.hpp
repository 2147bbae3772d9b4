#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pinn/autodiff.hpp"

namespace pinn {

/// How the network outputs relate to the equation.
enum class OdeForm {
  FirstOrder,        // y' = f(t, y)
  SecondOrder,       // F(t, y, y', y'') = 0, integrated as the state (y, y')
  FirstOrderSystem,  // two coupled first-order equations, one output per variable
};

/// Integrator state; at most two components so it never allocates.
using State = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;

using Residual = std::array<Var, 2>;
using ResidualFn = std::function<Residual(std::span<const Jet2<Var>> y, double t)>;
using EnergyFn = std::function<Var(std::span<const Jet2<Var>> y)>;
using ExactFn = std::function<State(double t)>;
using RhsFn = std::function<State(double t, const State& state)>;

struct InitialCondition {
  int variable = 0;    // network output index
  int derivative = 0;  // 0: value, 1: first time derivative
  double value = 0.0;
};

/// One benchmark ODE: residual over output jets, optional energy, initial
/// conditions, time domain and the explicit first-order form used by the
/// reference integrators.
struct OdeProblem {
  std::string name;
  OdeForm form = OdeForm::FirstOrder;
  int dim = 1;  // number of network outputs and residual components
  double t0 = 0.0;
  double t_end = 1.0;
  std::vector<InitialCondition> initial_conditions;
  std::map<std::string, double> params;

  ResidualFn residual;
  EnergyFn energy;  // empty for non-conservative problems
  double reference_energy = 0.0;
  ExactFn exact;  // closed-form outputs; empty when only the RK4 oracle exists
  RhsFn rhs;
  State initial_state;

  bool has_energy() const { return static_cast<bool>(energy); }
  bool has_exact() const { return static_cast<bool>(exact); }
  int state_dim() const { return static_cast<int>(initial_state.size()); }
  double param(const std::string& key) const;

  /// Output jets implied by an integrator state; derivatives come from rhs.
  /// For system form the second derivative is not available and is set to 0.
  std::vector<Jet2<double>> jets_from_state(double t, const State& state) const;
  /// Network-output view of an integrator state.
  State outputs_from_state(const State& state) const;

  std::array<double, 2> residual_value(std::span<const Jet2<double>> y, double t) const;
  double energy_value(std::span<const Jet2<double>> y) const;
  double energy_of_state(double t, const State& state) const;
};

OdeProblem tutorial(double y0 = 1.0, double t_end = 30.0);
OdeProblem harmonic(double omega0 = 20.0, double y0 = 1.0, double v0 = 0.0, double t_end = 1.0);
OdeProblem pendulum_scalar(double omega0 = 25.0, double y0 = 0.1, double v0 = 40.0, double t_end = 1.0);
/// y2 is dy/dt divided by omega0, so y2(0) = v0 / omega0.
OdeProblem pendulum_system(double omega0 = 25.0, double y0 = 0.1, double v0 = 40.0, double t_end = 1.0);
OdeProblem anharmonic(double omega0 = 15.5, double y0 = 1.5, double v0 = 0.0, double t_end = 1.0);
OdeProblem double_well_system(double omega0 = 12.0, double y0 = 1.8, double v0 = 0.0, double t_end = 1.0);
/// Scalar second-order double well; only used to cross-check the system form.
OdeProblem double_well_scalar(double omega0 = 12.0, double y0 = 1.8, double v0 = 0.0, double t_end = 1.0);
OdeProblem van_der_pol(double omega0 = 15.0, double epsilon = 1.0, double y0 = 1.0, double v0 = 0.0,
                       double t_end = 1.5);

/// Registry names: tutorial, harmonic, pendulum, pendulum-system, anharmonic, double-well, vdp.
const std::vector<std::string>& problem_names();

/// Builds a registered problem. Recognised parameters: omega0, epsilon, y0, v0, t_end
/// (each only where meaningful). Unknown names or parameters throw ConfigError.
OdeProblem make_problem(const std::string& name, const std::map<std::string, double>& params = {});

/// Parameters accepted by make_problem for this name.
std::vector<std::string> problem_parameters(const std::string& name);

}  // namespace pinn
