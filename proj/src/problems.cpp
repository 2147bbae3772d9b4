#include "pinn/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pinn/errors.hpp"

namespace pinn {
namespace {

using std::numbers::pi;

State make_state(double a) {
  State s(1);
  s << a;
  return s;
}

State make_state(double a, double b) {
  State s(2);
  s << a, b;
  return s;
}

std::vector<Jet2<Var>> constant_jets(std::span<const Jet2<double>> y) {
  std::vector<Jet2<Var>> out;
  out.reserve(y.size());
  for (const auto& j : y) out.push_back({Var(j.u), Var(j.du), Var(j.ddu)});
  return out;
}

// Fixes the energy constant so that the initial state has zero deviation.
void attach_energy(OdeProblem& p, EnergyFn energy) {
  p.energy = std::move(energy);
  p.reference_energy = p.energy_of_state(p.t0, p.initial_state);
}

OdeProblem second_order(std::string name, double y0, double v0, double t_end) {
  OdeProblem p;
  p.name = std::move(name);
  p.form = OdeForm::SecondOrder;
  p.dim = 1;
  p.t_end = t_end;
  p.initial_conditions = {{0, 0, y0}, {0, 1, v0}};
  p.initial_state = make_state(y0, v0);
  return p;
}

OdeProblem system_form(std::string name, double y1, double y2, double t_end) {
  OdeProblem p;
  p.name = std::move(name);
  p.form = OdeForm::FirstOrderSystem;
  p.dim = 2;
  p.t_end = t_end;
  p.initial_conditions = {{0, 0, y1}, {1, 0, y2}};
  p.initial_state = make_state(y1, y2);
  return p;
}

}  // namespace

double OdeProblem::param(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw ConfigError("problem " + name + " has no parameter '" + key + "'");
  return it->second;
}

std::vector<Jet2<double>> OdeProblem::jets_from_state(double t, const State& state) const {
  const State d = rhs(t, state);
  switch (form) {
    case OdeForm::FirstOrder: return {{state[0], d[0], 0.0}};
    case OdeForm::SecondOrder: return {{state[0], state[1], d[1]}};
    case OdeForm::FirstOrderSystem: return {{state[0], d[0], 0.0}, {state[1], d[1], 0.0}};
  }
  return {};
}

State OdeProblem::outputs_from_state(const State& state) const {
  if (form == OdeForm::FirstOrderSystem) return state;
  return make_state(state[0]);
}

std::array<double, 2> OdeProblem::residual_value(std::span<const Jet2<double>> y, double t) const {
  const auto jets = constant_jets(y);
  const Residual r = residual(jets, t);
  return {r[0].value(), r[1].value()};
}

double OdeProblem::energy_value(std::span<const Jet2<double>> y) const {
  if (!energy) throw ConfigError("problem " + name + " has no energy function");
  const auto jets = constant_jets(y);
  return energy(jets).value();
}

double OdeProblem::energy_of_state(double t, const State& state) const {
  const auto jets = jets_from_state(t, state);
  return energy_value(jets);
}

// ---------------------------------------------------------------------------

OdeProblem tutorial(double y0, double t_end) {
  OdeProblem p;
  p.name = "tutorial";
  p.form = OdeForm::FirstOrder;
  p.dim = 1;
  p.t_end = t_end;
  p.params = {{"y0", y0}, {"t_end", t_end}};
  p.initial_conditions = {{0, 0, y0}};
  p.initial_state = make_state(y0);
  p.residual = [](std::span<const Jet2<Var>> y, double t) -> Residual {
    return {y[0].du + Var(0.1 * t - std::sin(pi * t / 2.0)), Var(0.0)};
  };
  p.rhs = [](double t, const State&) { return make_state(std::sin(pi * t / 2.0) - 0.1 * t); };
  p.exact = [y0](double t) {
    return make_state(y0 + (2.0 / pi) * (1.0 - std::cos(pi * t / 2.0)) - 0.05 * t * t);
  };
  return p;
}

OdeProblem harmonic(double omega0, double y0, double v0, double t_end) {
  OdeProblem p = second_order("harmonic", y0, v0, t_end);
  p.params = {{"omega0", omega0}, {"y0", y0}, {"v0", v0}, {"t_end", t_end}};
  const double w2 = omega0 * omega0;
  p.residual = [w2](std::span<const Jet2<Var>> y, double) -> Residual { return {y[0].ddu + w2 * y[0].u, Var(0.0)}; };
  p.rhs = [w2](double, const State& s) { return make_state(s[1], -w2 * s[0]); };
  p.exact = [=](double t) { return make_state(y0 * std::cos(omega0 * t) + v0 / omega0 * std::sin(omega0 * t)); };
  attach_energy(p, [w2](std::span<const Jet2<Var>> y) {
    return 0.5 * square(y[0].du) + (0.5 * w2) * square(y[0].u);
  });
  return p;
}

OdeProblem pendulum_scalar(double omega0, double y0, double v0, double t_end) {
  OdeProblem p = second_order("pendulum", y0, v0, t_end);
  p.params = {{"omega0", omega0}, {"y0", y0}, {"v0", v0}, {"t_end", t_end}};
  const double w2 = omega0 * omega0;
  p.residual = [w2](std::span<const Jet2<Var>> y, double) -> Residual {
    return {y[0].ddu + w2 * sin(y[0].u), Var(0.0)};
  };
  p.rhs = [w2](double, const State& s) { return make_state(s[1], -w2 * std::sin(s[0])); };
  attach_energy(p, [w2](std::span<const Jet2<Var>> y) { return 0.5 * square(y[0].du) - w2 * cos(y[0].u); });
  return p;
}

OdeProblem pendulum_system(double omega0, double y0, double v0, double t_end) {
  OdeProblem p = system_form("pendulum-system", y0, v0 / omega0, t_end);
  p.params = {{"omega0", omega0}, {"y0", y0}, {"v0", v0}, {"t_end", t_end}};
  const double w = omega0;
  p.residual = [w](std::span<const Jet2<Var>> y, double) -> Residual {
    return {y[0].du - w * y[1].u, y[1].du + w * sin(y[0].u)};
  };
  p.rhs = [w](double, const State& s) { return make_state(w * s[1], -w * std::sin(s[0])); };
  attach_energy(p, [w2 = w * w](std::span<const Jet2<Var>> y) {
    return w2 * (0.5 * square(y[1].u) - cos(y[0].u));
  });
  return p;
}

OdeProblem anharmonic(double omega0, double y0, double v0, double t_end) {
  OdeProblem p = second_order("anharmonic", y0, v0, t_end);
  p.params = {{"omega0", omega0}, {"y0", y0}, {"v0", v0}, {"t_end", t_end}};
  const double w2 = omega0 * omega0;
  p.residual = [w2](std::span<const Jet2<Var>> y, double) -> Residual {
    return {y[0].ddu + w2 * pow_int(y[0].u, 3), Var(0.0)};
  };
  p.rhs = [w2](double, const State& s) { return make_state(s[1], -w2 * s[0] * s[0] * s[0]); };
  attach_energy(p, [w2](std::span<const Jet2<Var>> y) {
    return 0.5 * square(y[0].du) + (0.25 * w2) * pow_int(y[0].u, 4);
  });
  return p;
}

OdeProblem double_well_system(double omega0, double y0, double v0, double t_end) {
  OdeProblem p = system_form("double-well", y0, v0 / omega0, t_end);
  p.params = {{"omega0", omega0}, {"y0", y0}, {"v0", v0}, {"t_end", t_end}};
  const double w = omega0;
  p.residual = [w](std::span<const Jet2<Var>> y, double) -> Residual {
    return {y[0].du - w * y[1].u, y[1].du + w * (pow_int(y[0].u, 3) - y[0].u)};
  };
  p.rhs = [w](double, const State& s) { return make_state(w * s[1], -w * (s[0] * s[0] * s[0] - s[0])); };
  attach_energy(p, [w2 = w * w](std::span<const Jet2<Var>> y) {
    return w2 * (0.5 * square(y[1].u) + 0.25 * pow_int(y[0].u, 4) - 0.5 * square(y[0].u));
  });
  return p;
}

OdeProblem double_well_scalar(double omega0, double y0, double v0, double t_end) {
  OdeProblem p = second_order("double-well-scalar", y0, v0, t_end);
  p.params = {{"omega0", omega0}, {"y0", y0}, {"v0", v0}, {"t_end", t_end}};
  const double w2 = omega0 * omega0;
  p.residual = [w2](std::span<const Jet2<Var>> y, double) -> Residual {
    return {y[0].ddu + w2 * (pow_int(y[0].u, 3) - y[0].u), Var(0.0)};
  };
  p.rhs = [w2](double, const State& s) { return make_state(s[1], -w2 * (s[0] * s[0] * s[0] - s[0])); };
  attach_energy(p, [w2](std::span<const Jet2<Var>> y) {
    return 0.5 * square(y[0].du) + w2 * (0.25 * pow_int(y[0].u, 4) - 0.5 * square(y[0].u));
  });
  return p;
}

OdeProblem van_der_pol(double omega0, double epsilon, double y0, double v0, double t_end) {
  OdeProblem p = second_order("vdp", y0, v0, t_end);
  p.params = {{"omega0", omega0}, {"epsilon", epsilon}, {"y0", y0}, {"v0", v0}, {"t_end", t_end}};
  const double w2 = omega0 * omega0;
  const double damping = epsilon * omega0;
  p.residual = [=](std::span<const Jet2<Var>> y, double) -> Residual {
    return {y[0].ddu + w2 * y[0].u - damping * ((1.0 - square(y[0].u)) * y[0].du), Var(0.0)};
  };
  p.rhs = [=](double, const State& s) {
    return make_state(s[1], -w2 * s[0] + damping * (1.0 - s[0] * s[0]) * s[1]);
  };
  return p;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"tutorial",   "harmonic",    "pendulum", "pendulum-system",
                                                 "anharmonic", "double-well", "vdp"};
  return names;
}

std::vector<std::string> problem_parameters(const std::string& name) {
  if (name == "tutorial") return {"y0", "t_end"};
  if (name == "vdp") return {"omega0", "epsilon", "y0", "v0", "t_end"};
  for (const auto& n : problem_names()) {
    if (n == name) return {"omega0", "y0", "v0", "t_end"};
  }
  throw ConfigError("unknown problem '" + name + "'");
}

OdeProblem make_problem(const std::string& name, const std::map<std::string, double>& params) {
  const auto allowed = problem_parameters(name);
  for (const auto& [key, value] : params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("problem " + name + " does not accept parameter '" + key + "'");
    }
    if (!std::isfinite(value)) throw ConfigError("problem parameter '" + key + "' must be finite");
  }
  auto get = [&](const char* key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  OdeProblem p;
  if (name == "tutorial") p = tutorial(get("y0", 1.0), get("t_end", 30.0));
  else if (name == "harmonic") p = harmonic(get("omega0", 20.0), get("y0", 1.0), get("v0", 0.0), get("t_end", 1.0));
  else if (name == "pendulum")
    p = pendulum_scalar(get("omega0", 25.0), get("y0", 0.1), get("v0", 40.0), get("t_end", 1.0));
  else if (name == "pendulum-system")
    p = pendulum_system(get("omega0", 25.0), get("y0", 0.1), get("v0", 40.0), get("t_end", 1.0));
  else if (name == "anharmonic")
    p = anharmonic(get("omega0", 15.5), get("y0", 1.5), get("v0", 0.0), get("t_end", 1.0));
  else if (name == "double-well")
    p = double_well_system(get("omega0", 12.0), get("y0", 1.8), get("v0", 0.0), get("t_end", 1.0));
  else
    p = van_der_pol(get("omega0", 15.0), get("epsilon", 1.0), get("y0", 1.0), get("v0", 0.0), get("t_end", 1.5));
  if (!(p.t_end > p.t0)) throw ConfigError("problem t_end must exceed t0");
  if (name != "tutorial" && p.param("omega0") <= 0.0) throw ConfigError("omega0 must be positive");
  return p;
}

}  // namespace pinn
