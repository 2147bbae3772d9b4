#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pinn/errors.hpp"
#include "pinn/integrators.hpp"
#include "pinn/problems.hpp"
#include "support.hpp"

using namespace pinn;
using std::numbers::pi;

namespace {

std::vector<Jet2<double>> constant_outputs(std::initializer_list<double> values) {
  std::vector<Jet2<double>> y;
  for (double v : values) y.push_back(constant_jet(v));
  return y;
}

/// Output jets of the oracle at t: values from the oracle, derivatives from the right-hand side.
std::vector<Jet2<double>> oracle_jets(const OdeProblem& p, const Oracle& o, double t) {
  return p.jets_from_state(t, o.state(t));
}

}  // namespace

TEST_SUITE("problems") {

TEST_CASE("tutorial") {
  const OdeProblem p = tutorial();
  CHECK(p.t0 == 0.0);
  CHECK(p.t_end == 30.0);
  CHECK(p.exact(0.0)[0] == 1.0);
  CHECK(p.exact(30.0)[0] == doctest::Approx(1 + 4 / pi - 45).epsilon(1e-14));
  CHECK(p.residual_value(p.jets_from_state(0.0, p.initial_state), 0.0)[0] == 0.0);
  CHECK(p.residual_value(constant_outputs({1.0}), 0.0)[0] == 0.0);
  // Zero network at t = 1: 0 + 0.1 - sin(pi / 2).
  CHECK(p.residual_value(constant_outputs({0.0}), 1.0)[0] == doctest::Approx(-0.9).epsilon(1e-15));
  CHECK_FALSE(p.has_energy());
}

TEST_CASE("closed forms satisfy their residuals") {
  std::mt19937_64 rng(3);
  const OdeProblem tut = tutorial();
  const OdeProblem har = harmonic(20.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double t = 30.0 * u(rng);
    const std::vector<Jet2<double>> y{
        {tut.exact(t)[0], -0.1 * t + std::sin(pi * t / 2), -0.1 + (pi / 2) * std::cos(pi * t / 2)}};
    CHECK(std::abs(tut.residual_value(y, t)[0]) <= 1e-10);

    const double s = u(rng);
    const std::vector<Jet2<double>> z{{har.exact(s)[0], -20 * std::sin(20 * s), -400 * std::cos(20 * s)}};
    CHECK(std::abs(har.residual_value(z, s)[0]) <= 1e-10);
  }
}

TEST_CASE("harmonic") {
  const OdeProblem p = harmonic(20.0);
  CHECK(p.exact(0.0)[0] == 1.0);
  CHECK(p.reference_energy == 200.0);
  for (double t : {0.0, 0.13, 0.5, 0.97}) {
    const std::vector<Jet2<double>> y{{std::cos(20 * t), -20 * std::sin(20 * t), -400 * std::cos(20 * t)}};
    CHECK(p.energy_value(y) == doctest::Approx(200.0).epsilon(1e-12));
  }
  CHECK(p.energy_value(constant_outputs({1.0})) == p.reference_energy);
}

TEST_CASE("pendulum forms") {
  const OdeProblem s = pendulum_scalar();
  const OdeProblem sys = pendulum_system();
  CHECK(sys.initial_state[1] == 1.6);
  CHECK(sys.reference_energy == doctest::Approx(625 * (1.28 - std::cos(0.1))).epsilon(1e-14));
  CHECK(s.reference_energy == doctest::Approx(0.5 * 1600 - 625 * std::cos(0.1)).epsilon(1e-14));

  const Trajectory a = rk4_integrate(s, 1e-5);
  const Trajectory b = rk4_integrate(sys, 1e-5);
  REQUIRE(a.size() == b.size());
  CHECK((a.states.col(0) - b.states.col(0)).cwiseAbs().maxCoeff() <= 1e-8);

  const OdeProblem small = pendulum_scalar(25.0, 1e-4, 0.0);
  const Trajectory c = rk4_integrate(small, 1e-4);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    worst = std::max(worst, std::abs(c.states(i, 0) - 1e-4 * std::cos(25 * c.times[i])));
  }
  CHECK(worst / 1e-4 <= 1e-4);
}

TEST_CASE("oracle residuals and energy drift") {
  for (const OdeProblem& p : {pendulum_scalar(), pendulum_system(), anharmonic(), double_well_system(),
                              double_well_system(12.0, 1.38), van_der_pol(15.0, 1.0)}) {
    const Oracle o(p);
    double worst_residual = 0.0;
    double worst_drift = 0.0;
    for (double t : uniform_points(201, domain_of(p))) {
      const auto y = oracle_jets(p, o, t);
      if (p.form == OdeForm::SecondOrder) {
        // The second derivative comes from the right-hand side, so check the
        // residual on the interpolated value against a stencil instead.
        auto f = [&](double s) { return o(s)[0]; };
        const double h = 5e-4;
        if (t - 2 * h >= p.t0 && t + 2 * h <= p.t_end) {
          std::vector<Jet2<double>> j{{f(t), test::stencil_first(f, t, h), test::stencil_second(f, t, h)}};
          const double scale = p.param("omega0") * p.param("omega0");
          worst_residual = std::max(worst_residual, std::abs(p.residual_value(j, t)[0]) / scale);
        }
      } else {
        auto f = [&](int k) { return [&, k](double s) { return o(s)[k]; }; };
        const double h = 5e-4;
        if (t - 2 * h >= p.t0 && t + 2 * h <= p.t_end) {
          std::vector<Jet2<double>> j;
          for (int k = 0; k < p.dim; ++k) j.push_back({f(k)(t), test::stencil_first(f(k), t, h), 0.0});
          // System residuals carry one factor of omega0.
          const auto r = p.residual_value(j, t);
          worst_residual = std::max({worst_residual, std::abs(r[0]) / p.param("omega0"), std::abs(r[1]) / p.param("omega0")});
        }
      }
      if (p.has_energy()) {
        worst_drift = std::max(worst_drift, std::abs(p.energy_value(y) - p.reference_energy) /
                                                std::abs(p.reference_energy));
      }
    }
    INFO(p.name);
    CHECK(worst_residual <= 1e-6);
    if (p.has_energy()) CHECK(worst_drift <= 1e-8);
  }
}

TEST_CASE("equilibria") {
  const OdeProblem a = anharmonic();
  CHECK(a.residual_value(constant_outputs({0.0}), 0.3)[0] == 0.0);
  const OdeProblem d = double_well_system();
  for (double y1 : {0.0, 1.0, -1.0}) {
    const auto r = d.residual_value(constant_outputs({y1, 0.0}), 0.2);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 0.0);
  }
}

TEST_CASE("double well energies") {
  const OdeProblem d = double_well_system(12.0, 1.8);
  CHECK(d.reference_energy == doctest::Approx(144 * (2.6244 - 1.62)).epsilon(1e-13));
  const OdeProblem sep = double_well_system(12.0, std::sqrt(2.0));
  CHECK(std::abs(sep.reference_energy) <= 1e-12);
  // Scalar second-order form agrees with the system.
  const Trajectory a = rk4_integrate(double_well_scalar(), 1e-5);
  const Trajectory b = rk4_integrate(d, 1e-5);
  CHECK((a.states.col(0) - b.states.col(0)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("van der pol") {
  const OdeProblem h = harmonic(15.0, 1.0, 0.0, 1.5);
  const OdeProblem v = van_der_pol(15.0, 0.0);
  const Trajectory a = rk4_integrate(h, 1e-4);
  const Trajectory b = rk4_integrate(v, 1e-4);
  CHECK((a.states - b.states).cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(v.has_energy());

  // Limit-cycle amplitude for eps = 5: peak |y| over the last part of a long run.
  const OdeProblem longrun = van_der_pol(15.0, 5.0, 1.0, 0.0, 6.0);
  const Trajectory t = rk4_integrate(longrun, 1e-4);
  double amp = 0.0;
  for (Eigen::Index i = t.size() / 2; i < t.size(); ++i) amp = std::max(amp, std::abs(t.states(i, 0)));
  CHECK(amp == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("registry") {
  CHECK(problem_names().size() == 7);
  for (const std::string& name : problem_names()) CHECK(make_problem(name).name == name);
  CHECK(make_problem("harmonic", {{"omega0", 10.0}}).param("omega0") == 10.0);
  CHECK(make_problem("vdp", {{"epsilon", 5.0}, {"t_end", 3.0}}).t_end == 3.0);
  CHECK_THROWS_AS(make_problem("nosuch"), ConfigError);
  CHECK_THROWS_AS(make_problem("harmonic", {{"epsilon", 1.0}}), ConfigError);
  CHECK_THROWS_AS(make_problem("harmonic", {{"omega0", -1.0}}), ConfigError);
}

}  // TEST_SUITE
