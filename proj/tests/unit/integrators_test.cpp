#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pinn/errors.hpp"
#include "pinn/evaluation.hpp"
#include "pinn/integrators.hpp"
#include "pinn/problems.hpp"
#include "support.hpp"

using namespace pinn;

namespace {

double max_error_vs_cos(const Trajectory& t, double w) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(t.states(i, 0) - std::cos(w * t.times[i])));
  return worst;
}

double observed_order(Trajectory (*method)(const OdeProblem&, double), double dt) {
  const OdeProblem p = harmonic(20.0);
  const double e1 = max_error_vs_cos(method(p, dt), 20.0);
  const double e2 = max_error_vs_cos(method(p, dt / 2), 20.0);
  return std::log2(e1 / e2);
}

}  // namespace

TEST_SUITE("integrators") {

TEST_CASE("steady state stays put") {
  OdeProblem p = tutorial();
  p.rhs = [](double, const State& s) -> State { return State::Zero(s.size()); };
  for (const Trajectory& t : {rk2_integrate(p, 0.1), rk4_integrate(p, 0.1)}) {
    CHECK(t.states.col(0).isConstant(1.0, 0.0));
  }
}

TEST_CASE("convergence orders on the harmonic oscillator") {
  CHECK(observed_order(rk2_integrate, 1e-3) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(observed_order(rk4_integrate, 1e-3) == doctest::Approx(4.0).epsilon(0.075));
  CHECK(max_error_vs_cos(rk4_integrate(harmonic(20.0), 1e-4), 20.0) <= 1e-8);
}

TEST_CASE("tutorial against its closed form") {
  const OdeProblem p = tutorial();
  const Trajectory rk2 = rk2_integrate(p, 1e-3);
  CHECK(std::abs(rk2.states(rk2.size() - 1, 0) - p.exact(30.0)[0]) <= 1e-3);
  const Trajectory rk4 = rk4_integrate(p, 1e-4);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < rk4.size(); ++i) worst = std::max(worst, std::abs(rk4.states(i, 0) - p.exact(rk4.times[i])[0]));
  CHECK(worst <= 1e-6);
  CHECK(rk4.times[rk4.size() - 1] == 30.0);
}

TEST_CASE("van der pol relaxation shape is step-converged") {
  const OdeProblem p = van_der_pol(15.0, 5.0, 1.0, 0.0, 3.0);
  auto features = [&](double dt) {
    const Trajectory t = rk4_integrate(p, dt);
    double amp = 0.0;
    std::vector<double> crossings;
    for (Eigen::Index i = 1; i < t.size(); ++i) {
      amp = std::max(amp, std::abs(t.states(i, 0)));
      const double a = t.states(i - 1, 0), b = t.states(i, 0);
      if (a > 0 && b <= 0) crossings.push_back(t.times[i - 1] + (t.times[i] - t.times[i - 1]) * a / (a - b));
    }
    REQUIRE(crossings.size() >= 2);
    return std::pair{amp, crossings[crossings.size() - 1] - crossings[crossings.size() - 2]};
  };
  const auto [a1, p1] = features(2e-4);
  const auto [a2, p2] = features(1e-4);
  CHECK(std::abs(a1 - a2) / a2 <= 1e-3);
  CHECK(std::abs(p1 - p2) / p2 <= 1e-3);
}

TEST_CASE("step validation") {
  const OdeProblem p = harmonic();
  CHECK_THROWS_AS(rk4_integrate(p, 0.0), ConfigError);
  CHECK_THROWS_AS(rk4_integrate(p, -1e-3), ConfigError);
  CHECK_THROWS_AS(rk4_integrate(p, 2.0), ConfigError);
  OdeProblem blow = tutorial();
  blow.rhs = [](double, const State& s) -> State { return s.array().square() * 1e3; };
  CHECK_THROWS_AS(rk4_integrate(blow, 0.5), NumericalError);
}

TEST_CASE("oracle") {
  const OdeProblem h = harmonic(20.0);
  const Oracle exact(h);
  CHECK(exact.closed_form());
  CHECK(exact(0.37)[0] == std::cos(20 * 0.37));

  const OdeProblem p = pendulum_scalar();
  const Oracle o(p);
  CHECK_FALSE(o.closed_form());
  CHECK(o(0.0)[0] == 0.1);
  // Hermite reads between grid nodes agree with a direct fine integration.
  const Trajectory fine = rk4_integrate(p, 1e-6);
  for (Eigen::Index i : {Eigen::Index{123457}, Eigen::Index{654321}}) {
    CHECK(std::abs(o(fine.times[i])[0] - fine.states(i, 0)) <= 1e-9);
  }
}

TEST_CASE("sampling") {
  const OdeProblem p = tutorial();
  const Oracle o(p);
  const TrainingData one = sample_training_data(o, 1, domain_of(p));
  REQUIRE(one.times.size() == 1);
  CHECK(one.times[0] == 0.0);
  CHECK(one.values(0, 0) == 1.0);

  const TrainingData dense = sample_training_data(o, 101, domain_of(p));
  CHECK(dense.times[1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(dense.times.back() == 30.0);

  const TrainingData left = sample_training_data(o, 61, {0.0, 18.0});
  CHECK(left.times.back() == 18.0);
  CHECK(left.times[1] == doctest::Approx(0.3).epsilon(1e-15));

  const std::vector<double> c50 = sample_collocation(50, domain_of(p), domain_of(p));
  CHECK(c50.size() == 50);
  CHECK(c50.front() == 0.0);
  CHECK(c50.back() == 30.0);
  CHECK(sample_collocation(2, {0.0, 1.0}, {0.0, 1.0}) == std::vector<double>{0.0, 1.0});
  for (double t : sample_collocation(30, {18.0, 30.0}, domain_of(p))) CHECK(t >= 18.0);

  CHECK_THROWS_AS(sample_collocation(0, domain_of(p), domain_of(p)), ConfigError);
  CHECK_THROWS_AS(sample_collocation(5, {20.0, 40.0}, domain_of(p)), ConfigError);
  CHECK_THROWS_AS(sample_training_data(o, 0, domain_of(p)), ConfigError);
}

TEST_CASE("trajectory csv") {
  std::ostringstream out;
  write_trajectory_csv(pendulum_system(), rk4_integrate(pendulum_system(), 0.5 - 1e-12), out);
  CHECK(out.str().starts_with("t,y1,y2\n0,0.1,1.6\n"));
}

}  // TEST_SUITE

TEST_SUITE("evaluation") {

TEST_CASE("mse against the oracle") {
  const OdeProblem h = harmonic(20.0);
  const Oracle o(h);
  const EvaluationGrid grid(o);
  CHECK(grid.times().size() == 1000);

  MlpConfig c;
  c.hidden_layers = 1;
  c.neurons_per_layer = 2;
  Mlp zero(c);
  zero.assign(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(zero.parameter_count())));
  const double analytic = 0.5 + std::sin(40.0) / 80.0;
  CHECK(grid.mse(zero) == doctest::Approx(analytic).epsilon(2e-3));
  CHECK(mean_squared_difference(grid.reference(), grid.reference()) == 0.0);

  // Symmetric in its arguments.
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(2, 7), b = Eigen::MatrixXd::Random(2, 7);
  CHECK(mean_squared_difference(a, b) == mean_squared_difference(b, a));

  // One point at t0 with the initial value off by 0.25.
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(zero.parameter_count()));
  theta[theta.size() - 1] = 1.25;
  zero.assign(theta);
  CHECK(evaluate_mse(zero, o, 1) == 0.0625);
}

TEST_CASE("restricted interval and constant predictor") {
  const OdeProblem p = tutorial();
  const Oracle o(p);
  const EvaluationGrid right(o, 1000, Interval{18.0, 30.0});
  CHECK(right.times().front() == 18.0);
  CHECK(right.times().back() == 30.0);
  const Eigen::RowVectorXd y = right.reference().row(0);
  const double var = (y.array() - y.mean()).square().mean();
  CHECK(right.constant_predictor_mse() == doctest::Approx(var).epsilon(1e-12));
}

}  // TEST_SUITE
