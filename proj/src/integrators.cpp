#include "pinn/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "pinn/errors.hpp"
#include "pinn/csv.hpp"

namespace pinn {
namespace {

template <class Step>
Trajectory integrate(const OdeProblem& problem, double dt, Step step) {
  const double span = problem.t_end - problem.t0;
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
  if (!(dt < span)) throw ConfigError("time step must be smaller than the domain length");
  const auto steps = static_cast<Eigen::Index>(std::ceil(span / dt - 1e-9));
  const double h = span / static_cast<double>(steps);

  Trajectory traj;
  traj.times.resize(steps + 1);
  traj.states.resize(steps + 1, problem.state_dim());
  State y = problem.initial_state;
  traj.times[0] = problem.t0;
  traj.states.row(0) = y.transpose();
  for (Eigen::Index i = 1; i <= steps; ++i) {
    const double t = problem.t0 + static_cast<double>(i - 1) * h;
    y = step(t, y, h);
    if (!y.allFinite()) {
      throw NumericalError("non-finite state at step " + std::to_string(i) + "; last valid index " +
                           std::to_string(i - 1));
    }
    traj.times[i] = i == steps ? problem.t_end : problem.t0 + static_cast<double>(i) * h;
    traj.states.row(i) = y.transpose();
  }
  return traj;
}

}  // namespace

Trajectory rk2_integrate(const OdeProblem& problem, double dt) {
  return integrate(problem, dt, [&](double t, const State& y, double h) -> State {
    const State k1 = problem.rhs(t, y);
    const State k2 = problem.rhs(t + 0.5 * h, y + 0.5 * h * k1);
    return y + h * k2;
  });
}

Trajectory rk4_integrate(const OdeProblem& problem, double dt) {
  return integrate(problem, dt, [&](double t, const State& y, double h) -> State {
    const State k1 = problem.rhs(t, y);
    const State k2 = problem.rhs(t + 0.5 * h, y + 0.5 * h * k1);
    const State k3 = problem.rhs(t + 0.5 * h, y + 0.5 * h * k2);
    const State k4 = problem.rhs(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  });
}

// ---------------------------------------------------------------------------

Oracle::Oracle(const OdeProblem& problem, double max_step) : problem_(&problem) {
  if (!problem.has_exact()) {
    dense_ = rk4_integrate(problem, max_step);
    step_ = dense_.times[1] - dense_.times[0];
  }
}

State Oracle::state(double t) const {
  if (dense_.size() == 0) throw StructuralError("closed-form oracle keeps no integrator state");
  const OdeProblem& p = *problem_;
  const double span = p.t_end - p.t0;
  if (t < p.t0 - 1e-12 * span || t > p.t_end + 1e-12 * span) {
    throw ConfigError("oracle queried outside the problem domain");
  }
  const Eigen::Index last = dense_.size() - 1;
  auto i = static_cast<Eigen::Index>(std::floor((t - p.t0) / step_));
  i = std::clamp<Eigen::Index>(i, 0, last - 1);
  const double t0 = dense_.times[i];
  const double t1 = dense_.times[i + 1];
  const double h = t1 - t0;
  const double s = std::clamp((t - t0) / h, 0.0, 1.0);
  const State y0 = dense_.state(i);
  const State y1 = dense_.state(i + 1);
  const State d0 = p.rhs(t0, y0);
  const State d1 = p.rhs(t1, y1);
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

State Oracle::operator()(double t) const {
  if (problem_->has_exact()) return problem_->exact(t);
  return problem_->outputs_from_state(state(t));
}

Eigen::MatrixXd Oracle::evaluate(std::span<const double> times) const {
  Eigen::MatrixXd out(problem_->dim, static_cast<Eigen::Index>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = (*this)(times[i]);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> uniform_points(std::size_t n, const Interval& interval) {
  std::vector<double> pts(n);
  if (n == 0) return pts;
  pts[0] = interval.lo;
  if (n == 1) return pts;
  const double span = interval.length();
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 1; i + 1 < n; ++i) pts[i] = interval.lo + span * (static_cast<double>(i) / denom);
  pts[n - 1] = interval.hi;
  return pts;
}

namespace {

void check_interval(const Interval& interval, const Interval& domain, const char* what) {
  if (!(interval.hi >= interval.lo)) throw ConfigError(std::string(what) + " interval is reversed");
  if (!domain.contains(interval)) throw ConfigError(std::string(what) + " interval lies outside the problem domain");
}

}  // namespace

TrainingData sample_training_data(const Oracle& oracle, std::size_t n_data, const Interval& interval) {
  if (n_data == 0) throw ConfigError("training.n_data must be >= 1");
  check_interval(interval, domain_of(oracle.problem()), "data");
  TrainingData data;
  data.times = uniform_points(n_data, interval);
  data.values = oracle.evaluate(data.times);
  return data;
}

std::vector<double> sample_collocation(std::size_t n_c, const Interval& interval, const Interval& domain) {
  if (n_c == 0) throw ConfigError("training.n_c must be >= 1");
  check_interval(interval, domain, "collocation");
  return uniform_points(n_c, interval);
}

void write_trajectory_csv(const OdeProblem& problem, const Trajectory& trajectory, std::ostream& out) {
  out << (problem.dim == 2 ? "t,y1,y2\n" : "t,y1\n");
  for (Eigen::Index i = 0; i < trajectory.size(); ++i) {
    const State y = problem.outputs_from_state(trajectory.state(i));
    out << format_real(trajectory.times[i]);
    for (Eigen::Index k = 0; k < y.size(); ++k) out << ',' << format_real(y[k]);
    out << '\n';
  }
}

}  // namespace pinn
