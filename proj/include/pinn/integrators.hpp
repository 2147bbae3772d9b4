#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <vector>

#include "pinn/problems.hpp"

namespace pinn {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
  bool contains(const Interval& other) const { return other.lo >= lo && other.hi <= hi; }
};

inline Interval domain_of(const OdeProblem& p) { return {p.t0, p.t_end}; }

/// Fixed-step solution on a uniform grid; one state row per time.
struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd states;  // times.size() x state_dim

  Eigen::Index size() const { return times.size(); }
  State state(Eigen::Index i) const { return states.row(i).transpose(); }
};

/// Midpoint (order 2) and classical four-stage (order 4) Runge-Kutta over the
/// whole problem domain. The step actually used is span / ceil(span / dt), so
/// the final time is hit exactly. Requires 0 < dt < span; non-finite states
/// throw NumericalError naming the last valid index.
Trajectory rk2_integrate(const OdeProblem& problem, double dt);
Trajectory rk4_integrate(const OdeProblem& problem, double dt);

/// Reference solution: the closed form when the problem has one, otherwise a
/// dense RK4 trajectory (step <= max_step) read through cubic Hermite
/// interpolation using the right-hand side as node derivatives.
class Oracle {
 public:
  explicit Oracle(const OdeProblem& problem, double max_step = 1e-5);

  bool closed_form() const { return problem_->has_exact(); }
  const OdeProblem& problem() const { return *problem_; }

  /// Network-output values at t.
  State operator()(double t) const;
  /// dim x times.size()
  Eigen::MatrixXd evaluate(std::span<const double> times) const;
  /// Integrator state at t (interpolated; closed-form problems still use RK4 here).
  State state(double t) const;

 private:
  const OdeProblem* problem_;
  Trajectory dense_;
  double step_ = 0.0;
};

/// n points spread uniformly over interval, both endpoints included; a single
/// point sits at the interval start.
std::vector<double> uniform_points(std::size_t n, const Interval& interval);

struct TrainingData {
  std::vector<double> times;
  Eigen::MatrixXd values;  // dim x times.size()
};

TrainingData sample_training_data(const Oracle& oracle, std::size_t n_data, const Interval& interval);
std::vector<double> sample_collocation(std::size_t n_c, const Interval& interval, const Interval& domain);

/// CSV with header t,y1[,y2]: the network-output view of every state.
void write_trajectory_csv(const OdeProblem& problem, const Trajectory& trajectory, std::ostream& out);

}  // namespace pinn
