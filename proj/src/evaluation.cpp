#include "pinn/evaluation.hpp"

#include "pinn/errors.hpp"

namespace pinn {

double mean_squared_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw StructuralError("MSE operands differ in shape");
  if (a.size() == 0) throw StructuralError("MSE of an empty set");
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

EvaluationGrid::EvaluationGrid(const Oracle& oracle, std::size_t n_eval, std::optional<Interval> interval) {
  if (n_eval == 0) throw ConfigError("n_eval must be >= 1");
  const Interval domain = domain_of(oracle.problem());
  const Interval range = interval.value_or(domain);
  if (!domain.contains(range)) throw ConfigError("evaluation interval lies outside the problem domain");
  times_ = uniform_points(n_eval, range);
  reference_ = oracle.evaluate(times_);
}

double EvaluationGrid::mse(const Mlp& mlp) const { return mean_squared_difference(mlp.forward_batch(times_), reference_); }

double EvaluationGrid::constant_predictor_mse() const {
  const Eigen::VectorXd mean = reference_.rowwise().mean();
  return (reference_.colwise() - mean).squaredNorm() / static_cast<double>(reference_.size());
}

double evaluate_mse(const Mlp& mlp, const Oracle& oracle, std::size_t n_eval, std::optional<Interval> interval) {
  return EvaluationGrid(oracle, n_eval, interval).mse(mlp);
}

}  // namespace pinn
