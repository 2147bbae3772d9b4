#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "pinn/integrators.hpp"
#include "pinn/network.hpp"

namespace pinn {

/// Mean of squared entry-wise differences; output variables are pooled.
double mean_squared_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Oracle values on n uniform points, computed once and reused for every MSE query.
class EvaluationGrid {
 public:
  EvaluationGrid(const Oracle& oracle, std::size_t n_eval = 1000, std::optional<Interval> interval = std::nullopt);

  const std::vector<double>& times() const { return times_; }
  const Eigen::MatrixXd& reference() const { return reference_; }

  double mse(const Mlp& mlp) const;
  /// MSE of the best constant predictor (per-output mean), i.e. the pooled variance.
  double constant_predictor_mse() const;

 private:
  std::vector<double> times_;
  Eigen::MatrixXd reference_;
};

/// MSE between the network and the oracle on n_eval uniform points of the
/// interval (whole problem domain by default).
double evaluate_mse(const Mlp& mlp, const Oracle& oracle, std::size_t n_eval = 1000,
                    std::optional<Interval> interval = std::nullopt);

}  // namespace pinn
