#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pinn/autodiff.hpp"
#include "pinn/evaluation.hpp"
#include "pinn/integrators.hpp"
#include "pinn/network.hpp"
#include "pinn/problems.hpp"

namespace pinn {

struct LossWeights {
  double data = 1.0;
  double boundary = 0.0;  // no boundary set exists for ODEs; must stay 0
  double physics = 0.0;
  double energy = 0.0;
};

struct TrainingConfig {
  std::size_t n_data = 1;  // time samples; system problems contribute dim values per sample
  std::optional<Interval> data_interval;  // whole domain when unset
  std::size_t n_c = 50;
  std::optional<Interval> collocation_interval;
  double eta = 3e-3;
  std::size_t n_epochs = 20000;
  LossWeights weights;
  MlpConfig network;  // output_dim is taken from the problem; seed from `seed`
  bool normalize_input = true;  // map the problem domain onto [-1, 1] before the first layer
  std::uint64_t seed = 1;
  std::size_t mse_every = 100;  // 0 disables MSE telemetry
  std::size_t n_eval = 1000;

  /// Throws ConfigError for anything inconsistent with the problem.
  void validate(const OdeProblem& problem) const;
  Interval data_range(const OdeProblem& problem) const;
  Interval collocation_range(const OdeProblem& problem) const;
  /// Network configuration actually trained: output_dim from the problem, seed from the config,
  /// input map from the domain when normalize_input is set.
  MlpConfig network_for(const OdeProblem& problem) const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double l_data = 0.0;
  double l_b = 0.0;
  double l_f = 0.0;
  double l_e = 0.0;
  double l_total = 0.0;
  std::optional<double> mse;
};

/// The weighted recombination that l_total must equal, in recording order.
double recombine(const EpochRecord& record, const LossWeights& weights);

// ---------------------------------------------------------------------------
// Loss terms on a tape. `params` are the network parameters as Vars in
// canonical order: tape leaves for differentiation, or plain constants for
// value-only evaluation.

Var loss_data(const Mlp& mlp, std::span<const Var> params, const TrainingData& data);
Var loss_physics(const Mlp& mlp, std::span<const Var> params, const OdeProblem& problem,
                 std::span<const double> collocation);
Var loss_energy(const Mlp& mlp, std::span<const Var> params, const OdeProblem& problem,
                std::span<const double> collocation);

struct LossEvaluation {
  Var total;
  EpochRecord record;
};

LossEvaluation loss_total(const Mlp& mlp, std::span<const Var> params, const OdeProblem& problem,
                          const TrainingData& data, std::span<const double> collocation, const LossWeights& weights);

/// Parameters as tape-less constants, for plain loss evaluation.
std::vector<Var> constant_parameters(const Mlp& mlp);

// The same terms from output predictions and jets, shared by both gradient engines.
Var data_term(std::span<const std::vector<Var>> predictions, const TrainingData& data);
Var physics_term(const OdeProblem& problem, std::span<const std::vector<Jet2<Var>>> jets,
                 std::span<const double> collocation);
Var energy_term(const OdeProblem& problem, std::span<const std::vector<Jet2<Var>>> jets);

// ---------------------------------------------------------------------------

enum class GradientEngine {
  Batched,  // Eigen jet batch for the network, tape only for the loss over output jets
  Tape,     // every parameter a tape leaf, scalar jets through the whole network
};

struct LossGradient {
  EpochRecord record;
  Eigen::VectorXd gradient;  // canonical parameter order
};

LossGradient loss_gradient(const Mlp& mlp, const OdeProblem& problem, const TrainingData& data,
                           std::span<const double> collocation, const LossWeights& weights,
                           GradientEngine engine = GradientEngine::Batched);

struct AdamState {
  explicit AdamState(std::size_t n)
      : m(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))), v(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))) {}

  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::size_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
};

/// One bias-corrected Adam update of params in place. A non-finite gradient
/// component throws NumericalError naming the component and leaves params untouched.
void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grad, double eta);

enum class TrainingStatus { Completed, Aborted };

struct TrainingOptions {
  const Oracle* oracle = nullptr;  // built internally when null
  GradientEngine engine = GradientEngine::Batched;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainingResult {
  Mlp network;
  std::vector<EpochRecord> history;
  TrainingStatus status = TrainingStatus::Completed;
  std::string diagnostic;
  double final_mse = 0.0;
  double constant_predictor_mse = 0.0;
  TrainingData data;
  std::vector<double> collocation;
};

/// Runs exactly config.n_epochs full-batch Adam epochs. Record e holds the
/// losses at the parameters before update e. Non-finite losses or gradients
/// stop training and return the last finite parameters with status Aborted.
TrainingResult train(const OdeProblem& problem, const TrainingConfig& config, const TrainingOptions& options = {});

/// Header plus one row per record: epoch,l_data,l_f,l_e,l_total,mse
void write_epochs_csv(std::span<const EpochRecord> history, std::ostream& out);

}  // namespace pinn
