#include "pinn/training.hpp"

#include <cmath>
#include <ostream>

#include "pinn/csv.hpp"
#include "pinn/errors.hpp"

namespace pinn {
namespace {

void check_weight(double w, const char* name) {
  if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError(std::string("weights.") + name + " must be finite and >= 0");
}

void check_collocation(const OdeProblem& problem, std::span<const double> collocation) {
  const Interval domain = domain_of(problem);
  for (double t : collocation) {
    if (!domain.contains(t)) throw ConfigError("collocation point " + format_real(t) + " lies outside the domain");
  }
}

LossEvaluation assemble(const OdeProblem& problem, std::span<const std::vector<Var>> predictions,
                        std::span<const std::vector<Jet2<Var>>> jets, const TrainingData& data,
                        std::span<const double> collocation, const LossWeights& weights) {
  const Var l_data = data_term(predictions, data);
  const Var l_b(0.0);
  const Var l_f = weights.physics > 0.0 ? physics_term(problem, jets, collocation) : Var(0.0);
  const Var l_e = weights.energy > 0.0 ? energy_term(problem, jets) : Var(0.0);

  Var total = weights.data * l_data;
  total = total + weights.boundary * l_b;
  total = total + weights.physics * l_f;
  total = total + weights.energy * l_e;

  LossEvaluation out{total, {}};
  out.record.l_data = l_data.value();
  out.record.l_b = l_b.value();
  out.record.l_f = l_f.value();
  out.record.l_e = l_e.value();
  out.record.l_total = total.value();
  return out;
}

LossGradient batched_gradient(const Mlp& mlp, const OdeProblem& problem, const TrainingData& data,
                              std::span<const double> collocation, const LossWeights& weights) {
  const bool need_jets = weights.physics > 0.0 || weights.energy > 0.0;
  const auto n_data = static_cast<Eigen::Index>(data.times.size());
  const auto n_c = need_jets ? static_cast<Eigen::Index>(collocation.size()) : Eigen::Index{0};
  const int dim = problem.dim;

  std::vector<double> times(data.times);
  if (need_jets) times.insert(times.end(), collocation.begin(), collocation.end());
  const JetBatch batch(mlp, times, need_jets ? 2 : 0);

  Tape tape;
  tape.reserve(static_cast<std::size_t>((n_data + 3 * n_c) * dim * 8));
  std::vector<std::vector<Var>> predictions(static_cast<std::size_t>(n_data));
  for (Eigen::Index i = 0; i < n_data; ++i) {
    for (int k = 0; k < dim; ++k) predictions[static_cast<std::size_t>(i)].push_back(tape.variable(batch.value()(k, i)));
  }
  std::vector<std::vector<Jet2<Var>>> jets(static_cast<std::size_t>(n_c));
  for (Eigen::Index j = 0; j < n_c; ++j) {
    const Eigen::Index col = n_data + j;
    for (int k = 0; k < dim; ++k) {
      jets[static_cast<std::size_t>(j)].push_back({tape.variable(batch.value()(k, col)),
                                                   tape.variable(batch.first()(k, col)),
                                                   tape.variable(batch.second()(k, col))});
    }
  }

  LossEvaluation eval = assemble(problem, predictions, jets, data, collocation, weights);
  LossGradient out{eval.record, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mlp.parameter_count()))};
  if (eval.total.is_constant()) return out;

  const Gradient g = tape.backward(eval.total);
  const Eigen::Index cols = batch.size();
  Eigen::MatrixXd bar_value = Eigen::MatrixXd::Zero(dim, cols);
  Eigen::MatrixXd bar_first = Eigen::MatrixXd::Zero(dim, cols);
  Eigen::MatrixXd bar_second = Eigen::MatrixXd::Zero(dim, cols);
  for (Eigen::Index i = 0; i < n_data; ++i) {
    for (int k = 0; k < dim; ++k) bar_value(k, i) = g[predictions[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]];
  }
  for (Eigen::Index j = 0; j < n_c; ++j) {
    for (int k = 0; k < dim; ++k) {
      const Jet2<Var>& jet = jets[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      bar_value(k, n_data + j) = g[jet.u];
      bar_first(k, n_data + j) = g[jet.du];
      bar_second(k, n_data + j) = g[jet.ddu];
    }
  }
  out.gradient = batch.backward(bar_value, bar_first, bar_second);
  return out;
}

LossGradient tape_gradient(const Mlp& mlp, const OdeProblem& problem, const TrainingData& data,
                           std::span<const double> collocation, const LossWeights& weights) {
  Tape tape;
  const std::vector<Var> params = mlp.bind(tape);
  LossEvaluation eval = loss_total(mlp, params, problem, data, collocation, weights);
  LossGradient out{eval.record, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mlp.parameter_count()))};
  if (eval.total.is_constant()) return out;
  const Gradient g = tape.backward(eval.total);
  for (std::size_t i = 0; i < params.size(); ++i) out.gradient[static_cast<Eigen::Index>(i)] = g[params[i]];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void TrainingConfig::validate(const OdeProblem& problem) const {
  if (n_data < 1) throw ConfigError("training.n_data must be >= 1");
  if (n_c < 1) throw ConfigError("training.n_c must be >= 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("training.eta must be positive");
  check_weight(weights.data, "data");
  check_weight(weights.boundary, "boundary");
  check_weight(weights.physics, "physics");
  check_weight(weights.energy, "energy");
  if (weights.boundary != 0.0) throw ConfigError("weights.boundary must be 0: ODE problems have no boundary set");
  if (weights.energy > 0.0 && !problem.has_energy()) {
    throw ConfigError("weights.energy must be 0: problem " + problem.name + " has no energy function");
  }
  const Interval domain = domain_of(problem);
  for (const auto& [range, name] : {std::pair{data_range(problem), "data"},
                                    std::pair{collocation_range(problem), "collocation"}}) {
    if (!(range.hi >= range.lo)) throw ConfigError(std::string("training.") + name + "_interval is reversed");
    if (!domain.contains(range)) {
      throw ConfigError(std::string("training.") + name + "_interval lies outside the problem domain");
    }
  }
  if (n_eval < 1) throw ConfigError("training.n_eval must be >= 1");
  network_for(problem).validate();
}

Interval TrainingConfig::data_range(const OdeProblem& problem) const {
  return data_interval.value_or(domain_of(problem));
}

Interval TrainingConfig::collocation_range(const OdeProblem& problem) const {
  return collocation_interval.value_or(domain_of(problem));
}

MlpConfig TrainingConfig::network_for(const OdeProblem& problem) const {
  MlpConfig c = network;
  c.output_dim = problem.dim;
  c.seed = seed;
  if (normalize_input) {
    c.input_center = 0.5 * (problem.t0 + problem.t_end);
    c.input_half_width = 0.5 * (problem.t_end - problem.t0);
  }
  return c;
}

double recombine(const EpochRecord& r, const LossWeights& w) {
  double total = w.data * r.l_data;
  total = total + w.boundary * r.l_b;
  total = total + w.physics * r.l_f;
  total = total + w.energy * r.l_e;
  return total;
}

// ---------------------------------------------------------------------------

std::vector<Var> constant_parameters(const Mlp& mlp) {
  const Eigen::VectorXd& theta = mlp.parameters();
  return {theta.data(), theta.data() + theta.size()};
}

Var data_term(std::span<const std::vector<Var>> predictions, const TrainingData& data) {
  if (predictions.empty()) throw ConfigError("training data set is empty");
  if (predictions.size() != data.times.size()) throw StructuralError("prediction count differs from data count");
  Var sum(0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& pred = predictions[i];
    if (static_cast<Eigen::Index>(pred.size()) != data.values.rows()) {
      throw StructuralError("prediction width differs from data width");
    }
    for (std::size_t k = 0; k < pred.size(); ++k) {
      sum = sum + square(pred[k] - Var(data.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i))));
      ++count;
    }
  }
  return sum / Var(static_cast<double>(count));
}

Var physics_term(const OdeProblem& problem, std::span<const std::vector<Jet2<Var>>> jets,
                 std::span<const double> collocation) {
  if (jets.empty()) throw ConfigError("collocation set is empty");
  if (jets.size() != collocation.size()) throw StructuralError("jet count differs from collocation count");
  Var sum(0.0);
  for (std::size_t j = 0; j < jets.size(); ++j) {
    const Residual r = problem.residual(jets[j], collocation[j]);
    for (int k = 0; k < problem.dim; ++k) sum = sum + square(r[static_cast<std::size_t>(k)]);
  }
  return sum / Var(static_cast<double>(jets.size()));
}

Var energy_term(const OdeProblem& problem, std::span<const std::vector<Jet2<Var>>> jets) {
  if (!problem.has_energy()) throw ConfigError("problem " + problem.name + " has no energy function");
  if (jets.empty()) throw ConfigError("collocation set is empty");
  Var sum(0.0);
  for (const auto& y : jets) sum = sum + square(problem.energy(y) - Var(problem.reference_energy));
  return sum / Var(static_cast<double>(jets.size()));
}

namespace {

std::vector<std::vector<Jet2<Var>>> network_jets(const Mlp& mlp, std::span<const Var> params,
                                                 std::span<const double> collocation) {
  std::vector<std::vector<Jet2<Var>>> jets;
  jets.reserve(collocation.size());
  for (double t : collocation) jets.push_back(mlp.forward_jet(params, t));
  return jets;
}

std::vector<std::vector<Var>> network_predictions(const Mlp& mlp, std::span<const Var> params,
                                                  const TrainingData& data) {
  std::vector<std::vector<Var>> out;
  out.reserve(data.times.size());
  for (double t : data.times) out.push_back(mlp.forward(params, Var(t)));
  return out;
}

}  // namespace

Var loss_data(const Mlp& mlp, std::span<const Var> params, const TrainingData& data) {
  return data_term(network_predictions(mlp, params, data), data);
}

Var loss_physics(const Mlp& mlp, std::span<const Var> params, const OdeProblem& problem,
                 std::span<const double> collocation) {
  check_collocation(problem, collocation);
  return physics_term(problem, network_jets(mlp, params, collocation), collocation);
}

Var loss_energy(const Mlp& mlp, std::span<const Var> params, const OdeProblem& problem,
                std::span<const double> collocation) {
  if (!problem.has_energy()) throw ConfigError("problem " + problem.name + " has no energy function");
  check_collocation(problem, collocation);
  return energy_term(problem, network_jets(mlp, params, collocation));
}

LossEvaluation loss_total(const Mlp& mlp, std::span<const Var> params, const OdeProblem& problem,
                          const TrainingData& data, std::span<const double> collocation, const LossWeights& weights) {
  const bool need_jets = weights.physics > 0.0 || weights.energy > 0.0;
  if (need_jets) check_collocation(problem, collocation);
  const auto predictions = network_predictions(mlp, params, data);
  const auto jets = need_jets ? network_jets(mlp, params, collocation) : std::vector<std::vector<Jet2<Var>>>{};
  return assemble(problem, predictions, jets, data, collocation, weights);
}

LossGradient loss_gradient(const Mlp& mlp, const OdeProblem& problem, const TrainingData& data,
                           std::span<const double> collocation, const LossWeights& weights, GradientEngine engine) {
  if (weights.physics > 0.0 || weights.energy > 0.0) check_collocation(problem, collocation);
  return engine == GradientEngine::Tape ? tape_gradient(mlp, problem, data, collocation, weights)
                                        : batched_gradient(mlp, problem, data, collocation, weights);
}

// ---------------------------------------------------------------------------

void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grad, double eta) {
  if (params.size() != grad.size() || state.m.size() != grad.size() || state.v.size() != grad.size()) {
    throw StructuralError("Adam dimensions disagree");
  }
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) throw NumericalError("non-finite gradient component " + std::to_string(i));
  }
  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseAbs2();
  const double correction1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -= eta * (state.m.array() / correction1) / ((state.v.array() / correction2).sqrt() + state.eps_hat);
}

TrainingResult train(const OdeProblem& problem, const TrainingConfig& config, const TrainingOptions& options) {
  config.validate(problem);
  std::optional<Oracle> local;
  if (options.oracle == nullptr) local.emplace(problem);
  const Oracle& oracle = options.oracle != nullptr ? *options.oracle : *local;

  TrainingResult result{Mlp(config.network_for(problem)), {}, TrainingStatus::Completed, {}, 0.0, 0.0, {}, {}};
  result.data = sample_training_data(oracle, config.n_data, config.data_range(problem));
  result.collocation = sample_collocation(config.n_c, config.collocation_range(problem), domain_of(problem));
  const EvaluationGrid grid(oracle, config.n_eval);

  Mlp& mlp = result.network;
  AdamState adam(mlp.parameter_count());
  Eigen::VectorXd theta = mlp.parameters();
  Eigen::VectorXd last_good = theta;
  result.history.reserve(config.n_epochs);

  for (std::size_t epoch = 0; epoch < config.n_epochs; ++epoch) {
    LossGradient lg = loss_gradient(mlp, problem, result.data, result.collocation, config.weights, options.engine);
    lg.record.epoch = epoch;
    if (!std::isfinite(lg.record.l_total)) {
      result.status = TrainingStatus::Aborted;
      result.diagnostic = "non-finite loss at epoch " + std::to_string(epoch);
      mlp.assign(last_good);
      break;
    }
    if (config.mse_every > 0 && epoch % config.mse_every == 0) lg.record.mse = grid.mse(mlp);
    result.history.push_back(lg.record);
    if (options.on_epoch) options.on_epoch(lg.record);

    last_good = theta;
    try {
      adam_step(adam, theta, lg.gradient, config.eta);
    } catch (const NumericalError& e) {
      result.status = TrainingStatus::Aborted;
      result.diagnostic = "epoch " + std::to_string(epoch) + ": " + e.what();
      break;
    }
    mlp.assign(theta);
  }

  result.final_mse = grid.mse(mlp);
  result.constant_predictor_mse = grid.constant_predictor_mse();
  return result;
}

void write_epochs_csv(std::span<const EpochRecord> history, std::ostream& out) {
  out << "epoch,l_data,l_f,l_e,l_total,mse\n";
  for (const EpochRecord& r : history) {
    out << r.epoch << ',' << format_real(r.l_data) << ',' << format_real(r.l_f) << ',' << format_real(r.l_e) << ','
        << format_real(r.l_total) << ',' << format_real(r.mse) << '\n';
  }
}

}  // namespace pinn
