#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pinn/autodiff.hpp"
#include "pinn/errors.hpp"

namespace pinn {

struct MlpConfig {
  int input_dim = 1;
  int hidden_layers = 3;
  int neurons_per_layer = 32;
  int output_dim = 1;
  std::uint64_t seed = 0;
  // Fixed input map: the first layer sees (t - input_center) / input_half_width.
  double input_center = 0.0;
  double input_half_width = 1.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Where one dense layer lives inside the flat parameter vector.
struct LayerShape {
  Eigen::Index rows = 0;  // output width
  Eigen::Index cols = 0;  // input width
  Eigen::Index weight_offset = 0;
  Eigen::Index bias_offset = 0;
};

std::vector<LayerShape> layer_shapes(const MlpConfig& config);
std::size_t parameter_count(const MlpConfig& config);

/// Feed-forward network: tanh hidden layers, affine output layer.
///
/// All parameters live in one flat vector in canonical order: layer by layer,
/// each layer's weight matrix (output x input) row-major, then its bias.
/// weight() and bias() are Eigen views into that vector.
class Mlp {
 public:
  /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases, seeded by config.seed.
  explicit Mlp(const MlpConfig& config);

  const MlpConfig& config() const { return config_; }
  const std::vector<LayerShape>& shapes() const { return shapes_; }
  std::size_t layer_count() const { return shapes_.size(); }
  std::size_t parameter_count() const { return static_cast<std::size_t>(theta_.size()); }

  Eigen::Map<const RowMatrix> weight(std::size_t layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;

  const Eigen::VectorXd& parameters() const { return theta_; }
  Eigen::VectorXd flatten() const { return theta_; }
  void assign(const Eigen::VectorXd& theta);

  Eigen::VectorXd forward(double t) const;
  std::vector<Jet2<double>> forward_jet(double t) const;

  /// Records every parameter as a leaf on tape, in canonical order.
  std::vector<Var> bind(Tape& tape) const;
  std::vector<Var> forward(std::span<const Var> params, const Var& t) const;
  std::vector<Jet2<Var>> forward_jet(std::span<const Var> params, double t) const;

  /// Plain outputs at many times, output_dim x times.size().
  Eigen::MatrixXd forward_batch(std::span<const double> times) const;

  /// Generic layer recursion. P is the parameter scalar, V the propagated value
  /// (a scalar or a Jet2 of scalars).
  template <class P, class V>
  std::vector<V> propagate(std::span<const P> params, std::vector<V> activations) const;

  /// Normalised input and its jet (derivatives with respect to t).
  template <class S>
  S scale_input(const S& t) const {
    return (t - S(config_.input_center)) / S(config_.input_half_width);
  }
  template <class S>
  Jet2<S> input_jet(double t) const {
    return {scale_input(S(t)), S(1.0 / config_.input_half_width), S(0.0)};
  }

 private:
  MlpConfig config_;
  std::vector<LayerShape> shapes_;
  Eigen::VectorXd theta_;
};

template <class P, class V>
std::vector<V> Mlp::propagate(std::span<const P> params, std::vector<V> activations) const {
  using std::tanh;
  if (params.size() != parameter_count()) {
    throw StructuralError("parameter vector has " + std::to_string(params.size()) + " entries, network needs " +
                          std::to_string(parameter_count()));
  }
  std::vector<V> next;
  for (std::size_t l = 0; l < shapes_.size(); ++l) {
    const LayerShape& s = shapes_[l];
    next.clear();
    next.reserve(static_cast<std::size_t>(s.rows));
    for (Eigen::Index r = 0; r < s.rows; ++r) {
      const std::size_t row = static_cast<std::size_t>(s.weight_offset + r * s.cols);
      V acc = params[row] * activations[0];
      for (Eigen::Index c = 1; c < s.cols; ++c) {
        acc = acc + params[row + static_cast<std::size_t>(c)] * activations[static_cast<std::size_t>(c)];
      }
      acc = acc + params[static_cast<std::size_t>(s.bias_offset + r)];
      if (l + 1 < shapes_.size()) acc = tanh(acc);
      next.push_back(std::move(acc));
    }
    activations.swap(next);
  }
  return activations;
}

/// Second-order jets of the network outputs at a batch of times, with the
/// matching reverse pass for parameter gradients.
///
/// Each layer carries the stacked block [value | d/dt | d2/dt2] so a layer is
/// one matrix product. order 0 propagates values only.
class JetBatch {
 public:
  JetBatch(const Mlp& mlp, std::span<const double> times, int order = 2);

  Eigen::Index size() const { return n_; }
  int order() const { return order_; }
  auto value() const { return outputs_.leftCols(n_); }
  auto first() const { return outputs_.middleCols(n_, n_); }
  auto second() const { return outputs_.rightCols(n_); }

  /// Gradient of a scalar loss in canonical parameter order, given the loss
  /// adjoints of the output jets (each output_dim x size(); the derivative
  /// adjoints are ignored when order is 0).
  Eigen::VectorXd backward(const Eigen::MatrixXd& bar_value, const Eigen::MatrixXd& bar_first,
                           const Eigen::MatrixXd& bar_second) const;

 private:
  const Mlp* mlp_;
  Eigen::Index n_;
  int order_;
  std::vector<Eigen::MatrixXd> inputs_;    // stacked layer inputs
  std::vector<Eigen::MatrixXd> tangents_;  // [z' | z''] of each hidden layer
  Eigen::MatrixXd outputs_;
};

void save_model(const Mlp& mlp, std::ostream& out);
Mlp load_model(std::istream& in);
void save_model(const Mlp& mlp, const std::string& path);
Mlp load_model(const std::string& path);

}  // namespace pinn
