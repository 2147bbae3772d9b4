#pragma once

// Shared oracles for the unit and acceptance tests: finite differences,
// derivative stencils and random expression programs.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "pinn/autodiff.hpp"
#include "pinn/integrators.hpp"
#include "pinn/network.hpp"
#include "pinn/problems.hpp"
#include "pinn/training.hpp"

namespace pinn::test {

/// |a - b| relative to the larger magnitude, with an absolute floor so that
/// values near zero are compared absolutely.
inline double rel_err(double a, double b, double floor = 1e-3) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double central_difference(const std::function<double(double)>& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Five-point stencils for the first and second derivative.
inline double stencil_first(const std::function<double(double)>& f, double t, double h) {
  return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
}
inline double stencil_second(const std::function<double(double)>& f, double t, double h) {
  return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) - f(t - 2 * h)) / (12 * h * h);
}

/// A random straight-line program over a few inputs, evaluable on doubles or Vars.
/// Divisions and powers are shaped so every intermediate stays finite and moderate.
class ExpressionProgram {
 public:
  ExpressionProgram(std::mt19937_64& rng, int inputs, int steps) : inputs_(inputs) {
    std::uniform_int_distribution<int> op(0, 14);
    std::uniform_real_distribution<double> c(-1.5, 1.5);
    for (int i = 0; i < steps; ++i) {
      const int slots = inputs_ + i;
      std::uniform_int_distribution<int> pick(std::max(0, slots - 4), slots - 1);
      std::uniform_int_distribution<int> any(0, slots - 1);
      code_.push_back({op(rng), pick(rng), any(rng), c(rng)});
    }
  }

  int inputs() const { return inputs_; }

  template <class S>
  S operator()(const std::vector<S>& x) const {
    using std::cos;
    using std::sin;
    using std::tanh;
    std::vector<S> slot(x);
    for (const Instr& in : code_) {
      const S& a = slot[static_cast<std::size_t>(in.a)];
      const S& b = slot[static_cast<std::size_t>(in.b)];
      const S k(in.c);
      S r;
      switch (in.op) {
        case 0: r = a + b; break;
        case 1: r = a - b; break;
        case 2: r = a * b; break;
        case 3: r = a / (S(1.5) + sin(b)); break;
        case 4: r = -a; break;
        case 5: r = pow_int(tanh(a), 3); break;
        case 6: r = square(tanh(a)); break;
        case 7: r = sin(a); break;
        case 8: r = cos(a); break;
        case 9: r = tanh(a); break;
        case 10: r = a + k; break;
        case 11: r = k * a; break;
        case 12: r = k - a; break;
        case 13: r = a / S(2.0 + std::abs(in.c)); break;
        default: r = S(1.0) / (S(1.0) + square(a)); break;
      }
      slot.push_back(r);
    }
    return slot.back();
  }

 private:
  struct Instr {
    int op;
    int a;
    int b;
    double c;
  };
  int inputs_;
  std::vector<Instr> code_;
};

/// Network with Glorot weights and small random biases (zero biases hide bias-gradient bugs).
inline Mlp random_mlp(int layers, int width, int output_dim, std::uint64_t seed, double bias_scale = 0.3) {
  MlpConfig c;
  c.hidden_layers = layers;
  c.neurons_per_layer = width;
  c.output_dim = output_dim;
  c.seed = seed;
  Mlp mlp(c);
  Eigen::VectorXd theta = mlp.parameters();
  std::mt19937_64 rng(seed + 7777);
  std::uniform_real_distribution<double> u(-bias_scale, bias_scale);
  for (const LayerShape& s : mlp.shapes()) {
    for (Eigen::Index i = 0; i < s.rows; ++i) theta[s.bias_offset + i] = u(rng);
  }
  mlp.assign(theta);
  return mlp;
}

/// Value of loss_total at parameters theta, on plain constants.
inline double loss_at(Mlp& mlp, const Eigen::VectorXd& theta, const OdeProblem& problem, const TrainingData& data,
                      const std::vector<double>& collocation, const LossWeights& weights) {
  mlp.assign(theta);
  const std::vector<Var> params = constant_parameters(mlp);
  return loss_total(mlp, params, problem, data, collocation, weights).total.value();
}

}  // namespace pinn::test
