#pragma once

// Scalar reverse-mode automatic differentiation with a second-order jet layer.
//
// A Tape records every operation on Vars as an append-only list of nodes with
// eagerly computed local partials. backward() performs one reverse sweep.
// Vars created from plain doubles are tape-less constants; mixing a constant
// with a taped Var records a unary node, so constant jets such as (t, 1, 0)
// never pollute the tape.
//
// Jet2<S> carries (value, d/dt, d^2/dt^2) for any scalar S. With S = Var the
// jet components are differentiable with respect to everything on the tape
// (forward-over-reverse), which is what second-order residual losses need.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace pinn {

class Tape;

class Var {
 public:
  Var() = default;
  Var(double constant) : value_(constant) {}  // NOLINT(google-explicit-constructor)

  double value() const { return value_; }
  Tape* tape() const { return tape_; }
  std::uint32_t index() const { return index_; }
  bool is_constant() const { return tape_ == nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t index, double value) : tape_(tape), index_(index), value_(value) {}

  Tape* tape_ = nullptr;
  std::uint32_t index_ = 0;
  double value_ = 0.0;
};

enum class Op : std::uint8_t {
  Leaf,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  PowInt,
  Sin,
  Cos,
  Tanh,
  Square,
  AddConst,  // a + c
  MulConst,  // a * c
  ConstSub,  // c - a
  DivConst,  // a / c
  ConstDiv,  // c / a
};

struct Node {
  static constexpr std::uint32_t kNone = 0xffffffffu;

  Op op = Op::Leaf;
  std::uint32_t lhs = kNone;
  std::uint32_t rhs = kNone;
  double constant = 0.0;
  double lhs_partial = 0.0;
  double rhs_partial = 0.0;
  double value = 0.0;
};

class Gradient {
 public:
  Gradient(const Tape* tape, std::vector<double> adjoints)
      : tape_(tape), adjoints_(std::move(adjoints)) {}

  /// Adjoint of v; constants have adjoint 0. Throws StructuralError for a Var on another tape.
  double operator[](const Var& v) const;
  double at(std::size_t node) const { return adjoints_.at(node); }
  std::span<const double> adjoints() const { return adjoints_; }

 private:
  const Tape* tape_;
  std::vector<double> adjoints_;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// New independent variable (a leaf node).
  Var variable(double value);

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  std::span<const Node> nodes() const { return nodes_; }

  void reserve(std::size_t n) { nodes_.reserve(n); }
  /// Drops all nodes. Every Var previously recorded on this tape becomes invalid.
  void clear() { nodes_.clear(); }

  /// Single reverse sweep from root. Adjoints accumulate serially in reverse node order.
  Gradient backward(const Var& root) const;

  /// Recomputes every non-leaf value from its parents in recording order.
  std::vector<double> replay() const;

  // Low-level recording used by the elementary operations.
  Var record_unary(Op op, const Var& a, double constant);
  Var record_binary(Op op, const Var& a, const Var& b);

 private:
  std::vector<Node> nodes_;
};

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);
Var pow_int(const Var& a, int n);
Var square(const Var& a);
Var sin(const Var& a);
Var cos(const Var& a);
Var tanh(const Var& a);

inline double pow_int(double a, int n) { return std::pow(a, n); }
inline double square(double a) { return a * a; }

// ---------------------------------------------------------------------------
// Second-order jets.

template <class S>
struct Jet2 {
  S u{};
  S du{};
  S ddu{};
};

template <class S>
Jet2<S> constant_jet(const S& c) {
  return {c, S(0.0), S(0.0)};
}

/// Lifts the time coordinate: (t, 1, 0) with constant derivative components.
template <class S = Var>
Jet2<S> jet_lift_input(double t) {
  return {S(t), S(1.0), S(0.0)};
}

template <class S>
Jet2<S> operator+(const Jet2<S>& a, const Jet2<S>& b) {
  return {a.u + b.u, a.du + b.du, a.ddu + b.ddu};
}

template <class S>
Jet2<S> operator-(const Jet2<S>& a, const Jet2<S>& b) {
  return {a.u - b.u, a.du - b.du, a.ddu - b.ddu};
}

template <class S>
Jet2<S> operator-(const Jet2<S>& a) {
  return {-a.u, -a.du, -a.ddu};
}

template <class S>
Jet2<S> operator+(const Jet2<S>& a, const S& c) {
  return {a.u + c, a.du, a.ddu};
}

template <class S>
Jet2<S> operator+(const S& c, const Jet2<S>& a) {
  return {c + a.u, a.du, a.ddu};
}

template <class S>
Jet2<S> operator-(const Jet2<S>& a, const S& c) {
  return {a.u - c, a.du, a.ddu};
}

template <class S>
Jet2<S> operator*(const S& c, const Jet2<S>& a) {
  return {c * a.u, c * a.du, c * a.ddu};
}

template <class S>
Jet2<S> operator*(const Jet2<S>& a, const S& c) {
  return c * a;
}

template <class S>
Jet2<S> operator*(const Jet2<S>& a, const Jet2<S>& b) {
  return {a.u * b.u, a.du * b.u + a.u * b.du, a.ddu * b.u + S(2.0) * (a.du * b.du) + a.u * b.ddu};
}

template <class S>
Jet2<S> tanh(const Jet2<S>& z) {
  using std::tanh;
  const S u = tanh(z.u);
  const S slope = S(1.0) - u * u;
  const S du = slope * z.du;
  return {u, du, slope * z.ddu - S(2.0) * u * du * z.du};
}

template <class S>
Jet2<S> sin(const Jet2<S>& z) {
  using std::cos;
  using std::sin;
  const S s = sin(z.u);
  const S c = cos(z.u);
  return {s, c * z.du, c * z.ddu - s * (z.du * z.du)};
}

template <class S>
Jet2<S> cos(const Jet2<S>& z) {
  using std::cos;
  using std::sin;
  const S s = sin(z.u);
  const S c = cos(z.u);
  return {c, -(s * z.du), -(c * (z.du * z.du)) - s * z.ddu};
}

template <class S>
Jet2<S> pow_int(const Jet2<S>& z, int n) {
  if (n == 0) return constant_jet(S(1.0));
  if (n == 1) return z;
  const S lower = pow_int(z.u, n - 1);
  const S slope = S(static_cast<double>(n)) * lower;
  const S curvature = n == 2 ? S(2.0) : S(static_cast<double>(n) * (n - 1)) * pow_int(z.u, n - 2);
  return {pow_int(z.u, n), slope * z.du, curvature * (z.du * z.du) + slope * z.ddu};
}

template <class S>
Jet2<S> square(const Jet2<S>& z) {
  return z * z;
}

}  // namespace pinn
