#include "pinn/autodiff.hpp"

#include <cmath>
#include <limits>
#include <tuple>
#include <string>

#include "pinn/errors.hpp"

namespace pinn {
namespace {

double evaluate(Op op, double a, double b, double c) {
  switch (op) {
    case Op::Leaf: return a;
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    case Op::Neg: return -a;
    case Op::PowInt: return std::pow(a, static_cast<int>(c));
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Tanh: return std::tanh(a);
    case Op::Square: return a * a;
    case Op::AddConst: return a + c;
    case Op::MulConst: return a * c;
    case Op::ConstSub: return c - a;
    case Op::DivConst: return a / c;
    case Op::ConstDiv: return c / a;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Local partials (d/da, d/db) given operand values and the result.
std::pair<double, double> partials(Op op, double a, double b, double c, double value) {
  switch (op) {
    case Op::Leaf: return {0.0, 0.0};
    case Op::Add: return {1.0, 1.0};
    case Op::Sub: return {1.0, -1.0};
    case Op::Mul: return {b, a};
    case Op::Div: return {1.0 / b, -value / b};
    case Op::Neg: return {-1.0, 0.0};
    case Op::PowInt: {
      const int n = static_cast<int>(c);
      return {n == 0 ? 0.0 : n * std::pow(a, n - 1), 0.0};
    }
    case Op::Sin: return {std::cos(a), 0.0};
    case Op::Cos: return {-std::sin(a), 0.0};
    case Op::Tanh: return {1.0 - value * value, 0.0};
    case Op::Square: return {2.0 * a, 0.0};
    case Op::AddConst: return {1.0, 0.0};
    case Op::MulConst: return {c, 0.0};
    case Op::ConstSub: return {-1.0, 0.0};
    case Op::DivConst: return {1.0 / c, 0.0};
    case Op::ConstDiv: return {-value / a, 0.0};
  }
  return {0.0, 0.0};
}

Tape* common_tape(const Var& a, const Var& b) {
  if (a.tape() != nullptr && b.tape() != nullptr && a.tape() != b.tape()) {
    throw StructuralError("operands belong to different tapes");
  }
  return a.tape() != nullptr ? a.tape() : b.tape();
}

void require_nonzero(double divisor) {
  if (!(std::abs(divisor) > 0.0)) throw DomainError("division by zero");
}

Var unary(Op op, const Var& a, double c = 0.0) {
  if (a.is_constant()) return Var(evaluate(op, a.value(), 0.0, c));
  return a.tape()->record_unary(op, a, c);
}

}  // namespace

double Gradient::operator[](const Var& v) const {
  if (v.is_constant()) return 0.0;
  if (v.tape() != tape_) throw StructuralError("variable is not on the differentiated tape");
  return adjoints_.at(v.index());
}

Var Tape::variable(double value) {
  Node n;
  n.value = value;
  nodes_.push_back(n);
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1), value);
}

Var Tape::record_unary(Op op, const Var& a, double constant) {
  if (a.tape() != this) throw StructuralError("operand belongs to a different tape");
  Node n;
  n.op = op;
  n.lhs = a.index();
  n.constant = constant;
  n.value = evaluate(op, a.value(), 0.0, constant);
  n.lhs_partial = partials(op, a.value(), 0.0, constant, n.value).first;
  nodes_.push_back(n);
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1), n.value);
}

Var Tape::record_binary(Op op, const Var& a, const Var& b) {
  if (a.tape() != this || b.tape() != this) throw StructuralError("operand belongs to a different tape");
  Node n;
  n.op = op;
  n.lhs = a.index();
  n.rhs = b.index();
  n.value = evaluate(op, a.value(), b.value(), 0.0);
  std::tie(n.lhs_partial, n.rhs_partial) = partials(op, a.value(), b.value(), 0.0, n.value);
  nodes_.push_back(n);
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1), n.value);
}

Gradient Tape::backward(const Var& root) const {
  if (root.tape() != this) throw StructuralError("root is not recorded on this tape");
  std::vector<double> adjoint(nodes_.size(), 0.0);
  adjoint[root.index()] = 1.0;
  for (std::size_t i = root.index() + 1; i-- > 0;) {
    const double bar = adjoint[i];
    if (bar == 0.0) continue;
    const Node& n = nodes_[i];
    if (n.lhs != Node::kNone) adjoint[n.lhs] += bar * n.lhs_partial;
    if (n.rhs != Node::kNone) adjoint[n.rhs] += bar * n.rhs_partial;
  }
  return Gradient(this, std::move(adjoint));
}

std::vector<double> Tape::replay() const {
  std::vector<double> values(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.op == Op::Leaf) {
      values[i] = n.value;
      continue;
    }
    const double a = values[n.lhs];
    const double b = n.rhs == Node::kNone ? 0.0 : values[n.rhs];
    values[i] = evaluate(n.op, a, b, n.constant);
  }
  return values;
}

Var operator+(const Var& a, const Var& b) {
  Tape* tape = common_tape(a, b);
  if (tape == nullptr) return Var(a.value() + b.value());
  if (b.is_constant()) return b.value() == 0.0 ? a : tape->record_unary(Op::AddConst, a, b.value());
  if (a.is_constant()) return a.value() == 0.0 ? b : tape->record_unary(Op::AddConst, b, a.value());
  return tape->record_binary(Op::Add, a, b);
}

Var operator-(const Var& a, const Var& b) {
  Tape* tape = common_tape(a, b);
  if (tape == nullptr) return Var(a.value() - b.value());
  if (b.is_constant()) return b.value() == 0.0 ? a : tape->record_unary(Op::AddConst, a, -b.value());
  if (a.is_constant()) return tape->record_unary(Op::ConstSub, b, a.value());
  return tape->record_binary(Op::Sub, a, b);
}

Var operator*(const Var& a, const Var& b) {
  Tape* tape = common_tape(a, b);
  if (tape == nullptr) return Var(a.value() * b.value());
  if (a.is_constant() || b.is_constant()) {
    const Var& taped = a.is_constant() ? b : a;
    const double c = a.is_constant() ? a.value() : b.value();
    // Multiplying a finite value by exactly 0 or 1 needs no node.
    if (c == 1.0) return taped;
    if (c == 0.0 && std::isfinite(taped.value())) return Var(0.0);
    return tape->record_unary(Op::MulConst, taped, c);
  }
  return tape->record_binary(Op::Mul, a, b);
}

Var operator/(const Var& a, const Var& b) {
  require_nonzero(b.value());
  Tape* tape = common_tape(a, b);
  if (tape == nullptr) return Var(a.value() / b.value());
  if (b.is_constant()) return tape->record_unary(Op::DivConst, a, b.value());
  if (a.is_constant()) return tape->record_unary(Op::ConstDiv, b, a.value());
  return tape->record_binary(Op::Div, a, b);
}

Var operator-(const Var& a) { return unary(Op::Neg, a); }
Var pow_int(const Var& a, int n) { return unary(Op::PowInt, a, static_cast<double>(n)); }
Var square(const Var& a) { return unary(Op::Square, a); }
Var sin(const Var& a) { return unary(Op::Sin, a); }
Var cos(const Var& a) { return unary(Op::Cos, a); }
Var tanh(const Var& a) { return unary(Op::Tanh, a); }

}  // namespace pinn
