#include "pinn/network.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "pinn/csv.hpp"

namespace pinn {

void MlpConfig::validate() const {
  if (input_dim != 1) throw ConfigError("network.input_dim must be 1 (time is the only input)");
  if (hidden_layers < 1) throw ConfigError("network.hidden_layers must be >= 1");
  if (neurons_per_layer < 1) throw ConfigError("network.neurons_per_layer must be >= 1");
  if (output_dim != 1 && output_dim != 2) throw ConfigError("network.output_dim must be 1 or 2");
  if (!std::isfinite(input_center)) throw ConfigError("network.input_center must be finite");
  if (!(input_half_width > 0.0) || !std::isfinite(input_half_width)) {
    throw ConfigError("network.input_half_width must be positive");
  }
}

std::vector<LayerShape> layer_shapes(const MlpConfig& config) {
  config.validate();
  std::vector<LayerShape> shapes;
  Eigen::Index offset = 0;
  Eigen::Index in = config.input_dim;
  for (int l = 0; l <= config.hidden_layers; ++l) {
    const Eigen::Index out = l < config.hidden_layers ? config.neurons_per_layer : config.output_dim;
    LayerShape s{out, in, offset, offset + out * in};
    offset = s.bias_offset + out;
    shapes.push_back(s);
    in = out;
  }
  return shapes;
}

std::size_t parameter_count(const MlpConfig& config) {
  const auto shapes = layer_shapes(config);
  return static_cast<std::size_t>(shapes.back().bias_offset + shapes.back().rows);
}

Mlp::Mlp(const MlpConfig& config)
    : config_(config), shapes_(layer_shapes(config)), theta_(Eigen::VectorXd::Zero(pinn::parameter_count(config))) {
  std::mt19937_64 rng(config.seed);
  for (const LayerShape& s : shapes_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(s.rows + s.cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index i = 0; i < s.rows * s.cols; ++i) theta_[s.weight_offset + i] = dist(rng);
  }
}

Eigen::Map<const RowMatrix> Mlp::weight(std::size_t layer) const {
  const LayerShape& s = shapes_.at(layer);
  return {theta_.data() + s.weight_offset, s.rows, s.cols};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(std::size_t layer) const {
  const LayerShape& s = shapes_.at(layer);
  return {theta_.data() + s.bias_offset, s.rows};
}

void Mlp::assign(const Eigen::VectorXd& theta) {
  if (theta.size() != theta_.size()) {
    throw StructuralError("parameter vector has " + std::to_string(theta.size()) + " entries, network needs " +
                          std::to_string(theta_.size()));
  }
  theta_ = theta;
}

Eigen::VectorXd Mlp::forward(double t) const {
  const auto out = propagate<double, double>(std::span<const double>(theta_.data(), theta_.size()), {scale_input(t)});
  return Eigen::Map<const Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

std::vector<Jet2<double>> Mlp::forward_jet(double t) const {
  return propagate<double, Jet2<double>>(std::span<const double>(theta_.data(), theta_.size()),
                                         {input_jet<double>(t)});
}

std::vector<Var> Mlp::bind(Tape& tape) const {
  std::vector<Var> leaves;
  leaves.reserve(parameter_count());
  for (Eigen::Index i = 0; i < theta_.size(); ++i) leaves.push_back(tape.variable(theta_[i]));
  return leaves;
}

std::vector<Var> Mlp::forward(std::span<const Var> params, const Var& t) const {
  return propagate<Var, Var>(params, {scale_input(t)});
}

std::vector<Jet2<Var>> Mlp::forward_jet(std::span<const Var> params, double t) const {
  return propagate<Var, Jet2<Var>>(params, {input_jet<Var>(t)});
}

Eigen::MatrixXd Mlp::forward_batch(std::span<const double> times) const {
  return JetBatch(*this, times, 0).value();
}

// ---------------------------------------------------------------------------

JetBatch::JetBatch(const Mlp& mlp, std::span<const double> times, int order)
    : mlp_(&mlp), n_(static_cast<Eigen::Index>(times.size())), order_(order) {
  if (order != 0 && order != 2) throw ConfigError("jet order must be 0 or 2");
  const Eigen::Index blocks = order == 0 ? 1 : 3;
  const Eigen::Index n = n_;

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(1, blocks * n);
  for (Eigen::Index i = 0; i < n; ++i) x(0, i) = mlp.scale_input(times[static_cast<std::size_t>(i)]);
  if (order == 2) x.middleCols(n, n).setConstant(1.0 / mlp.config().input_half_width);

  const std::size_t layers = mlp.layer_count();
  inputs_.reserve(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = mlp.weight(l) * x;
    z.leftCols(n).colwise() += mlp.bias(l);
    inputs_.push_back(std::move(x));
    if (l + 1 == layers) {
      outputs_ = std::move(z);
      break;
    }
    // tanh jets: h = tanh(z), p = (1 - h^2) z', q = (1 - h^2) z'' - 2 h p z'
    x.resize(z.rows(), z.cols());
    auto h = x.leftCols(n).array();
    h = z.leftCols(n).array().tanh();
    if (order == 2) {
      tangents_.push_back(z.rightCols(2 * n));
      const Eigen::ArrayXXd slope = 1.0 - h.square();
      const auto z1 = z.middleCols(n, n).array();
      const auto z2 = z.rightCols(n).array();
      x.middleCols(n, n).array() = slope * z1;
      x.rightCols(n).array() = slope * z2 - 2.0 * h * x.middleCols(n, n).array() * z1;
    }
  }
  if (order == 0) {
    // keep first()/second() well-formed views
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(outputs_.rows(), 3 * n);
    padded.leftCols(n) = outputs_;
    outputs_ = std::move(padded);
  }
}

Eigen::VectorXd JetBatch::backward(const Eigen::MatrixXd& bar_value, const Eigen::MatrixXd& bar_first,
                                   const Eigen::MatrixXd& bar_second) const {
  const Eigen::Index n = n_;
  const Eigen::Index blocks = order_ == 0 ? 1 : 3;
  const Eigen::Index outs = mlp_->config().output_dim;
  if (bar_value.rows() != outs || bar_value.cols() != n) throw StructuralError("value adjoint has wrong shape");
  if (order_ == 2 && (bar_first.rows() != outs || bar_first.cols() != n || bar_second.rows() != outs ||
                      bar_second.cols() != n)) {
    throw StructuralError("derivative adjoint has wrong shape");
  }

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mlp_->parameter_count()));
  Eigen::MatrixXd g(outs, blocks * n);
  g.leftCols(n) = bar_value;
  if (order_ == 2) {
    g.middleCols(n, n) = bar_first;
    g.rightCols(n) = bar_second;
  }

  for (std::size_t l = mlp_->layer_count(); l-- > 0;) {
    const LayerShape& s = mlp_->shapes()[l];
    const Eigen::MatrixXd& x = inputs_[l];
    // g holds the adjoint of this layer's pre-activation block.
    Eigen::Map<RowMatrix>(grad.data() + s.weight_offset, s.rows, s.cols).noalias() = g * x.transpose();
    grad.segment(s.bias_offset, s.rows) = g.leftCols(n).rowwise().sum();
    if (l == 0) break;

    Eigen::MatrixXd ga = mlp_->weight(l).transpose() * g;  // adjoint of [h | p | q] of layer l-1
    const Eigen::MatrixXd& act = x;                         // that is exactly this layer's input
    const auto h = act.leftCols(n).array();
    const Eigen::ArrayXXd slope = 1.0 - h.square();
    if (order_ == 0) {
      g = (ga.array() * slope).matrix();
      continue;
    }
    const Eigen::MatrixXd& zs = tangents_[l - 1];  // z', z'' of layer l-1
    const auto z1 = zs.leftCols(n).array();
    const auto z2 = zs.rightCols(n).array();
    const auto p = act.middleCols(n, n).array();
    const auto gh = ga.leftCols(n).array();
    const auto gp = ga.middleCols(n, n).array();
    const auto gq = ga.rightCols(n).array();

    const Eigen::ArrayXXd gp_total = gp - 2.0 * gq * h * z1;
    const Eigen::ArrayXXd gs = gq * z2 + gp_total * z1;
    g.resize(ga.rows(), 3 * n);
    g.rightCols(n).array() = gq * slope;
    g.middleCols(n, n).array() = gp_total * slope - 2.0 * gq * h * p;
    g.leftCols(n).array() = (gh - 2.0 * gq * p * z1 - 2.0 * gs * h) * slope;
  }
  return grad;
}

// ---------------------------------------------------------------------------

void save_model(const Mlp& mlp, std::ostream& out) {
  const MlpConfig& c = mlp.config();
  out << "pinn-mlp input_dim=" << c.input_dim << " hidden_layers=" << c.hidden_layers
      << " neurons_per_layer=" << c.neurons_per_layer << " output_dim=" << c.output_dim << " seed=" << c.seed
      << " input_center=" << format_real(c.input_center) << " input_half_width=" << format_real(c.input_half_width)
      << " parameters=" << mlp.parameter_count() << '\n';
  for (Eigen::Index i = 0; i < mlp.parameters().size(); ++i) out << format_real(mlp.parameters()[i]) << '\n';
}

Mlp load_model(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("model file is empty");
  std::istringstream hs(header);
  std::string magic;
  hs >> magic;
  if (magic != "pinn-mlp") throw ConfigError("model file does not start with 'pinn-mlp'");
  MlpConfig config;
  std::size_t declared = 0;
  std::string field;
  while (hs >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ConfigError("malformed model header field '" + field + "'");
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "input_dim") config.input_dim = std::stoi(value);
    else if (key == "hidden_layers") config.hidden_layers = std::stoi(value);
    else if (key == "neurons_per_layer") config.neurons_per_layer = std::stoi(value);
    else if (key == "output_dim") config.output_dim = std::stoi(value);
    else if (key == "seed") config.seed = std::stoull(value);
    else if (key == "input_center") config.input_center = std::stod(value);
    else if (key == "input_half_width") config.input_half_width = std::stod(value);
    else if (key == "parameters") declared = std::stoull(value);
    else throw ConfigError("unknown model header field '" + key + "'");
  }
  Mlp mlp(config);
  if (declared != 0 && declared != mlp.parameter_count()) {
    throw StructuralError("model header declares " + std::to_string(declared) + " parameters, architecture has " +
                          std::to_string(mlp.parameter_count()));
  }
  Eigen::VectorXd theta(static_cast<Eigen::Index>(mlp.parameter_count()));
  std::string line;
  Eigen::Index i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (i >= theta.size()) throw StructuralError("model file has more parameters than the architecture");
    double v = 0.0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
    if (res.ec != std::errc()) throw ConfigError("unparsable parameter '" + line + "'");
    theta[i++] = v;
  }
  if (i != theta.size()) throw StructuralError("model file has too few parameters");
  mlp.assign(theta);
  return mlp;
}

void save_model(const Mlp& mlp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write model file " + path);
  save_model(mlp, out);
}

Mlp load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read model file " + path);
  return load_model(in);
}

}  // namespace pinn
