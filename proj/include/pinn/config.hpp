#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "pinn/problems.hpp"
#include "pinn/training.hpp"

namespace pinn {

/// Everything one `train` invocation needs.
///
/// File form is flat `key = value` lines with dotted keys, `#` comments:
///
///     problem.name = harmonic
///     problem.omega0 = 20
///     network.hidden_layers = 3
///     training.data_interval = 0, 0.1
///     training.weights.physics = 3e-4
///     output_dir = runs/harmonic
struct RunConfig {
  std::string problem_name;
  std::map<std::string, double> problem_params;
  TrainingConfig training;
  std::filesystem::path output_dir;

  OdeProblem make() const { return make_problem(problem_name, problem_params); }
};

/// Every key the parser accepts, in the order write_run_config emits them.
const std::vector<std::string>& run_config_keys();

/// Applies one `key = value` assignment. Throws ConfigError for unknown keys or bad values.
void set_run_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Parses a config stream, then applies `a.b=v` overrides in order. The result
/// is validated against its problem. `source` only labels error messages.
RunConfig parse_run_config(std::istream& in, std::span<const std::string> overrides = {},
                           const std::string& source = "config");
RunConfig load_run_config(const std::filesystem::path& path, std::span<const std::string> overrides = {});

/// Effective configuration in the same format; parsing it back gives the same config.
void write_run_config(const RunConfig& config, std::ostream& out);

/// Default root for output directories: $PINN_OUTPUT_ROOT, else "runs".
std::filesystem::path default_output_root();

}  // namespace pinn
