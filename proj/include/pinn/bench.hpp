#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pinn/integrators.hpp"
#include "pinn/training.hpp"

namespace pinn {

/// One trained configuration inside a scenario. Scenarios comparing two
/// settings (with and without energy, 3 vs 4 layers) hold several variants.
struct Variant {
  std::string name;  // empty for single-variant scenarios
  std::string problem;
  std::map<std::string, double> params;
  TrainingConfig training;
  std::optional<Interval> eval_interval;  // whole domain when unset
};

enum class Statistic { Min, Median, Max };

/// Declarative check over the final MSEs of a scenario's runs.
struct Expectation {
  enum class Kind {
    Qualitative,  // documented outcome, never fails
    Below,        // statistic(variant) < bound
    Above,        // statistic(variant) > bound
    Ratio,        // statistic(baseline) / statistic(variant) >= bound
  };
  Kind kind = Kind::Qualitative;
  std::string variant;
  std::string baseline;
  Statistic statistic = Statistic::Median;
  double bound = 0.0;
  double soft_bound = 0.0;  // Ratio only: between soft_bound and bound passes with a warning
  std::string note;
};

struct Scenario {
  std::string id;
  std::vector<int> figures;
  std::string description;
  std::vector<Variant> variants;
  std::size_t n_seeds = 5;
  std::uint64_t seed0 = 1;
  std::vector<Expectation> expectations;
  /// No training: the record compares a coarse RK4 run (step oracle_dt) with the oracle.
  bool oracle_only = false;
  double oracle_dt = 1e-3;

  const Variant& variant(const std::string& name) const;
  /// Variant label used in file names and summary rows: id, or id-variant.
  std::string label(const Variant& v) const;
};

/// Every registered scenario, in figure order.
const std::vector<Scenario>& scenarios();
const Scenario& find_scenario(const std::string& id);  // ConfigError listing valid ids
std::vector<std::string> scenario_ids();
/// Scenarios reproducing the given figure number (a figure may have one per panel).
std::vector<const Scenario*> scenarios_for_figure(int figure);

enum class RunStatus { Converged, Diverged, Aborted };
std::string to_string(RunStatus status);

struct RunRecord {
  std::string scenario;  // Scenario::label of the variant
  std::string variant;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Converged;
  std::optional<double> final_mse;  // absent iff aborted
  double constant_predictor_mse = 0.0;
  std::optional<double> wall_time_s;
  std::string diagnostic;
  std::vector<EpochRecord> history;
  std::vector<double> eval_times;
  Eigen::MatrixXd prediction;  // dim x eval_times
  Eigen::MatrixXd reference;
  /// 2 x eval_times: the outputs (y1, y2), or (y, dy/dt) of a scalar
  /// second-order problem; empty for first-order scalar problems.
  Eigen::MatrixXd phase;
  std::string model;  // serialized network, empty for oracle-only runs
};

/// Diverged when the final MSE exceeds this multiple of the constant-predictor MSE.
inline constexpr double kDivergenceFactor = 10.0;

struct VariantStats {
  std::string label;
  std::size_t runs = 0;
  std::size_t finished = 0;  // runs with a final MSE
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
  double statistic(Statistic s) const;
};

enum class Verdict { Pass, SoftPass, Fail, Unchecked };
std::string to_string(Verdict verdict);

struct ExpectationResult {
  Expectation expectation;
  Verdict verdict = Verdict::Unchecked;
  std::optional<double> observed;
  std::string message;
};

struct ScenarioResult {
  const Scenario* scenario = nullptr;
  std::vector<RunRecord> records;
  std::vector<VariantStats> stats;
  std::vector<ExpectationResult> checks;
  bool passed() const;  // no Fail verdicts
};

struct BenchOptions {
  std::optional<std::size_t> n_seeds;
  std::optional<std::uint64_t> seed0;
  std::optional<std::size_t> n_epochs;  // shortens every variant, for smoke runs
  unsigned threads = 0;                 // 0: hardware concurrency
  bool record_wall_time = false;        // off keeps reports byte-identical across reruns
};

/// Trains every (variant, seed) pair, in parallel when threads > 1. A failing
/// run is recorded as aborted and does not stop the batch. Oracle-only
/// scenarios yield one record per variant whatever the seed count.
ScenarioResult run_scenario(const Scenario& scenario, const BenchOptions& options = {});

std::vector<VariantStats> summarize(const Scenario& scenario, std::span<const RunRecord> records);
std::vector<ExpectationResult> check_expectations(const Scenario& scenario, std::span<const VariantStats> stats);

/// Creates dir if needed and proves it writable; throws IoError otherwise.
void prepare_output_dir(const std::filesystem::path& dir);

struct ReportOptions {
  bool plots = false;  // SVG line plots next to the CSVs
};

/// Writes under dir:
///   summary.csv, stats.csv, checks.csv
///   <label>/seed-<n>/{epochs.csv, solution.csv, phase.csv (dim 2), model.txt, *.svg}
/// An empty record list is a usage error (ConfigError).
void emit_report(const ScenarioResult& result, const std::filesystem::path& dir, const ReportOptions& options = {});

void write_summary_csv(std::span<const RunRecord> records, std::ostream& out);
void write_stats_csv(std::span<const VariantStats> stats, std::ostream& out);
/// t, y_hat..., y_oracle...
void write_solution_csv(const RunRecord& record, std::ostream& out);
/// y1, y2 of the predicted phase trajectory; requires a non-empty phase.
void write_phase_csv(const RunRecord& record, std::ostream& out);

}  // namespace pinn
