// Command-line front end: train, solve, bench, list-problems, list-scenarios.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 divergence or a
// failed scenario expectation.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pinn/bench.hpp"
#include "pinn/config.hpp"
#include "pinn/csv.hpp"
#include "pinn/errors.hpp"
#include "pinn/evaluation.hpp"
#include "pinn/integrators.hpp"
#include "pinn/network.hpp"
#include "pinn/problems.hpp"
#include "pinn/training.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kFailed = 2;

struct TrainArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string output;
};

struct SolveArgs {
  std::string problem;
  std::optional<double> omega0, epsilon, y0, v0, t_end;
  std::string method = "rk4";
  double dt = 1e-4;
  std::string out;
};

struct BenchArgs {
  std::vector<std::string> ids;
  std::optional<std::size_t> seeds;
  std::optional<std::uint64_t> seed0;
  std::optional<std::size_t> epochs;
  unsigned threads = 0;
  std::string out;
  bool plots = false;
  bool wall_time = false;
};

template <class F>
void write_file(const std::filesystem::path& path, F&& body) {
  std::ofstream out(path);
  if (!out) throw pinn::IoError("cannot write " + path.string());
  body(out);
}

int cmd_train(const TrainArgs& args) {
  pinn::RunConfig config = pinn::load_run_config(args.config, args.overrides);
  if (!args.output.empty()) config.output_dir = args.output;
  if (config.output_dir.empty()) config.output_dir = pinn::default_output_root() / config.problem_name;
  pinn::prepare_output_dir(config.output_dir);
  write_file(config.output_dir / "config.txt", [&](std::ostream& o) { pinn::write_run_config(config, o); });

  const pinn::OdeProblem problem = config.make();
  const pinn::Oracle oracle(problem);
  pinn::TrainingOptions options;
  options.oracle = &oracle;
  const pinn::TrainingResult result = pinn::train(problem, config.training, options);

  const auto& dir = config.output_dir;
  pinn::save_model(result.network, (dir / "model.txt").string());
  write_file(dir / "epochs.csv", [&](std::ostream& o) { pinn::write_epochs_csv(result.history, o); });

  pinn::RunRecord record;
  record.scenario = problem.name;
  record.seed = config.training.seed;
  const pinn::EvaluationGrid grid(oracle, config.training.n_eval);
  record.eval_times = grid.times();
  record.reference = grid.reference();
  record.prediction = result.network.forward_batch(record.eval_times);
  record.constant_predictor_mse = result.constant_predictor_mse;
  if (result.status == pinn::TrainingStatus::Aborted) {
    record.status = pinn::RunStatus::Aborted;
  } else {
    record.final_mse = result.final_mse;
    const bool diverged = config.training.n_epochs > 0 &&
                          result.final_mse > pinn::kDivergenceFactor * result.constant_predictor_mse;
    record.status = diverged ? pinn::RunStatus::Diverged : pinn::RunStatus::Converged;
  }
  write_file(dir / "solution.csv", [&](std::ostream& o) { pinn::write_solution_csv(record, o); });
  if (problem.dim == 2) {
    record.phase = record.prediction;
    write_file(dir / "phase.csv", [&](std::ostream& o) { pinn::write_phase_csv(record, o); });
  }
  write_file(dir / "summary.csv",
             [&](std::ostream& o) { pinn::write_summary_csv(std::span<const pinn::RunRecord>(&record, 1), o); });

  std::cout << problem.name << " seed " << record.seed << ": " << pinn::to_string(record.status);
  if (record.final_mse) std::cout << ", final MSE " << pinn::format_real(*record.final_mse);
  std::cout << "\noutput: " << dir.string() << '\n';
  if (record.status != pinn::RunStatus::Converged) {
    if (!result.diagnostic.empty()) std::cerr << "training: " << result.diagnostic << '\n';
    return kFailed;
  }
  return kOk;
}

int cmd_solve(const SolveArgs& args) {
  std::map<std::string, double> params;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) params[key] = *v;
  };
  put("omega0", args.omega0);
  put("epsilon", args.epsilon);
  put("y0", args.y0);
  put("v0", args.v0);
  put("t_end", args.t_end);
  const pinn::OdeProblem problem = pinn::make_problem(args.problem, params);
  const pinn::Trajectory traj =
      args.method == "rk2" ? pinn::rk2_integrate(problem, args.dt) : pinn::rk4_integrate(problem, args.dt);
  if (args.out.empty() || args.out == "-") {
    pinn::write_trajectory_csv(problem, traj, std::cout);
  } else {
    write_file(args.out, [&](std::ostream& o) { pinn::write_trajectory_csv(problem, traj, o); });
  }
  return kOk;
}

std::vector<const pinn::Scenario*> resolve_scenarios(const std::vector<std::string>& ids) {
  std::vector<const pinn::Scenario*> out;
  auto add = [&](const pinn::Scenario* s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };
  for (const std::string& id : ids) {
    if (id == "all") {
      for (const pinn::Scenario& s : pinn::scenarios()) add(&s);
      continue;
    }
    // Bare figure names such as fig3 or fig11 resolve to the scenarios reproducing them.
    if (id.starts_with("fig") && id.find_first_not_of("0123456789", 3) == std::string::npos && id.size() > 3) {
      const auto matches = pinn::scenarios_for_figure(std::stoi(id.substr(3)));
      if (!matches.empty()) {
        for (const pinn::Scenario* s : matches) add(s);
        continue;
      }
    }
    add(&pinn::find_scenario(id));
  }
  return out;
}

int cmd_bench(const BenchArgs& args) {
  const auto selected = resolve_scenarios(args.ids);
  const std::filesystem::path root = args.out.empty() ? pinn::default_output_root() / "bench" : std::filesystem::path(args.out);
  for (const pinn::Scenario* s : selected) pinn::prepare_output_dir(root / s->id);

  pinn::BenchOptions options;
  options.n_seeds = args.seeds;
  options.seed0 = args.seed0;
  options.n_epochs = args.epochs;
  options.threads = args.threads;
  options.record_wall_time = args.wall_time;
  pinn::ReportOptions report;
  report.plots = args.plots;

  bool ok = true;
  for (const pinn::Scenario* s : selected) {
    std::cout << "== " << s->id << ": " << s->description << std::endl;
    const pinn::ScenarioResult result = pinn::run_scenario(*s, options);
    pinn::emit_report(result, root / s->id, report);
    for (const pinn::VariantStats& st : result.stats) {
      std::cout << "  " << st.label << ": " << st.finished << "/" << st.runs << " finished";
      if (st.finished > 0) {
        std::cout << ", MSE min " << pinn::format_real(st.min) << " median " << pinn::format_real(st.median)
                  << " max " << pinn::format_real(st.max);
      }
      std::cout << '\n';
    }
    for (const pinn::ExpectationResult& c : result.checks) {
      std::cout << "  [" << pinn::to_string(c.verdict) << "] " << c.message << '\n';
      if (c.verdict == pinn::Verdict::SoftPass) std::cerr << "warning: " << s->id << ": " << c.message << '\n';
    }
    ok = ok && result.passed();
  }
  std::cout << "reports: " << root.string() << '\n';
  return ok ? kOk : kFailed;
}

int cmd_list_problems() {
  for (const std::string& name : pinn::problem_names()) {
    const pinn::OdeProblem p = pinn::make_problem(name);
    std::cout << name << "  t in [" << pinn::format_real(p.t0) << ", " << pinn::format_real(p.t_end)
              << "], outputs " << p.dim << (p.has_energy() ? ", energy" : "") << (p.has_exact() ? ", closed form" : "")
              << "; parameters:";
    for (const std::string& k : pinn::problem_parameters(name)) std::cout << ' ' << k << '=' << pinn::format_real(p.param(k));
    std::cout << '\n';
  }
  return kOk;
}

int cmd_list_scenarios() {
  for (const pinn::Scenario& s : pinn::scenarios()) {
    std::cout << s.id << "  (fig";
    for (std::size_t i = 0; i < s.figures.size(); ++i) std::cout << (i ? ", " : " ") << s.figures[i];
    std::cout << ")  " << s.description;
    if (s.variants.size() > 1) {
      std::cout << "; variants:";
      for (const pinn::Variant& v : s.variants) std::cout << ' ' << v.name;
    }
    std::cout << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-informed neural networks for ODEs"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train one network from a config file");
  train_cmd->add_option("config", train.config, "config file (key = value lines)")->required();
  train_cmd->add_option("--set", train.overrides, "override a config key, e.g. --set training.n_epochs=100");
  train_cmd->add_option("-o,--output", train.output, "output directory (overrides output_dir)");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "integrate a problem with a fixed-step Runge-Kutta method");
  solve_cmd->add_option("problem", solve.problem, "problem name")->required();
  solve_cmd->add_option("--omega0", solve.omega0);
  solve_cmd->add_option("--epsilon", solve.epsilon);
  solve_cmd->add_option("--y0", solve.y0);
  solve_cmd->add_option("--v0", solve.v0);
  solve_cmd->add_option("--t-end", solve.t_end);
  solve_cmd->add_option("--method", solve.method)->check(CLI::IsMember({"rk2", "rk4"}));
  solve_cmd->add_option("--dt", solve.dt, "time step");
  solve_cmd->add_option("-o,--out", solve.out, "CSV file (standard output by default)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "run benchmark scenarios and write reports");
  bench_cmd->add_option("ids", bench.ids, "scenario ids, figure names (fig3) or 'all'")->required();
  bench_cmd->add_option("--seeds", bench.seeds, "seeds per variant");
  bench_cmd->add_option("--seed0", bench.seed0, "first seed");
  bench_cmd->add_option("--epochs", bench.epochs, "override the epoch count of every variant");
  bench_cmd->add_option("--threads", bench.threads, "worker threads (0: all cores)");
  bench_cmd->add_option("-o,--out", bench.out, "report root directory");
  bench_cmd->add_flag("--plots", bench.plots, "write SVG plots next to the CSVs");
  bench_cmd->add_flag("--wall-time", bench.wall_time, "record wall time (reports are then not byte-reproducible)");

  auto* problems_cmd = app.add_subcommand("list-problems", "list registered problems");
  auto* scenarios_cmd = app.add_subcommand("list-scenarios", "list benchmark scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train);
    if (*solve_cmd) return cmd_solve(solve);
    if (*bench_cmd) return cmd_bench(bench);
    if (*problems_cmd) return cmd_list_problems();
    if (*scenarios_cmd) return cmd_list_scenarios();
  } catch (const pinn::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const pinn::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const pinn::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
