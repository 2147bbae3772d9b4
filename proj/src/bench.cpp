#include "pinn/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "pinn/csv.hpp"
#include "pinn/errors.hpp"
#include "pinn/evaluation.hpp"
#include "pinn/network.hpp"

namespace pinn {
namespace {

struct Hyper {
  int layers = 3;
  std::size_t n_data = 1;
  std::size_t n_c = 50;
  double eta = 3e-3;
  double w_f = 0.0;
  double w_e = 0.0;
  std::size_t epochs = 20000;
};

TrainingConfig training(const Hyper& h) {
  TrainingConfig c;
  c.network.hidden_layers = h.layers;
  c.network.neurons_per_layer = 32;
  c.n_data = h.n_data;
  c.n_c = h.n_c;
  c.eta = h.eta;
  c.weights.physics = h.w_f;
  c.weights.energy = h.w_e;
  c.n_epochs = h.epochs;
  return c;
}

Variant variant(std::string name, std::string problem, std::map<std::string, double> params, const Hyper& h) {
  return Variant{std::move(name), std::move(problem), std::move(params), training(h), std::nullopt};
}

Expectation below(std::string variant, Statistic s, double bound, std::string note) {
  return {Expectation::Kind::Below, std::move(variant), {}, s, bound, 0.0, std::move(note)};
}

Expectation above(std::string variant, Statistic s, double bound, std::string note) {
  return {Expectation::Kind::Above, std::move(variant), {}, s, bound, 0.0, std::move(note)};
}

Expectation ratio(std::string variant, std::string baseline, double bound, double soft, std::string note) {
  return {Expectation::Kind::Ratio, std::move(variant), std::move(baseline), Statistic::Median, bound, soft,
          std::move(note)};
}

Expectation qualitative(std::string note) {
  Expectation e;
  e.note = std::move(note);
  return e;
}

Scenario make_scenario(std::string id, std::vector<int> figures, std::string description) {
  Scenario s;
  s.id = std::move(id);
  s.figures = std::move(figures);
  s.description = std::move(description);
  return s;
}

std::vector<Scenario> build_registry() {
  std::vector<Scenario> all;
  const Interval left{0.0, 18.0};
  const Interval right{18.0, 30.0};

  // Tutorial, data only.
  {
    Scenario s = make_scenario("fig2", {2, 3}, "tutorial, normal NN with 101 data points, snapshots at 4000 and 24000 epochs");
    s.variants = {variant("nt4000", "tutorial", {}, {.n_data = 101, .epochs = 4000}),
                  variant("nt24000", "tutorial", {}, {.n_data = 101, .epochs = 24000})};
    s.expectations = {below("nt24000", Statistic::Median, 1e-2, "dense data alone fits the tutorial"),
                      qualitative("nt4000 is not fully converged yet")};
    all.push_back(std::move(s));
  }
  {
    Scenario s = make_scenario("fig4-left", {4}, "tutorial, normal NN with 26 data points on the whole interval");
    s.variants = {variant("", "tutorial", {}, {.n_data = 26, .epochs = 48000})};
    s.expectations = {qualitative("sparse data alone gives a poor fit between the points")};
    all.push_back(std::move(s));
  }
  {
    Scenario s = make_scenario("fig4-right", {4}, "tutorial, normal NN with 61 data points on the left subinterval");
    Variant v = variant("", "tutorial", {}, {.n_data = 61, .epochs = 48000});
    v.training.data_interval = left;
    v.eval_interval = right;
    s.variants = {v};
    s.expectations = {above("", Statistic::Median, 0.1, "no acceptable solution in the data-free right subinterval")};
    all.push_back(std::move(s));
  }

  // Tutorial, physics informed.
  {
    Scenario s = make_scenario("fig5-left", {5}, "tutorial PINN, 26 data points, 50 collocation points");
    s.variants = {variant("", "tutorial", {}, {.n_data = 26, .n_c = 50, .w_f = 6e-2, .epochs = 40000})};
    s.expectations = {below("", Statistic::Min, 1e-2, "the residual term repairs the sparse-data fit")};
    all.push_back(std::move(s));
  }
  {
    Scenario s = make_scenario("fig5-right", {5}, "tutorial PINN, 61 left data points, 50 collocation points");
    Variant v = variant("", "tutorial", {}, {.n_data = 61, .n_c = 50, .w_f = 6e-2, .epochs = 40000});
    v.training.data_interval = left;
    s.variants = {v};
    s.expectations = {below("", Statistic::Min, 1e-2, "the residual term extends the fit to the right subinterval")};
    all.push_back(std::move(s));
  }
  {
    Scenario s = make_scenario("fig6", {6}, "tutorial PINN, 61 left data points, 30 collocation points on the right only");
    Variant v = variant("", "tutorial", {}, {.n_data = 61, .n_c = 30, .w_f = 6e-2, .epochs = 40000});
    v.training.data_interval = left;
    v.training.collocation_interval = right;
    s.variants = {v};
    s.expectations = {below("", Statistic::Min, 1e-2, "complementary data and collocation sets suffice")};
    all.push_back(std::move(s));
  }
  {
    Scenario s = make_scenario("fig7", {7}, "tutorial PINN from the initial value alone, 4x32 network");
    s.variants = {variant("", "tutorial", {}, {.layers = 4, .n_data = 1, .n_c = 50, .w_f = 6e-2, .epochs = 60000})};
    s.expectations = {below("", Statistic::Min, 1e-2, "one initial value plus the residual is enough")};
    all.push_back(std::move(s));
  }

  // Harmonic oscillator.
  const std::map<std::string, double> harmonic{{"omega0", 20.0}};
  const Hyper harmonic_h{.n_c = 40, .eta = 3e-4, .w_f = 3e-4, .epochs = 54000};
  {
    Scenario s = make_scenario("fig8-left", {8}, "harmonic PINN from the initial value alone");
    Hyper h = harmonic_h;
    h.n_data = 1;
    s.variants = {variant("", "harmonic", harmonic, h)};
    s.expectations = {qualitative("one data value is not enough for a second-order equation")};
    all.push_back(std::move(s));
  }
  {
    Scenario s = make_scenario("fig8-right", {8}, "harmonic PINN with two data values and the energy term");
    Hyper h = harmonic_h;
    h.n_data = 2;
    h.w_e = 3e-4;
    s.variants = {variant("", "harmonic", harmonic, h)};
    s.expectations = {qualitative("close to cos(20t) over the whole interval")};
    all.push_back(std::move(s));
  }
  {
    Scenario s = make_scenario("fig9-comparison", {9}, "harmonic PINN with two data values, with and without the energy term");
    Hyper h = harmonic_h;
    h.n_data = 2;
    s.variants = {variant("no-energy", "harmonic", harmonic, h)};
    h.w_e = 3e-4;
    s.variants.push_back(variant("energy", "harmonic", harmonic, h));
    s.expectations = {ratio("energy", "no-energy", 100.0, 10.0, "energy conservation lowers the MSE by two orders")};
    all.push_back(std::move(s));
  }

  // Nonlinear pendulum.
  {
    Scenario s = make_scenario("fig10", {10, 11}, "pendulum PINN from the initial value, 3 against 4 hidden layers");
    const std::map<std::string, double> p{{"omega0", 25.0}};
    Hyper h{.n_data = 1, .n_c = 40, .eta = 1e-3, .w_f = 3e-6, .w_e = 3e-7, .epochs = 72000};
    h.layers = 3;
    s.variants = {variant("3-layers", "pendulum", p, h)};
    h.layers = 4;
    s.variants.push_back(variant("4-layers", "pendulum", p, h));
    s.expectations = {ratio("4-layers", "3-layers", 10.0, 0.0, "3 layers settle on a wrong solution")};
    all.push_back(std::move(s));
  }
  {
    Scenario s = make_scenario("fig12", {12}, "pendulum as a first-order system, both initial values, energy term");
    s.variants = {variant("", "pendulum-system", {{"omega0", 25.0}},
                          {.layers = 4, .n_data = 1, .n_c = 40, .eta = 3e-3, .w_f = 1e-1, .w_e = 2e-6,
                           .epochs = 50000})};
    s.expectations = {qualitative("y1 and y2 follow the oracle; closed orbit in phase space")};
    all.push_back(std::move(s));
  }
  {
    Scenario s = make_scenario("fig13", {13}, "anharmonic oscillator, two data values, energy term, 5 hidden layers");
    s.variants = {variant("", "anharmonic", {{"omega0", 15.5}, {"y0", 1.5}},
                          {.layers = 5, .n_data = 2, .n_c = 40, .eta = 1.5e-3, .w_f = 1e-5, .w_e = 1e-6,
                           .epochs = 50000})};
    s.expectations = {qualitative("follows the oracle over the whole interval")};
    all.push_back(std::move(s));
  }
  for (const auto& [id, figure, y0] : {std::tuple{"fig14", 14, 1.8}, std::tuple{"fig15", 15, 1.38}}) {
    Scenario s = make_scenario(id, {figure}, "double well system, two data times per variable, energy term, 5 hidden layers");
    s.variants = {variant("", "double-well", {{"omega0", 12.0}, {"y0", y0}},
                          {.layers = 5, .n_data = 2, .n_c = 40, .eta = 1e-3, .w_f = 6e-3, .w_e = 6e-5,
                           .epochs = 50000})};
    s.expectations = {qualitative("follows the oracle in time and in phase space")};
    all.push_back(std::move(s));
  }

  // Van der Pol.
  for (const auto& [id, figure, eps] : {std::tuple{"fig16", 16, 5.0}, std::tuple{"fig17", 17, 1.0}}) {
    Scenario s = make_scenario(id, {figure}, "Van der Pol oracle trajectory and limit cycle, no training");
    s.variants = {Variant{"", "vdp", {{"epsilon", eps}, {"t_end", 3.0}}, TrainingConfig{}, std::nullopt}};
    s.oracle_only = true;
    s.n_seeds = 1;
    s.expectations = {below("", Statistic::Max, 1e-6, "coarse RK4 agrees with the fine oracle")};
    all.push_back(std::move(s));
  }
  {
    Scenario s = make_scenario("fig18", {18}, "Van der Pol PINN for eps = 1/3, 1 and 5");
    const Interval early{0.0, 0.15};
    const Hyper h{.n_data = 3, .eta = 7e-4, .w_f = 1e-4, .epochs = 50000};
    auto vdp = [&](std::string name, double eps, std::size_t n_data, std::size_t n_c, double w_f, bool sparse) {
      Hyper k = h;
      k.n_data = n_data;
      k.n_c = n_c;
      k.w_f = w_f;
      Variant v = variant(std::move(name), "vdp", {{"epsilon", eps}}, k);
      if (sparse) v.training.data_interval = early;
      return v;
    };
    s.variants = {vdp("eps1-3", 1.0 / 3.0, 3, 48, 1e-4, true), vdp("eps1", 1.0, 3, 60, 1e-4, true),
                  vdp("eps5-sparse", 5.0, 3, 70, 1e-5, true), vdp("eps5", 5.0, 20, 70, 1e-5, false)};
    s.expectations = {below("eps1-3", Statistic::Min, 5e-2, "three early data values suffice for weak nonlinearity"),
                      above("eps5-sparse", Statistic::Median, 5e-2, "three early values are not enough for eps = 5"),
                      below("eps5", Statistic::Min, 5e-2, "eps = 5 needs data over the whole interval"),
                      qualitative("eps1 sits between the two regimes")};
    all.push_back(std::move(s));
  }
  return all;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Eigen::MatrixXd phase_of(const OdeProblem& problem, const Mlp& mlp, std::span<const double> times) {
  if (problem.dim == 2) return mlp.forward_batch(times);
  if (problem.form != OdeForm::SecondOrder) return {};
  const JetBatch jets(mlp, times, 2);
  Eigen::MatrixXd phase(2, static_cast<Eigen::Index>(times.size()));
  phase.row(0) = jets.value().row(0);
  phase.row(1) = jets.first().row(0);
  return phase;
}

struct Job {
  std::size_t variant = 0;
  std::uint64_t seed = 0;
};

RunRecord run_oracle_only(const Scenario& scenario, const Variant& v, const OdeProblem& problem,
                          const Oracle& oracle) {
  RunRecord r;
  r.scenario = scenario.label(v);
  r.variant = v.name;
  r.seed = scenario.seed0;
  const Trajectory coarse = rk4_integrate(problem, scenario.oracle_dt);
  const Eigen::Index n = coarse.size();
  r.eval_times.assign(coarse.times.data(), coarse.times.data() + n);
  r.prediction.resize(problem.dim, n);
  r.phase.resize(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const State s = coarse.state(i);
    r.prediction.col(i) = problem.outputs_from_state(s);
    r.phase.col(i) = s.head(2);
  }
  r.reference = oracle.evaluate(r.eval_times);
  r.final_mse = mean_squared_difference(r.prediction, r.reference);
  const Eigen::VectorXd mean = r.reference.rowwise().mean();
  r.constant_predictor_mse = (r.reference.colwise() - mean).array().square().mean();
  r.status = *r.final_mse > kDivergenceFactor * r.constant_predictor_mse ? RunStatus::Diverged : RunStatus::Converged;
  return r;
}

RunRecord run_training(const Scenario& scenario, const Variant& v, const OdeProblem& problem, const Oracle& oracle,
                       const EvaluationGrid& grid, std::uint64_t seed, const BenchOptions& options) {
  RunRecord r;
  r.scenario = scenario.label(v);
  r.variant = v.name;
  r.seed = seed;
  r.eval_times = grid.times();
  r.reference = grid.reference();
  r.constant_predictor_mse = grid.constant_predictor_mse();
  const auto start = std::chrono::steady_clock::now();
  try {
    TrainingConfig config = v.training;
    config.seed = seed;
    if (options.n_epochs) config.n_epochs = *options.n_epochs;
    TrainingOptions to;
    to.oracle = &oracle;
    TrainingResult result = train(problem, config, to);
    r.history = std::move(result.history);
    std::ostringstream model;
    save_model(result.network, model);
    r.model = model.str();
    r.prediction = result.network.forward_batch(r.eval_times);
    r.phase = phase_of(problem, result.network, r.eval_times);
    if (result.status == TrainingStatus::Aborted) {
      r.status = RunStatus::Aborted;
      r.diagnostic = result.diagnostic;
    } else {
      r.final_mse = grid.mse(result.network);
      r.status = *r.final_mse > kDivergenceFactor * r.constant_predictor_mse ? RunStatus::Diverged
                                                                              : RunStatus::Converged;
    }
  } catch (const std::exception& e) {
    r.status = RunStatus::Aborted;
    r.final_mse.reset();
    r.diagnostic = e.what();
  }
  if (options.record_wall_time) {
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

// ---------------------------------------------------------------------------
// Minimal SVG line plots.

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

void write_svg_plot(std::ostream& out, const std::string& title, const std::vector<Series>& series, bool log_y) {
  static const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e"};
  const double w = 640, h = 400, ml = 60, mr = 20, mt = 30, mb = 40;
  auto ty = [log_y](double y) { return log_y ? std::log10(y) : y; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double y = ty(s.y[i]);
      if (!std::isfinite(y)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (ty(y) - y0) / (y1 - y0) * (h - mt - mb); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n"
      << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr << "\" height=\"" << h - mt - mb
      << "\" fill=\"none\" stroke=\"black\"/>\n"
      << "<text x=\"" << ml << "\" y=\"" << h - 20 << "\" font-size=\"11\">" << format_real(x0) << "</text>\n"
      << "<text x=\"" << w - mr << "\" y=\"" << h - 20 << "\" font-size=\"11\" text-anchor=\"end\">"
      << format_real(x1) << "</text>\n"
      << "<text x=\"5\" y=\"" << h - mb << "\" font-size=\"11\">" << (log_y ? "1e" : "") << format_real(y0)
      << "</text>\n"
      << "<text x=\"5\" y=\"" << mt + 10 << "\" font-size=\"11\">" << (log_y ? "1e" : "") << format_real(y1)
      << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* color = colors[k % 4];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(ty(s.y[i]))) continue;
      out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    out << "\"/>\n<text x=\"" << w - mr - 5 << "\" y=\"" << mt + 15 * (k + 1) << "\" font-size=\"11\" fill=\""
        << color << "\" text-anchor=\"end\">" << s.name << "</text>\n";
  }
  out << "</svg>\n";
}

void write_plots(const RunRecord& r, const std::filesystem::path& dir) {
  std::vector<Series> solution;
  for (Eigen::Index k = 0; k < r.reference.rows(); ++k) {
    const std::string suffix = r.reference.rows() > 1 ? std::to_string(k + 1) : "";
    Series oracle{"oracle y" + suffix, r.eval_times, {}};
    oracle.y.assign(r.reference.row(k).begin(), r.reference.row(k).end());
    solution.push_back(std::move(oracle));
    if (r.prediction.rows() > k) {
      Series pred{"prediction y" + suffix, r.eval_times, {}};
      pred.y.assign(r.prediction.row(k).begin(), r.prediction.row(k).end());
      solution.push_back(std::move(pred));
    }
  }
  {
    auto out = open_for_write(dir / "solution.svg");
    write_svg_plot(out, r.scenario + " seed " + std::to_string(r.seed), solution, false);
  }
  if (r.history.empty()) return;
  Series loss{"loss", {}, {}}, mse{"mse", {}, {}};
  for (const EpochRecord& e : r.history) {
    loss.x.push_back(static_cast<double>(e.epoch));
    loss.y.push_back(e.l_total);
    if (e.mse) {
      mse.x.push_back(static_cast<double>(e.epoch));
      mse.y.push_back(*e.mse);
    }
  }
  auto out = open_for_write(dir / "history.svg");
  write_svg_plot(out, r.scenario + " loss and MSE (log10)", {loss, mse}, true);
}

}  // namespace

// ---------------------------------------------------------------------------

const Variant& Scenario::variant(const std::string& name) const {
  for (const Variant& v : variants) {
    if (v.name == name) return v;
  }
  throw ConfigError("scenario " + id + " has no variant '" + name + "'");
}

std::string Scenario::label(const Variant& v) const { return v.name.empty() ? id : id + "-" + v.name; }

const std::vector<Scenario>& scenarios() {
  static const std::vector<Scenario> registry = build_registry();
  return registry;
}

std::vector<std::string> scenario_ids() {
  std::vector<std::string> ids;
  for (const Scenario& s : scenarios()) ids.push_back(s.id);
  return ids;
}

const Scenario& find_scenario(const std::string& id) {
  for (const Scenario& s : scenarios()) {
    if (s.id == id) return s;
  }
  std::string valid;
  for (const std::string& s : scenario_ids()) valid += (valid.empty() ? "" : ", ") + s;
  throw ConfigError("unknown scenario '" + id + "'; valid ids: " + valid);
}

std::vector<const Scenario*> scenarios_for_figure(int figure) {
  std::vector<const Scenario*> out;
  for (const Scenario& s : scenarios()) {
    if (std::find(s.figures.begin(), s.figures.end(), figure) != s.figures.end()) out.push_back(&s);
  }
  return out;
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "converged";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::Aborted: return "aborted";
  }
  return "?";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::SoftPass: return "soft-pass";
    case Verdict::Fail: return "fail";
    case Verdict::Unchecked: return "unchecked";
  }
  return "?";
}

double VariantStats::statistic(Statistic s) const {
  switch (s) {
    case Statistic::Min: return min;
    case Statistic::Median: return median;
    case Statistic::Max: return max;
  }
  return median;
}

bool ScenarioResult::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const ExpectationResult& c) { return c.verdict == Verdict::Fail; });
}

ScenarioResult run_scenario(const Scenario& scenario, const BenchOptions& options) {
  const std::size_t n_seeds = scenario.oracle_only ? 1 : options.n_seeds.value_or(scenario.n_seeds);
  const std::uint64_t seed0 = options.seed0.value_or(scenario.seed0);
  if (n_seeds == 0) throw ConfigError("at least one seed is required");

  // Problems, oracles and evaluation grids are shared read-only by every run of a variant.
  std::vector<OdeProblem> problems;
  problems.reserve(scenario.variants.size());
  for (const Variant& v : scenario.variants) {
    problems.push_back(make_problem(v.problem, v.params));
    if (!scenario.oracle_only) v.training.validate(problems.back());
  }
  std::vector<Oracle> oracles;
  std::vector<EvaluationGrid> grids;
  oracles.reserve(problems.size());
  for (std::size_t i = 0; i < problems.size(); ++i) {
    oracles.emplace_back(problems[i]);
    grids.emplace_back(oracles.back(), scenario.variants[i].training.n_eval, scenario.variants[i].eval_interval);
  }

  std::vector<Job> jobs;
  for (std::size_t v = 0; v < scenario.variants.size(); ++v) {
    for (std::size_t k = 0; k < n_seeds; ++k) jobs.push_back({v, seed0 + k});
  }
  std::vector<RunRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      const Variant& v = scenario.variants[job.variant];
      if (scenario.oracle_only) {
        records[i] = run_oracle_only(scenario, v, problems[job.variant], oracles[job.variant]);
      } else {
        records[i] =
            run_training(scenario, v, problems[job.variant], oracles[job.variant], grids[job.variant], job.seed, options);
      }
    }
  };
  unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ScenarioResult result;
  result.scenario = &scenario;
  result.records = std::move(records);
  result.stats = summarize(scenario, result.records);
  result.checks = check_expectations(scenario, result.stats);
  return result;
}

std::vector<VariantStats> summarize(const Scenario& scenario, std::span<const RunRecord> records) {
  std::vector<VariantStats> out;
  for (const Variant& v : scenario.variants) {
    VariantStats s;
    s.label = scenario.label(v);
    std::vector<double> mses;
    for (const RunRecord& r : records) {
      if (r.scenario != s.label) continue;
      ++s.runs;
      if (r.final_mse) mses.push_back(*r.final_mse);
    }
    s.finished = mses.size();
    if (mses.empty()) {
      s.min = s.median = s.max = std::numeric_limits<double>::quiet_NaN();
    } else {
      s.min = *std::min_element(mses.begin(), mses.end());
      s.max = *std::max_element(mses.begin(), mses.end());
      s.median = median_of(mses);
    }
    out.push_back(s);
  }
  return out;
}

std::vector<ExpectationResult> check_expectations(const Scenario& scenario, std::span<const VariantStats> stats) {
  auto find = [&](const std::string& variant) -> const VariantStats& {
    const std::string label = scenario.label(scenario.variant(variant));
    for (const VariantStats& s : stats) {
      if (s.label == label) return s;
    }
    throw StructuralError("no statistics for " + label);
  };
  const char* names[] = {"min", "median", "max"};
  std::vector<ExpectationResult> out;
  for (const Expectation& e : scenario.expectations) {
    ExpectationResult r{e, Verdict::Unchecked, std::nullopt, e.note};
    if (e.kind == Expectation::Kind::Qualitative) {
      out.push_back(r);
      continue;
    }
    const VariantStats& s = find(e.variant);
    const std::string stat = names[static_cast<int>(e.statistic)];
    if (s.finished == 0) {
      r.verdict = Verdict::Fail;
      r.message = s.label + ": no finished runs";
      out.push_back(r);
      continue;
    }
    const double value = s.statistic(e.statistic);
    switch (e.kind) {
      case Expectation::Kind::Below:
        r.observed = value;
        r.verdict = value < e.bound ? Verdict::Pass : Verdict::Fail;
        r.message = stat + " MSE of " + s.label + " = " + format_real(value) + ", required < " + format_real(e.bound);
        break;
      case Expectation::Kind::Above:
        r.observed = value;
        r.verdict = value > e.bound ? Verdict::Pass : Verdict::Fail;
        r.message = stat + " MSE of " + s.label + " = " + format_real(value) + ", required > " + format_real(e.bound);
        break;
      case Expectation::Kind::Ratio: {
        const VariantStats& b = find(e.baseline);
        if (b.finished == 0) {
          r.verdict = Verdict::Fail;
          r.message = b.label + ": no finished runs";
          break;
        }
        const double q = b.statistic(e.statistic) / value;
        r.observed = q;
        if (q >= e.bound) {
          r.verdict = Verdict::Pass;
        } else if (e.soft_bound > 0.0 && q >= e.soft_bound) {
          r.verdict = Verdict::SoftPass;
        } else {
          r.verdict = Verdict::Fail;
        }
        r.message = stat + " MSE ratio " + b.label + " / " + s.label + " = " + format_real(q) + ", required >= " +
                    format_real(e.bound);
        if (r.verdict == Verdict::SoftPass) {
          r.message += " (soft pass: >= " + format_real(e.soft_bound) + ")";
        }
        break;
      }
      case Expectation::Kind::Qualitative:
        break;
    }
    out.push_back(r);
  }
  return out;
}

void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const std::filesystem::path probe = dir / ".write-probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok")) throw IoError("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

void write_summary_csv(std::span<const RunRecord> records, std::ostream& out) {
  out << "scenario,seed,final_mse,status,wall_time_s\n";
  for (const RunRecord& r : records) {
    out << r.scenario << ',' << r.seed << ',' << format_real(r.final_mse) << ',' << to_string(r.status) << ','
        << format_real(r.wall_time_s) << '\n';
  }
}

void write_stats_csv(std::span<const VariantStats> stats, std::ostream& out) {
  out << "scenario,runs,finished,min_mse,median_mse,max_mse\n";
  for (const VariantStats& s : stats) {
    const bool any = s.finished > 0;
    out << s.label << ',' << s.runs << ',' << s.finished << ',' << (any ? format_real(s.min) : "") << ','
        << (any ? format_real(s.median) : "") << ',' << (any ? format_real(s.max) : "") << '\n';
  }
}

void write_solution_csv(const RunRecord& r, std::ostream& out) {
  const Eigen::Index dim = r.reference.rows();
  const bool predicted = r.prediction.size() > 0;
  out << 't';
  if (predicted) {
    for (Eigen::Index k = 0; k < dim; ++k) out << ",y_hat" << (dim > 1 ? std::to_string(k + 1) : "");
  }
  for (Eigen::Index k = 0; k < dim; ++k) out << ",y_oracle" << (dim > 1 ? std::to_string(k + 1) : "");
  out << '\n';
  for (std::size_t i = 0; i < r.eval_times.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    out << format_real(r.eval_times[i]);
    if (predicted) {
      for (Eigen::Index k = 0; k < dim; ++k) out << ',' << format_real(r.prediction(k, c));
    }
    for (Eigen::Index k = 0; k < dim; ++k) out << ',' << format_real(r.reference(k, c));
    out << '\n';
  }
}

void write_phase_csv(const RunRecord& r, std::ostream& out) {
  if (r.phase.rows() != 2) throw StructuralError("run " + r.scenario + " has no phase trajectory");
  out << "y1,y2\n";
  for (Eigen::Index i = 0; i < r.phase.cols(); ++i) {
    out << format_real(r.phase(0, i)) << ',' << format_real(r.phase(1, i)) << '\n';
  }
}

void emit_report(const ScenarioResult& result, const std::filesystem::path& dir, const ReportOptions& options) {
  if (result.records.empty()) throw ConfigError("no run records to report");
  prepare_output_dir(dir);
  {
    auto out = open_for_write(dir / "summary.csv");
    write_summary_csv(result.records, out);
  }
  {
    auto out = open_for_write(dir / "stats.csv");
    write_stats_csv(result.stats, out);
  }
  {
    auto out = open_for_write(dir / "checks.csv");
    out << "kind,verdict,observed,message\n";
    const char* kinds[] = {"qualitative", "below", "above", "ratio"};
    for (const ExpectationResult& c : result.checks) {
      out << kinds[static_cast<int>(c.expectation.kind)] << ',' << to_string(c.verdict) << ','
          << format_real(c.observed) << ",\"" << c.message << "\"\n";
    }
  }
  for (const RunRecord& r : result.records) {
    const std::filesystem::path run = dir / r.scenario / ("seed-" + std::to_string(r.seed));
    prepare_output_dir(run);
    if (!r.history.empty() || !r.model.empty()) {
      auto out = open_for_write(run / "epochs.csv");
      write_epochs_csv(r.history, out);
    }
    if (!r.eval_times.empty()) {
      auto out = open_for_write(run / "solution.csv");
      write_solution_csv(r, out);
    }
    if (r.phase.rows() == 2) {
      auto out = open_for_write(run / "phase.csv");
      write_phase_csv(r, out);
    }
    if (!r.model.empty()) open_for_write(run / "model.txt") << r.model;
    if (!r.diagnostic.empty()) open_for_write(run / "diagnostic.txt") << r.diagnostic << '\n';
    if (options.plots && !r.eval_times.empty()) write_plots(r, run);
  }
}

}  // namespace pinn
