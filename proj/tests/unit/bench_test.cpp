#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pinn/bench.hpp"
#include "pinn/errors.hpp"

using namespace pinn;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pinn-bench-test-" + name);
  fs::remove_all(dir);
  return dir;
}

RunRecord record(const std::string& label, std::uint64_t seed, std::optional<double> mse) {
  RunRecord r;
  r.scenario = label;
  r.seed = seed;
  r.final_mse = mse;
  r.status = mse ? RunStatus::Converged : RunStatus::Aborted;
  return r;
}

Scenario two_variant_scenario() {
  Scenario s;
  s.id = "toy";
  for (const char* name : {"a", "b"}) {
    Variant v;
    v.name = name;
    v.problem = "tutorial";
    s.variants.push_back(v);
  }
  return s;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("registry covers figures 2 to 18") {
  for (int fig : {2, 4, 5, 6, 7, 8, 9, 10, 12, 13, 14, 15, 16, 17, 18}) {
    CHECK_MESSAGE(!scenarios_for_figure(fig).empty(), fig);
  }
  std::set<std::string> ids;
  for (const Scenario& s : scenarios()) {
    CHECK(ids.insert(s.id).second);
    CHECK_FALSE(s.variants.empty());
    for (const Variant& v : s.variants) {
      const OdeProblem p = make_problem(v.problem, v.params);
      CHECK_NOTHROW(v.training.validate(p));
    }
    for (const Expectation& e : s.expectations) {
      if (e.kind == Expectation::Kind::Qualitative) continue;
      CHECK_NOTHROW(s.variant(e.variant));
      if (e.kind == Expectation::Kind::Ratio) CHECK_NOTHROW(s.variant(e.baseline));
    }
  }
  CHECK_THROWS_WITH_AS(find_scenario("fig99"), doctest::Contains("fig7"), ConfigError);
  CHECK(find_scenario("fig7").variants.front().training.network.hidden_layers == 4);
}

TEST_CASE("summary statistics") {
  const Scenario s = two_variant_scenario();
  const std::vector<RunRecord> records{record("toy-a", 1, 4.0), record("toy-a", 2, 1.0), record("toy-a", 3, std::nullopt),
                                       record("toy-a", 4, 2.0), record("toy-a", 5, 8.0), record("toy-b", 1, 0.1)};
  const auto stats = summarize(s, records);
  REQUIRE(stats.size() == 2);
  CHECK(stats[0].runs == 5);
  CHECK(stats[0].finished == 4);
  CHECK(stats[0].min == 1.0);
  CHECK(stats[0].median == 3.0);
  CHECK(stats[0].max == 8.0);
  CHECK(stats[1].median == 0.1);

  std::ostringstream out;
  write_stats_csv(stats, out);
  CHECK(out.str().starts_with("scenario,runs,finished,min_mse,median_mse,max_mse\ntoy-a,5,4,1,3,8\n"));
  std::ostringstream sum;
  write_summary_csv(records, sum);
  CHECK(sum.str().starts_with("scenario,seed,final_mse,status,wall_time_s\ntoy-a,1,4,converged,\n"));
  CHECK(sum.str().find("toy-a,3,,aborted,") != std::string::npos);
}

TEST_CASE("expectation verdicts") {
  Scenario s = two_variant_scenario();
  auto expect = [&](Expectation::Kind kind, Statistic st, double bound, double soft = 0.0) {
    Expectation e;
    e.kind = kind;
    e.variant = "b";
    e.baseline = "a";
    e.statistic = st;
    e.bound = bound;
    e.soft_bound = soft;
    s.expectations = {e};
  };
  const std::vector<RunRecord> records{record("toy-a", 1, 1.0), record("toy-b", 1, 0.05)};
  const auto stats = summarize(s, records);

  expect(Expectation::Kind::Below, Statistic::Min, 0.1);
  CHECK(check_expectations(s, stats)[0].verdict == Verdict::Pass);
  expect(Expectation::Kind::Below, Statistic::Min, 0.01);
  CHECK(check_expectations(s, stats)[0].verdict == Verdict::Fail);
  expect(Expectation::Kind::Above, Statistic::Median, 0.01);
  CHECK(check_expectations(s, stats)[0].verdict == Verdict::Pass);
  expect(Expectation::Kind::Ratio, Statistic::Median, 100.0, 10.0);
  const auto soft = check_expectations(s, stats);
  CHECK(soft[0].verdict == Verdict::SoftPass);
  CHECK(*soft[0].observed == doctest::Approx(20.0));
  expect(Expectation::Kind::Ratio, Statistic::Median, 10.0);
  CHECK(check_expectations(s, stats)[0].verdict == Verdict::Pass);
  expect(Expectation::Kind::Qualitative, Statistic::Median, 0.0);
  CHECK(check_expectations(s, stats)[0].verdict == Verdict::Unchecked);

  // No finished run cannot pass a quantitative check.
  const std::vector<RunRecord> aborted{record("toy-a", 1, 1.0), record("toy-b", 1, std::nullopt)};
  expect(Expectation::Kind::Below, Statistic::Min, 1e9);
  CHECK(check_expectations(s, summarize(s, aborted))[0].verdict == Verdict::Fail);
}

TEST_CASE("a short scenario run and its report") {
  const Scenario& s = find_scenario("fig12");
  BenchOptions o;
  o.n_seeds = 1;
  o.n_epochs = 30;
  o.threads = 1;
  const ScenarioResult r = run_scenario(s, o);
  REQUIRE(r.records.size() == 1);
  const RunRecord& rec = r.records.front();
  CHECK(rec.history.size() == 30);
  CHECK(rec.final_mse.has_value());
  CHECK(rec.phase.rows() == 2);
  CHECK_FALSE(rec.wall_time_s.has_value());

  const fs::path dir = scratch_dir("fig12");
  emit_report(r, dir, {true});
  const fs::path run = dir / "fig12" / "seed-1";
  for (const char* f : {"epochs.csv", "solution.csv", "phase.csv", "model.txt", "solution.svg", "history.svg"}) {
    CHECK_MESSAGE(fs::exists(run / f), f);
  }
  for (const char* f : {"summary.csv", "stats.csv", "checks.csv"}) CHECK(fs::exists(dir / f));
  CHECK(slurp(run / "solution.csv").starts_with("t,y_hat1,y_hat2,y_oracle1,y_oracle2\n"));
  CHECK(slurp(run / "phase.csv").starts_with("y1,y2\n"));
  fs::remove_all(dir);
}

TEST_CASE("multi-variant output files") {
  const Scenario& s = find_scenario("fig18");
  BenchOptions o;
  o.n_seeds = 1;
  o.n_epochs = 5;
  o.threads = 2;
  const ScenarioResult r = run_scenario(s, o);
  CHECK(r.records.size() == s.variants.size());
  const fs::path dir = scratch_dir("fig18");
  emit_report(r, dir);
  for (const Variant& v : s.variants) {
    CHECK(fs::exists(dir / s.label(v) / "seed-1" / "epochs.csv"));
    CHECK(fs::exists(dir / s.label(v) / "seed-1" / "phase.csv"));  // scalar second order: (y, dy/dt)
  }
  fs::remove_all(dir);
}

TEST_CASE("results do not depend on the thread count") {
  const Scenario& s = find_scenario("fig9-comparison");
  BenchOptions o;
  o.n_seeds = 2;
  o.n_epochs = 25;
  o.threads = 1;
  const ScenarioResult serial = run_scenario(s, o);
  o.threads = 3;
  const ScenarioResult parallel = run_scenario(s, o);
  std::ostringstream a, b;
  write_summary_csv(serial.records, a);
  write_summary_csv(parallel.records, b);
  CHECK(a.str() == b.str());
  CHECK(serial.records.size() == 4);
}

TEST_CASE("oracle-only scenarios") {
  const Scenario& s = find_scenario("fig16");
  BenchOptions o;
  o.n_seeds = 3;
  const ScenarioResult r = run_scenario(s, o);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records.front().history.empty());
  CHECK(*r.records.front().final_mse < 1e-6);
  CHECK(r.passed());
}

TEST_CASE("report errors") {
  ScenarioResult empty;
  empty.scenario = &find_scenario("fig7");
  CHECK_THROWS_AS(emit_report(empty, scratch_dir("empty")), ConfigError);
  CHECK_THROWS_AS(prepare_output_dir("/proc/pinn-cannot-write-here"), IoError);
}

}  // TEST_SUITE
