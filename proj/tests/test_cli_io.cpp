#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "relfuzz/cli_io.hpp"
#include "relfuzz/errors.hpp"

using namespace relfuzz;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

const fs::path config_dir = RELFUZZ_CONFIG_DIR;

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string feasible_text() { return read_file(config_dir / "example_feasible.cfg"); }

std::string replace_line(std::string text, const std::string& key, const std::string& line) {
  const auto pos = text.find("\n" + key + " =");
  REQUIRE(pos != std::string::npos);
  const auto end = text.find('\n', pos + 1);
  return text.replace(pos + 1, end - pos - 1, line);
}

RunConfig parse(const std::string& text, const fs::path& base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

std::map<std::string, std::string> key_values(const std::string& text, const std::string& section) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text.substr(text.find(section)));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("relfuzz_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("shipped example configurations load") {
  const RunConfig cfg = load_config(config_dir / "example_feasible.cfg");
  REQUIRE(cfg.model);
  CHECK(cfg.model->fault_content() == 143.32);
  CHECK(cfg.model->detection_rate() == 0.1246);
  CHECK(cfg.cost.setup_cost == 50);
  CHECK(cfg.cost.testing_removal_cost_rate == 60);
  CHECK(cfg.cost.testing_effort_coefficient == 700);
  CHECK(cfg.cost.warranty_removal_cost_rate == 3600);
  CHECK(cfg.cost.effort_exponent == 0.95);
  CHECK(cfg.cost.mean_warranty_removal_time == 0.5);
  CHECK(cfg.cost.mean_testing_removal_time == 0.1);
  CHECK(cfg.cost.warranty_length == 450);
  CHECK(cfg.targets.mission_time == 1);
  CHECK(cfg.targets.budget == 26000);
  CHECK(cfg.targets.cost_tolerance == 31000);
  CHECK(cfg.targets.reliability_goal == 0.95);
  CHECK(cfg.targets.reliability_tolerance == 0.80);
  CHECK_FALSE(cfg.failure_data);

  const RunConfig infeasible = load_config(config_dir / "example_infeasible.cfg");
  CHECK(infeasible.targets.budget == 23000);
  CHECK(infeasible.targets.cost_tolerance == 24500);
}

TEST_CASE("configuration errors name the key") {
  auto error_key = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<no error>");
  };
  const std::string base = feasible_text();
  CHECK(error_key(replace_line(base, "cost_tolerance", "cost_tolerance = 26000")) == "cost_tolerance");
  CHECK(error_key(replace_line(base, "c2", "c2 = seven hundred")) == "c2");
  CHECK(error_key(replace_line(base, "budget", "# budget removed")) == "budget");
  CHECK(error_key(replace_line(base, "reliability_tolerance", "reliability_tolerance = 0.97")) ==
        "reliability_tolerance");
  CHECK(error_key(replace_line(base, "alpha_exp", "alpha_exp = 1.2")) == "alpha_exp");
  CHECK(error_key(base + "budget = 1\n") == "budget");
  CHECK(error_key(base + "colour = blue\n") == "colour");
  CHECK(error_key(base + "failure_data = data.txt\n") == "failure_data");
  CHECK(error_key(base + "removal_rate_y = 2\nremoval_cutoff_y = 1\n") == "mu_y");

  try {
    parse(replace_line(base, "cost_tolerance", "cost_tolerance = 26000"));
  } catch (const ConfigError& e) {
    CHECK(e.line() > 0);
    CHECK(std::string(e.what()).find("cost_tolerance") != std::string::npos);
  }
}

TEST_CASE("every violated key is reported at once") {
  std::string text = replace_line(feasible_text(), "c1", "c1 = -3");
  text = replace_line(text, "mission_time", "mission_time = 0");
  try {
    parse(text);
    FAIL("expected a configuration error");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("c1") != std::string::npos);
    CHECK(what.find("mission_time") != std::string::npos);
  }
}

TEST_CASE("removal times can come from a truncated exponential") {
  std::string text = replace_line(feasible_text(), "mu_y", "removal_rate_y = 1\nremoval_cutoff_y = 1");
  const RunConfig cfg = parse(text);
  REQUIRE(cfg.testing_removal);
  CHECK(cfg.cost.mean_testing_removal_time == Approx(0.41802329313067358).epsilon(1e-12));
  std::ostringstream out;
  write_config(out, cfg);
  CHECK(out.str().find("removal_rate_y = 1") != std::string::npos);
  const RunConfig back = parse(out.str());
  CHECK(back.cost.mean_testing_removal_time == cfg.cost.mean_testing_removal_time);
}

TEST_CASE("solve reports the feasible branch") {
  const SolveReport report = run_solve(load_config(config_dir / "example_feasible.cfg"));
  CHECK(std::string(report.branch()) == "feasible");
  CHECK(report.exit_status() == exit_code::feasible);
  CHECK(report.decision.release_time == Approx(42.72).epsilon(0.05 / 42.72));

  std::ostringstream out;
  write_solve_report(out, report);
  const auto kv = key_values(out.str(), "[decision]");
  CHECK(kv.at("branch") == "feasible");
  // Memberships in the report are re-checkable from the configuration.
  const double t = std::stod(kv.at("release_time"));
  const MembershipPair mu = membership_pair(report.problem, t, false);
  CHECK(std::abs(std::stod(kv.at("mu_cost")) - mu.cost) < 1e-9);
  CHECK(std::abs(std::stod(kv.at("mu_reliability")) - mu.reliability) < 1e-9);
}

TEST_CASE("solve falls back to goal programming") {
  const SolveReport report = run_solve(load_config(config_dir / "example_infeasible.cfg"));
  CHECK(std::string(report.branch()) == "goal_compromise");
  CHECK(report.exit_status() == exit_code::goal_compromise);
  REQUIRE(report.infeasibility);
  CHECK(report.decision.release_time == Approx(34.68).epsilon(0.05 / 34.68));

  std::ostringstream out;
  write_detailed_report(out, report);
  const auto kv = key_values(out.str(), "[decision]");
  CHECK(kv.at("branch") == "goal_compromise");
  CHECK(kv.at("maximin_status") == "infeasible");
  CHECK(std::stod(kv.at("eta_cost")) == Approx(0.105).epsilon(0.05));
  CHECK(std::stod(kv.at("cost_over_tolerance")) == Approx(157.35).epsilon(0.05));
}

TEST_CASE("a degenerate window is flagged") {
  std::string text = feasible_text() + "window_lower = 0\nwindow_upper = 0.001\n";
  const SolveReport report = run_solve(parse(text));
  CHECK(report.decision.at_window_boundary);
  std::ostringstream out;
  write_solve_report(out, report);
  CHECK(key_values(out.str(), "[decision]").at("at_window_boundary") == "true");
}

TEST_CASE("sweep columns and shape") {
  const RunConfig cfg = load_config(config_dir / "example_feasible.cfg");
  const auto rows = run_sweep(cfg, {0.5, Interval{0.0, 100.0}, false});
  REQUIRE(rows.size() == 201);
  CHECK(rows.front().release_time == 0.0);
  CHECK(rows.back().release_time == 100.0);
  for (std::size_t i = 1; i < rows.size(); ++i) REQUIRE(rows[i].reliability >= rows[i - 1].reliability);
  const auto peak = std::max_element(rows.begin(), rows.end(),
                                     [](const auto& x, const auto& y) { return x.min_membership < y.min_membership; });
  CHECK(std::abs(peak->release_time - 42.72) <= 0.5);
  for (const auto& r : rows) {
    REQUIRE(r.min_membership == std::min(r.mu_cost, r.mu_reliability));
    REQUIRE(r.mu_cost >= 0.0);
    REQUIRE(r.mu_cost <= 1.0);
  }

  const auto unclamped = run_sweep(cfg, {0.5, Interval{0.0, 100.0}, true});
  CHECK(unclamped.front().mu_reliability < 0.0);

  std::ostringstream a, b;
  write_sweep_csv(a, rows);
  write_sweep_csv(b, run_sweep(cfg, {0.5, Interval{0.0, 100.0}, false}));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("T,cost,reliability,mu_cost,mu_reliability,min_membership\n", 0) == 0);
  CHECK(a.str().find("\n42.5,") != std::string::npos);

  CHECK_THROWS_AS(run_sweep(cfg, {200.0, Interval{0.0, 100.0}, false}), ConfigError);
  CHECK_THROWS_AS(run_sweep(cfg, {0.0, Interval{0.0, 100.0}, false}), ConfigError);
}

TEST_CASE("default sweep range covers reliability saturation") {
  const ReleaseProblem p = make_problem(load_config(config_dir / "example_feasible.cfg"));
  const Interval range = default_sweep_range(p);
  CHECK(range.lower == 0.01);
  const double t_sat = range.upper / 5.0;
  CHECK(p.model.conditional_reliability(t_sat, 1.0) == Approx(0.95).epsilon(1e-12));
}

TEST_CASE("fit from failure data and round trip into solve") {
  TempDir dir;
  std::mt19937_64 rng(2024);
  std::vector<double> times;
  for (int k = 0; k < 20; ++k) {
    auto one = oracle::simulate_thinning(143.32 * 1.0, 0.1246, 40.0, rng);
    times.insert(times.end(), one.begin(), one.end());
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  {
    std::ofstream data(dir.path / "failures.txt");
    data << "# pooled CPU hours\n";
    data.precision(17);
    for (double t : times) data << t << "\n";
  }
  std::string text = feasible_text();
  text = replace_line(text, "a", "failure_data = failures.txt\nobservation_end = 40");
  text = replace_line(text, "b", "");
  std::istringstream in(text);
  const RunConfig cfg = parse_config(in, dir.path);
  REQUIRE(cfg.failure_data);

  const FitReport report = run_fit(cfg);
  CHECK(report.result.status == FitStatus::converged);
  CHECK(report.result.model.fault_content() / 20.0 == Approx(143.32).epsilon(0.05));
  CHECK(report.result.model.detection_rate() == Approx(0.1246).epsilon(0.05));
  std::ostringstream fit_out;
  write_fit_report(fit_out, report);
  CHECK(key_values(fit_out.str(), "[fit]").at("status") == "converged");

  // Fitted parameters written back as a config solve end to end.
  std::ostringstream derived;
  write_config(derived, with_fitted_model(cfg, report.result.model));
  const RunConfig reloaded = parse(derived.str());
  REQUIRE(reloaded.model);
  CHECK(*reloaded.model == report.result.model);
  CHECK_NOTHROW(run_solve(reloaded));

  // Solve straight from the data path fits first.
  CHECK_NOTHROW(run_solve(cfg));
}

TEST_CASE("fit needs at least two failures") {
  TempDir dir;
  std::ofstream(dir.path / "one.txt") << "3.5\n";
  std::string text = replace_line(feasible_text(), "a", "failure_data = one.txt");
  text = replace_line(text, "b", "");
  std::istringstream in(text);
  const RunConfig cfg = parse_config(in, dir.path);
  CHECK_THROWS_AS(run_fit(cfg), EstimationError);
  CHECK_THROWS_AS(run_solve(cfg), EstimationError);

  std::string missing = replace_line(feasible_text(), "a", "failure_data = nowhere.txt");
  missing = replace_line(missing, "b", "");
  CHECK_THROWS_AS(parse(missing, dir.path), ConfigError);
}
