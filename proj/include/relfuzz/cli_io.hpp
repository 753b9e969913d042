#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relfuzz/cost_model.hpp"
#include "relfuzz/fuzzy_core.hpp"
#include "relfuzz/scalar_search.hpp"
#include "relfuzz/solver.hpp"
#include "relfuzz/srgm.hpp"

namespace relfuzz {

/// Process exit status of the command line tool.
namespace exit_code {
constexpr int feasible = 0;
constexpr int failure = 1;
constexpr int goal_compromise = 2;
constexpr int config_error = 3;
constexpr int estimation_error = 4;
}  // namespace exit_code

/// Everything needed to run one command. Loaded from a flat `key = value`
/// file; see README.md for the key list.
struct RunConfig {
  // Exactly one of `model` and `failure_data` is set.
  std::optional<GoelOkumotoModel> model;
  std::optional<std::filesystem::path> failure_data;
  std::optional<double> observation_end;
  FitMethod fit_method = FitMethod::max_likelihood;

  CostParams cost;
  // Set when the mean removal time was derived from a removal-time
  // distribution instead of being given directly.
  std::optional<TruncatedExponential> testing_removal;
  std::optional<TruncatedExponential> warranty_removal;

  FuzzyTargets targets;

  std::optional<double> window_lower;
  std::optional<double> window_upper;
  search::ScanOptions search;
  GoalWeights weights;
  double alpha_target = 0.0;

  std::optional<std::filesystem::path> output;
};

/// Parses and validates a configuration. Relative paths inside the file are
/// resolved against `base_dir`. Throws ConfigError naming the key and line.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Serializes a configuration in the same format load_config reads.
void write_config(std::ostream& out, const RunConfig& cfg);

/// The configured model, fitting the failure data first when needed.
GoelOkumotoModel resolve_model(const RunConfig& cfg);
FailureDataset load_failure_data(const RunConfig& cfg);
ReleaseProblem make_problem(const RunConfig& cfg);

struct SolveReport {
  ReleaseProblem problem;
  ReleaseDecision decision;
  /// Present when the max-min problem was infeasible and the decision comes
  /// from the goal-programming fallback.
  std::optional<InfeasibilityReport> infeasibility;

  const char* branch() const { return to_string(decision.status); }
  int exit_status() const;
};

SolveReport run_solve(const RunConfig& cfg);

/// Short plain-text summary followed by a `[decision]` key=value block.
void write_solve_report(std::ostream& out, const SolveReport& report);

/// Longer report: cost breakdown, membership functions and alpha-cuts at the
/// achieved level, plus the same key=value block as write_solve_report.
void write_detailed_report(std::ostream& out, const SolveReport& report);

struct SweepRow {
  double release_time;
  double cost;
  double reliability;
  double mu_cost;
  double mu_reliability;
  double min_membership;
};

struct SweepOptions {
  double step = 0.5;
  std::optional<Interval> range;
  bool unclamped = false;
};

/// [0.01, 5 * t_sat], t_sat being the release time where reliability reaches
/// its goal. Falls back to the problem window when the goal is met at T = 0.
Interval default_sweep_range(const ReleaseProblem& p);

std::vector<SweepRow> run_sweep(const ReleaseProblem& p, const SweepOptions& options);
std::vector<SweepRow> run_sweep(const RunConfig& cfg, const SweepOptions& options);

/// CSV with header `T,cost,reliability,mu_cost,mu_reliability,min_membership`,
/// numbers at 6 significant digits.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

struct FitReport {
  FailureDataset data;
  FitResult result;
};

FitReport run_fit(const RunConfig& cfg);
void write_fit_report(std::ostream& out, const FitReport& report);

/// Copy of `cfg` with the failure data replaced by the fitted parameters.
RunConfig with_fitted_model(const RunConfig& cfg, const GoelOkumotoModel& model);

}  // namespace relfuzz
