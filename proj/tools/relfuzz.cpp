// Command line front end: fit, solve, sweep, report.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "relfuzz/cli_io.hpp"
#include "relfuzz/errors.hpp"

namespace {

using namespace relfuzz;

struct Options {
  std::string config;
  std::string out;
  double grid = 0.5;
  std::string weights;
  std::optional<double> alpha_target;
  std::optional<double> from;
  std::optional<double> to;
  bool unclamped = false;
};

GoalWeights parse_weights(const std::string& text) {
  std::istringstream in(text);
  GoalWeights w;
  char comma = 0;
  if (!(in >> w.cost >> comma >> w.reliability) || comma != ',' || !(in >> std::ws).eof())
    throw ConfigError("weights", 0, "expected --weights w_cost,w_reliability");
  if (w.cost < 0.0 || w.reliability < 0.0) throw ConfigError("weights", 0, "weights must be non-negative");
  return w;
}

RunConfig load(const Options& opt) {
  RunConfig cfg = load_config(opt.config);
  if (!opt.weights.empty()) cfg.weights = parse_weights(opt.weights);
  if (opt.alpha_target) cfg.alpha_target = *opt.alpha_target;
  if (!opt.out.empty()) cfg.output = opt.out;
  return cfg;
}

// Writes to the configured output file, or stdout when there is none.
template <class Writer>
void emit(const RunConfig& cfg, Writer&& write) {
  if (!cfg.output) {
    write(std::cout);
    return;
  }
  std::ofstream file(*cfg.output, std::ios::binary);
  if (!file) throw ConfigError("out", 0, "cannot write " + cfg.output->string());
  write(file);
}

int cmd_solve(const Options& opt, bool detailed) {
  const RunConfig cfg = load(opt);
  const SolveReport report = run_solve(cfg);
  emit(cfg, [&](std::ostream& os) {
    if (detailed)
      write_detailed_report(os, report);
    else
      write_solve_report(os, report);
  });
  return report.exit_status();
}

int cmd_sweep(const Options& opt) {
  const RunConfig cfg = load(opt);
  const ReleaseProblem problem = make_problem(cfg);
  SweepOptions sweep;
  sweep.step = opt.grid;
  sweep.unclamped = opt.unclamped;
  if (opt.from || opt.to) {
    const Interval fallback = default_sweep_range(problem);
    sweep.range = Interval{opt.from.value_or(fallback.lower), opt.to.value_or(fallback.upper)};
  }
  const auto rows = run_sweep(problem, sweep);
  emit(cfg, [&](std::ostream& os) { write_sweep_csv(os, rows); });
  return exit_code::feasible;
}

int cmd_fit(const Options& opt) {
  RunConfig cfg = load_config(opt.config);
  const FitReport report = run_fit(cfg);
  write_fit_report(std::cout, report);
  if (report.result.status != FitStatus::converged) {
    std::cerr << "error: estimation did not converge to an interior optimum\n";
    return exit_code::estimation_error;
  }
  if (!opt.out.empty()) {
    std::ofstream file(opt.out);
    if (!file) throw ConfigError("out", 0, "cannot write " + opt.out);
    RunConfig derived = with_fitted_model(cfg, report.result.model);
    derived.output.reset();
    file << "# derived from " << opt.config << " by fit\n";
    write_config(file, derived);
  }
  return exit_code::feasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy optimal software release time"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output file (default: stdout)");
  };
  auto add_goal = [&](CLI::App* sub) {
    sub->add_option("--weights", opt.weights, "Goal-programming weights w_cost,w_reliability");
    sub->add_option("--alpha-target", opt.alpha_target, "Goal-programming target level");
  };

  auto* fit_cmd = app.add_subcommand("fit", "Estimate model parameters from failure data");
  add_common(fit_cmd);
  auto* solve_cmd = app.add_subcommand("solve", "Max-min release decision with goal-programming fallback");
  add_common(solve_cmd);
  add_goal(solve_cmd);
  auto* report_cmd = app.add_subcommand("report", "Detailed decision report");
  add_common(report_cmd);
  add_goal(report_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "Tabulate cost, reliability and memberships over T as CSV");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--grid", opt.grid, "Step between release times")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--from", opt.from, "First release time");
  sweep_cmd->add_option("--to", opt.to, "Last release time");
  sweep_cmd->add_flag("--unclamped", opt.unclamped, "Emit unclamped memberships");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code::failure;
  }

  try {
    if (*fit_cmd) return cmd_fit(opt);
    if (*solve_cmd) return cmd_solve(opt, false);
    if (*report_cmd) return cmd_solve(opt, true);
    if (*sweep_cmd) return cmd_sweep(opt);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return exit_code::config_error;
  } catch (const EstimationError& e) {
    std::cerr << "estimation error: " << e.what() << "\n";
    if (e.last_fault_content())
      std::cerr << "  last iterate: a = " << *e.last_fault_content() << ", b = " << *e.last_detection_rate() << "\n";
    return exit_code::estimation_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::failure;
  }
  return exit_code::failure;
}
