#include "relfuzz/cli_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "relfuzz/errors.hpp"

namespace relfuzz {

namespace {

struct Entry {
  std::string value;
  int line;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "a", "b", "failure_data", "observation_end", "fit_method",
      "c0", "c1", "c2", "c3", "alpha_exp", "mu_y", "mu_w", "t_w",
      "removal_rate_y", "removal_cutoff_y", "removal_rate_w", "removal_cutoff_w",
      "budget", "cost_tolerance", "reliability_goal", "reliability_tolerance", "mission_time",
      "window_lower", "window_upper", "grid_points", "weights", "alpha_target", "out"};
  return keys;
}

// Collects every problem before failing so a bad file is fixed in one pass.
class ConfigReader {
 public:
  ConfigReader(std::map<std::string, Entry> entries, std::filesystem::path base)
      : entries_(std::move(entries)), base_(std::move(base)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

  void fail(const std::string& key, const std::string& message) {
    if (issues_.empty()) {
      first_key_ = key;
      first_line_ = line(key);
    }
    std::string where = key;
    if (line(key) > 0) where += " (line " + std::to_string(line(key)) + ")";
    issues_.push_back(where + ": " + message);
  }

  std::optional<double> number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const std::string& text = entries_.at(key).value;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
      fail(key, "not a finite number: '" + text + "'");
      return std::nullopt;
    }
    return v;
  }

  double required(const std::string& key) {
    if (!has(key)) {
      fail(key, "missing required key");
      return 0.0;
    }
    return number(key).value_or(0.0);
  }

  std::optional<std::string> text(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return entries_.at(key).value;
  }

  std::filesystem::path path(const std::string& key) const {
    std::filesystem::path p = entries_.at(key).value;
    return p.is_absolute() || base_.empty() ? p : base_ / p;
  }

  void finish() const {
    if (issues_.empty()) return;
    std::string message;
    for (const auto& issue : issues_) message += (message.empty() ? "" : "; ") + issue;
    throw ConfigError(first_key_, first_line_, message);
  }

 private:
  std::map<std::string, Entry> entries_;
  std::filesystem::path base_;
  std::vector<std::string> issues_;
  std::string first_key_;
  int first_line_ = 0;
};

// Mean removal time: given directly, or derived from a truncated exponential.
std::pair<double, std::optional<TruncatedExponential>> removal_time(ConfigReader& r, const std::string& mean_key,
                                                                    const std::string& rate_key,
                                                                    const std::string& cutoff_key) {
  const bool direct = r.has(mean_key);
  const bool derived = r.has(rate_key) || r.has(cutoff_key);
  if (direct && derived) {
    r.fail(mean_key, "give either " + mean_key + " or " + rate_key + "/" + cutoff_key + ", not both");
    return {0.0, std::nullopt};
  }
  if (!derived) {
    const double mean = r.required(mean_key);
    if (mean < 0.0) r.fail(mean_key, "must be non-negative");
    return {mean, std::nullopt};
  }
  const double rate = r.required(rate_key);
  const double cutoff = r.required(cutoff_key);
  if (!(rate > 0.0)) r.fail(rate_key, "must be positive");
  if (!(cutoff > 0.0)) r.fail(cutoff_key, "must be positive");
  if (!(rate > 0.0 && cutoff > 0.0)) return {0.0, std::nullopt};
  TruncatedExponential dist(rate, cutoff);
  return {expected_removal_time(dist), dist};
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  std::map<std::string, Entry> entries;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError(key, line_no, "unknown key");
    if (value.empty()) throw ConfigError(key, line_no, "empty value");
    if (entries.count(key)) throw ConfigError(key, line_no, "duplicate key (first on line " +
                                                                std::to_string(entries[key].line) + ")");
    entries[key] = {value, line_no};
  }

  ConfigReader r(std::move(entries), base_dir);
  RunConfig cfg;

  const bool has_params = r.has("a") || r.has("b");
  if (has_params && r.has("failure_data")) {
    r.fail("failure_data", "give either model parameters (a, b) or failure_data, not both");
  } else if (r.has("failure_data")) {
    cfg.failure_data = r.path("failure_data");
    if (!std::filesystem::exists(*cfg.failure_data))
      r.fail("failure_data", "file does not exist: " + cfg.failure_data->string());
    cfg.observation_end = r.number("observation_end");
    if (auto method = r.text("fit_method")) {
      if (*method == "mle")
        cfg.fit_method = FitMethod::max_likelihood;
      else if (*method == "lsq")
        cfg.fit_method = FitMethod::least_squares;
      else
        r.fail("fit_method", "expected 'mle' or 'lsq'");
    }
  } else if (!has_params) {
    r.fail("a", "need model parameters (a, b) or failure_data");
  } else {
    const double a = r.required("a");
    const double b = r.required("b");
    if (!(a > 0.0)) r.fail("a", "must be positive");
    if (!(b > 0.0)) r.fail("b", "must be positive");
    if (a > 0.0 && b > 0.0) cfg.model = GoelOkumotoModel(a, b);
  }
  if (!cfg.failure_data) {
    if (r.has("observation_end")) r.fail("observation_end", "only valid together with failure_data");
    if (r.has("fit_method")) r.fail("fit_method", "only valid together with failure_data");
  }

  CostParams& c = cfg.cost;
  c.setup_cost = r.required("c0");
  c.testing_removal_cost_rate = r.required("c1");
  c.testing_effort_coefficient = r.required("c2");
  c.warranty_removal_cost_rate = r.required("c3");
  const std::pair<const char*, double> rates[] = {{"c0", c.setup_cost},
                                                  {"c1", c.testing_removal_cost_rate},
                                                  {"c2", c.testing_effort_coefficient},
                                                  {"c3", c.warranty_removal_cost_rate}};
  for (const auto& [key, value] : rates)
    if (value < 0.0) r.fail(key, "must be non-negative");
  c.effort_exponent = r.required("alpha_exp");
  if (r.has("alpha_exp") && !(c.effort_exponent > 0.0 && c.effort_exponent <= 1.0))
    r.fail("alpha_exp", "must be in (0, 1]");
  std::tie(c.mean_testing_removal_time, cfg.testing_removal) =
      removal_time(r, "mu_y", "removal_rate_y", "removal_cutoff_y");
  std::tie(c.mean_warranty_removal_time, cfg.warranty_removal) =
      removal_time(r, "mu_w", "removal_rate_w", "removal_cutoff_w");
  c.warranty_length = r.required("t_w");
  if (r.has("t_w") && !(c.warranty_length > 0.0)) r.fail("t_w", "must be positive");

  FuzzyTargets& t = cfg.targets;
  t.budget = r.required("budget");
  t.cost_tolerance = r.required("cost_tolerance");
  t.reliability_goal = r.required("reliability_goal");
  t.reliability_tolerance = r.required("reliability_tolerance");
  t.mission_time = r.required("mission_time");
  if (r.has("budget") && r.has("cost_tolerance") && !(t.cost_tolerance > t.budget))
    r.fail("cost_tolerance", "must be greater than budget");
  if (r.has("reliability_goal") && !(t.reliability_goal > 0.0 && t.reliability_goal < 1.0))
    r.fail("reliability_goal", "must be in (0, 1)");
  if (r.has("reliability_tolerance") && !(t.reliability_tolerance > 0.0 && t.reliability_tolerance < 1.0))
    r.fail("reliability_tolerance", "must be in (0, 1)");
  if (r.has("reliability_goal") && r.has("reliability_tolerance") &&
      !(t.reliability_tolerance < t.reliability_goal))
    r.fail("reliability_tolerance", "must be less than reliability_goal");
  if (r.has("mission_time") && !(t.mission_time > 0.0)) r.fail("mission_time", "must be positive");

  cfg.window_lower = r.number("window_lower");
  cfg.window_upper = r.number("window_upper");
  if (cfg.window_lower && *cfg.window_lower < 0.0) r.fail("window_lower", "must be non-negative");
  if (cfg.window_lower && cfg.window_upper && !(*cfg.window_upper > *cfg.window_lower))
    r.fail("window_upper", "must be greater than window_lower");
  if (auto points = r.number("grid_points")) {
    if (*points < 2.0 || *points != std::floor(*points) || *points > 1e8)
      r.fail("grid_points", "must be an integer >= 2");
    else
      cfg.search.grid_points = static_cast<std::size_t>(*points);
  }
  if (auto w = r.text("weights")) {
    std::istringstream ws(*w);
    char comma = 0;
    if (!(ws >> cfg.weights.cost >> comma >> cfg.weights.reliability) || comma != ',' || !(ws >> std::ws).eof())
      r.fail("weights", "expected 'w_cost,w_reliability'");
    else if (cfg.weights.cost < 0.0 || cfg.weights.reliability < 0.0)
      r.fail("weights", "must be non-negative");
  }
  cfg.alpha_target = r.number("alpha_target").value_or(0.0);
  if (r.has("out")) cfg.output = r.path("out");

  r.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open " + path.string());
  return parse_config(in, path.parent_path());
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  auto kv = [&](const char* key, double v) { out << key << " = " << shortest(v) << "\n"; };
  out << "# model\n";
  if (cfg.model) {
    kv("a", cfg.model->fault_content());
    kv("b", cfg.model->detection_rate());
  } else if (cfg.failure_data) {
    out << "failure_data = " << cfg.failure_data->string() << "\n";
    if (cfg.observation_end) kv("observation_end", *cfg.observation_end);
    out << "fit_method = " << to_string(cfg.fit_method) << "\n";
  }
  const CostParams& c = cfg.cost;
  out << "# cost\n";
  kv("c0", c.setup_cost);
  kv("c1", c.testing_removal_cost_rate);
  kv("c2", c.testing_effort_coefficient);
  kv("c3", c.warranty_removal_cost_rate);
  kv("alpha_exp", c.effort_exponent);
  if (cfg.testing_removal) {
    kv("removal_rate_y", cfg.testing_removal->rate());
    kv("removal_cutoff_y", cfg.testing_removal->cutoff());
  } else {
    kv("mu_y", c.mean_testing_removal_time);
  }
  if (cfg.warranty_removal) {
    kv("removal_rate_w", cfg.warranty_removal->rate());
    kv("removal_cutoff_w", cfg.warranty_removal->cutoff());
  } else {
    kv("mu_w", c.mean_warranty_removal_time);
  }
  kv("t_w", c.warranty_length);
  out << "# fuzzy goals\n";
  kv("budget", cfg.targets.budget);
  kv("cost_tolerance", cfg.targets.cost_tolerance);
  kv("reliability_goal", cfg.targets.reliability_goal);
  kv("reliability_tolerance", cfg.targets.reliability_tolerance);
  kv("mission_time", cfg.targets.mission_time);
  out << "# solver\n";
  if (cfg.window_lower) kv("window_lower", *cfg.window_lower);
  if (cfg.window_upper) kv("window_upper", *cfg.window_upper);
  out << "grid_points = " << cfg.search.grid_points << "\n";
  out << "weights = " << shortest(cfg.weights.cost) << "," << shortest(cfg.weights.reliability) << "\n";
  kv("alpha_target", cfg.alpha_target);
  if (cfg.output) out << "out = " << cfg.output->string() << "\n";
}

FailureDataset load_failure_data(const RunConfig& cfg) {
  if (!cfg.failure_data) throw ConfigError("failure_data", 0, "no failure data configured");
  std::vector<double> times = read_failure_times(*cfg.failure_data);
  try {
    if (cfg.observation_end) return FailureDataset(std::move(times), *cfg.observation_end);
    return FailureDataset(std::move(times));
  } catch (const DomainError& e) {
    throw EstimationError(cfg.failure_data->string() + ": " + e.what());
  }
}

GoelOkumotoModel resolve_model(const RunConfig& cfg) {
  if (cfg.model) return *cfg.model;
  FitOptions options;
  options.method = cfg.fit_method;
  const FitResult result = fit(load_failure_data(cfg), options);
  if (result.status != FitStatus::converged)
    throw EstimationError("fit did not reach an interior optimum (status " + std::string(to_string(result.status)) +
                              ")",
                          result.model.fault_content(), result.model.detection_rate());
  return result.model;
}

ReleaseProblem make_problem(const RunConfig& cfg) {
  ReleaseProblem p = ReleaseProblem::with_default_window(resolve_model(cfg), cfg.cost, cfg.targets);
  if (cfg.window_lower) p.window.lower = *cfg.window_lower;
  if (cfg.window_upper) p.window.upper = *cfg.window_upper;
  if (!(p.window.upper > p.window.lower))
    throw ConfigError("window_upper", 0, "search window is empty once defaults are applied");
  return p;
}

int SolveReport::exit_status() const {
  return decision.status == DecisionStatus::feasible ? exit_code::feasible : exit_code::goal_compromise;
}

SolveReport run_solve(const RunConfig& cfg) {
  const ReleaseProblem problem = make_problem(cfg);
  MaximinOutcome outcome = solve_maximin(problem, cfg.search);
  if (auto* decision = std::get_if<ReleaseDecision>(&outcome)) return {problem, *decision, std::nullopt};
  const auto& infeasible = std::get<InfeasibilityReport>(outcome);
  return {problem, solve_goal_program(problem, cfg.weights, cfg.alpha_target, cfg.search), infeasible};
}

namespace {

void write_decision_block(std::ostream& out, const SolveReport& report) {
  const ReleaseDecision& d = report.decision;
  auto kv = [&](const char* key, double v) { out << key << "=" << shortest(v) << "\n"; };
  out << "[decision]\n";
  out << "branch=" << report.branch() << "\n";
  kv("release_time", d.release_time);
  kv("satisfaction", d.satisfaction);
  kv("cost", d.cost);
  kv("reliability", d.reliability);
  kv("mu_cost", d.memberships.cost);
  kv("mu_reliability", d.memberships.reliability);
  out << "at_window_boundary=" << (d.at_window_boundary ? "true" : "false") << "\n";
  kv("window_lower", report.problem.window.lower);
  kv("window_upper", report.problem.window.upper);
  if (report.infeasibility) {
    out << "maximin_status=" << to_string(report.infeasibility->kind) << "\n";
    kv("maximin_value", report.infeasibility->maximin_value);
    kv("maximin_best_time", report.infeasibility->best_time);
  }
  if (d.deviations) {
    kv("eta_cost", d.deviations->under_cost);
    kv("rho_cost", d.deviations->over_cost);
    kv("eta_reliability", d.deviations->under_reliability);
    kv("rho_reliability", d.deviations->over_reliability);
    kv("objective", d.objective);
    kv("cost_over_tolerance", d.cost - report.problem.targets.cost_tolerance);
  }
}

}  // namespace

void write_solve_report(std::ostream& out, const SolveReport& report) {
  const ReleaseDecision& d = report.decision;
  out << "branch: " << report.branch() << "\n";
  if (report.infeasibility)
    out << "max-min problem " << to_string(report.infeasibility->kind) << " (best min membership "
        << sig6(report.infeasibility->maximin_value) << "); goal-programming compromise follows\n";
  out << "  release time     " << sig6(d.release_time) << "\n";
  if (d.deviations) {
    out << "  eta (cost, rel)  " << sig6(d.deviations->under_cost) << ", " << sig6(d.deviations->under_reliability)
        << "\n";
  } else {
    out << "  satisfaction     " << sig6(d.satisfaction) << "\n";
  }
  out << "  cost             " << sig6(d.cost) << "\n";
  out << "  reliability      " << sig6(d.reliability) << "\n";
  if (d.at_window_boundary) out << "  warning: release time is on the edge of the search window\n";
  write_decision_block(out, report);
}

void write_detailed_report(std::ostream& out, const SolveReport& report) {
  const ReleaseProblem& p = report.problem;
  const ReleaseDecision& d = report.decision;
  out << "Release-time decision report\n\n";
  out << "Model: a = " << sig6(p.model.fault_content()) << ", b = " << sig6(p.model.detection_rate()) << "\n";
  out << "Search window: [" << sig6(p.window.lower) << ", " << sig6(p.window.upper) << "]\n";
  out << "Goals: cost <~ " << sig6(p.targets.budget) << " (tolerance " << sig6(p.targets.cost_tolerance)
      << "), reliability over " << sig6(p.targets.mission_time) << " >~ " << sig6(p.targets.reliability_goal)
      << " (tolerance " << sig6(p.targets.reliability_tolerance) << ")\n\n";

  const CostBreakdown c = cost_breakdown(p.model, p.cost, d.release_time);
  out << "Cost at T = " << sig6(d.release_time) << "\n";
  out << "  setup             " << sig6(c.setup) << "\n";
  out << "  testing removal   " << sig6(c.testing_removal) << "\n";
  out << "  testing effort    " << sig6(c.testing_effort) << "\n";
  out << "  warranty removal  " << sig6(c.warranty) << "\n";
  out << "  total             " << sig6(c.total) << "\n\n";

  out << "Memberships at T (unclamped): cost " << sig6(d.memberships.cost) << ", reliability "
      << sig6(d.memberships.reliability) << "\n";
  if (d.status == DecisionStatus::feasible && d.satisfaction > 0.0) {
    const Interval cost_range{0.0, std::max(c.total, p.targets.cost_tolerance) * 2.0};
    const Interval rel_range{0.0, 1.0};
    const auto cost_cut = alpha_cut(p.targets.cost_membership(), d.satisfaction, cost_range);
    const auto rel_cut = alpha_cut(p.targets.reliability_membership(), d.satisfaction, rel_range);
    out << "At level " << sig6(d.satisfaction) << ": cost <= " << (cost_cut ? sig6(cost_cut->upper) : "none")
        << ", reliability >= " << (rel_cut ? sig6(rel_cut->lower) : "none") << "\n";
  }
  out << "\n";
  write_solve_report(out, report);
}

Interval default_sweep_range(const ReleaseProblem& p) {
  const double a = p.model.fault_content();
  const double b = p.model.detection_rate();
  const double window_faults = -a * std::expm1(-b * p.targets.mission_time);
  const double t_sat = std::log(window_faults / -std::log(p.targets.reliability_goal)) / b;
  if (!(t_sat * 5.0 > 0.01) || !std::isfinite(t_sat)) return p.window;
  return {0.01, 5.0 * t_sat};
}

std::vector<SweepRow> run_sweep(const ReleaseProblem& p, const SweepOptions& options) {
  const Interval range = options.range.value_or(default_sweep_range(p));
  if (!std::isfinite(options.step) || !(options.step > 0.0)) throw ConfigError("grid", 0, "step must be positive");
  if (!(range.lower >= 0.0) || !(range.upper >= range.lower))
    throw ConfigError("grid", 0, "sweep range must be a non-negative interval");
  if (options.step > range.width()) throw ConfigError("grid", 0, "step is larger than the sweep range");

  const RampMembership cost_ramp = p.targets.cost_membership();
  const RampMembership rel_ramp = p.targets.reliability_membership();
  const auto count = static_cast<std::size_t>(std::floor(range.width() / options.step * (1.0 + 1e-12))) + 1;
  std::vector<SweepRow> rows;
  rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SweepRow row{};
    row.release_time = range.lower + options.step * static_cast<double>(i);
    row.cost = total_cost(p.model, p.cost, row.release_time);
    row.reliability = p.model.conditional_reliability(row.release_time, p.targets.mission_time);
    row.mu_cost = membership(cost_ramp, row.cost, !options.unclamped);
    row.mu_reliability = membership(rel_ramp, row.reliability, !options.unclamped);
    row.min_membership = intersect({row.mu_cost, row.mu_reliability});
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, const SweepOptions& options) {
  return run_sweep(make_problem(cfg), options);
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "T,cost,reliability,mu_cost,mu_reliability,min_membership\n";
  for (const SweepRow& r : rows)
    out << sig6(r.release_time) << ',' << sig6(r.cost) << ',' << sig6(r.reliability) << ',' << sig6(r.mu_cost)
        << ',' << sig6(r.mu_reliability) << ',' << sig6(r.min_membership) << '\n';
}

FitReport run_fit(const RunConfig& cfg) {
  if (!cfg.failure_data) throw ConfigError("failure_data", 0, "fit needs failure_data in the configuration");
  FailureDataset data = load_failure_data(cfg);
  FitOptions options;
  options.method = cfg.fit_method;
  FitResult result = fit(data, options);
  return {std::move(data), result};
}

void write_fit_report(std::ostream& out, const FitReport& report) {
  const FitResult& r = report.result;
  out << "fit " << to_string(r.method) << ": " << to_string(r.status) << "\n";
  if (r.status == FitStatus::boundary)
    out << "  warning: no interior optimum; the likelihood keeps rising as b -> 0\n";
  out << "  a = " << sig6(r.model.fault_content()) << ", b = " << sig6(r.model.detection_rate()) << "\n";
  out << "[fit]\n";
  out << "method=" << to_string(r.method) << "\n";
  out << "status=" << to_string(r.status) << "\n";
  out << "a=" << shortest(r.model.fault_content()) << "\n";
  out << "b=" << shortest(r.model.detection_rate()) << "\n";
  out << "log_likelihood=" << shortest(r.log_likelihood) << "\n";
  out << "sum_squared_error=" << shortest(r.sum_squared_error) << "\n";
  out << "iterations=" << r.iterations << "\n";
  out << "failures=" << report.data.size() << "\n";
  out << "observation_end=" << shortest(report.data.observation_end()) << "\n";
}

RunConfig with_fitted_model(const RunConfig& cfg, const GoelOkumotoModel& model) {
  RunConfig out = cfg;
  out.model = model;
  out.failure_data.reset();
  out.observation_end.reset();
  out.fit_method = FitMethod::max_likelihood;
  return out;
}

}  // namespace relfuzz
