#include "relfuzz/srgm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <string>

#include "relfuzz/errors.hpp"
#include "relfuzz/scalar_search.hpp"

namespace relfuzz {

namespace {

void require_time(double t, const char* what) {
  if (!std::isfinite(t) || t < 0.0) throw DomainError(std::string(what) + " must be finite and non-negative");
}

}  // namespace

GoelOkumotoModel::GoelOkumotoModel(double fault_content, double detection_rate)
    : a_(fault_content), b_(detection_rate) {
  if (!std::isfinite(a_) || a_ <= 0.0) throw DomainError("fault content a must be positive");
  if (!std::isfinite(b_) || b_ <= 0.0) throw DomainError("detection rate b must be positive");
}

double GoelOkumotoModel::mean_value(double t) const {
  require_time(t, "time");
  return -a_ * std::expm1(-b_ * t);
}

double GoelOkumotoModel::intensity(double t) const {
  require_time(t, "time");
  return a_ * b_ * std::exp(-b_ * t);
}

double GoelOkumotoModel::expected_faults_in(double t, double window) const {
  require_time(t, "time");
  require_time(window, "window");
  // m(t + w) - m(t) = a e^{-bt} (1 - e^{-bw}), without the cancellation.
  return -a_ * std::exp(-b_ * t) * std::expm1(-b_ * window);
}

double GoelOkumotoModel::conditional_reliability(double release, double horizon) const {
  return std::exp(-expected_faults_in(release, horizon));
}

FailureDataset::FailureDataset(std::vector<double> failure_times, double observation_end)
    : times_(std::move(failure_times)), end_(observation_end) {
  if (!std::isfinite(end_) || end_ < 0.0) throw DomainError("observation end must be finite and non-negative");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const double t = times_[i];
    if (!std::isfinite(t) || t < 0.0) throw DomainError("failure times must be finite and non-negative");
    if (i > 0 && !(t > times_[i - 1]))
      throw DomainError("failure times must be strictly increasing (entry " + std::to_string(i + 1) + ")");
    if (t > end_) throw DomainError("failure time beyond observation end");
  }
}

FailureDataset::FailureDataset(std::vector<double> failure_times)
    : FailureDataset(failure_times, failure_times.empty() ? 0.0 : failure_times.back()) {}

std::vector<double> read_failure_times(std::istream& in) {
  std::vector<double> times;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const char* begin = line.data() + first;
    const char* end = line.data() + last + 1;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
      throw EstimationError("failure data line " + std::to_string(line_no) + ": not a number: '" +
                            std::string(begin, end) + "'");
    times.push_back(value);
  }
  return times;
}

std::vector<double> read_failure_times(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EstimationError("cannot open failure data file " + path.string());
  return read_failure_times(in);
}

double log_likelihood(const GoelOkumotoModel& model, const FailureDataset& data) {
  if (data.empty()) throw EstimationError("log-likelihood needs at least one failure");
  double sum = 0.0;
  const double log_ab = std::log(model.fault_content()) + std::log(model.detection_rate());
  for (double t : data.failure_times()) sum += log_ab - model.detection_rate() * t;
  return sum - model.mean_value(data.observation_end());
}

namespace {

// Profile quantities for a given detection rate b; a is eliminated in closed
// form. Everything is scaled by the observation end T.
struct Profile {
  double n;
  double sum_times;
  double end;

  double fault_content(double b) const { return -n / std::expm1(-b * end); }

  double log_likelihood(double b) const {
    return n * std::log(fault_content(b)) + n * std::log(b) - b * sum_times - n;
  }

  // d/db of log_likelihood; strictly decreasing in b.
  double score(double b) const { return n / b - sum_times - n * end / std::expm1(b * end); }
};

struct LeastSquares {
  std::span<const double> times;

  // Best a for fixed b, and the resulting sum of squared residuals against the
  // cumulative counts 1..n.
  std::pair<double, double> solve(double b) const {
    double gy = 0.0, gg = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double g = -std::expm1(-b * times[i]);
      gy += g * static_cast<double>(i + 1);
      gg += g * g;
    }
    const double a = gy / gg;
    double sse = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double r = static_cast<double>(i + 1) + a * std::expm1(-b * times[i]);
      sse += r * r;
    }
    return {a, sse};
  }
};

double sum_squared_error(const GoelOkumotoModel& model, std::span<const double> times) {
  double sse = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double r = static_cast<double>(i + 1) - model.mean_value(times[i]);
    sse += r * r;
  }
  return sse;
}

void check_fit_input(const FailureDataset& data, const FitOptions& options) {
  if (data.size() < 2) throw EstimationError("fit needs at least two failures");
  const auto times = data.failure_times();
  if (times.front() == times.back()) throw EstimationError("all failures at one epoch");
  if (!(data.observation_end() > 0.0)) throw EstimationError("observation end must be positive");
  if (options.max_iterations <= 0) throw EstimationError("iteration cap must be positive");
}

FitResult fit_max_likelihood(const FailureDataset& data, const FitOptions& options) {
  const auto times = data.failure_times();
  const Profile profile{static_cast<double>(times.size()), std::accumulate(times.begin(), times.end(), 0.0),
                        data.observation_end()};
  const double end = profile.end;
  int iterations = 0;
  auto make = [&](double b, FitStatus status) {
    GoelOkumotoModel model(profile.fault_content(b), b);
    return FitResult{model, FitMethod::max_likelihood, status, log_likelihood(model, data),
                     sum_squared_error(model, times), iterations};
  };

  // Interior maximum exists iff the score is positive as b -> 0, i.e. the
  // mean failure epoch is below end / 2.
  const double b_floor = 1e-6 / end;
  if (!(profile.score(b_floor) > 0.0)) return make(b_floor, FitStatus::boundary);

  double guess = options.init ? options.init->detection_rate() : 1.0 / (profile.sum_times / profile.n);
  if (!std::isfinite(guess) || guess <= b_floor) guess = 1.0 / end;
  double lo = guess, hi = guess;
  while (profile.score(lo) <= 0.0) {
    lo = std::max(lo / 4.0, b_floor);
    if (++iterations >= options.max_iterations) throw EstimationError("could not bracket b", profile.fault_content(lo), lo);
  }
  while (profile.score(hi) >= 0.0) {
    hi *= 4.0;
    if (++iterations >= options.max_iterations || !std::isfinite(hi))
      throw EstimationError("could not bracket b", profile.fault_content(hi), hi);
  }

  // Golden section on log b.
  constexpr double inv_phi = 0.6180339887498949;
  double u_lo = std::log(lo), u_hi = std::log(hi);
  auto objective = [&](double u) { return profile.log_likelihood(std::exp(u)); };
  double u1 = u_hi - inv_phi * (u_hi - u_lo), u2 = u_lo + inv_phi * (u_hi - u_lo);
  double f1 = objective(u1), f2 = objective(u2);
  while (u_hi - u_lo > options.rel_tolerance) {
    if (++iterations >= options.max_iterations)
      throw EstimationError("golden section did not converge", profile.fault_content(std::exp(u1)), std::exp(u1));
    if (f1 >= f2) {
      u_hi = u2; u2 = u1; f2 = f1;
      u1 = u_hi - inv_phi * (u_hi - u_lo);
      f1 = objective(u1);
    } else {
      u_lo = u1; u1 = u2; f1 = f2;
      u2 = u_lo + inv_phi * (u_hi - u_lo);
      f2 = objective(u2);
    }
  }

  // Bisection on the score sign, down to adjacent doubles.
  double b_lo = std::exp(u_lo), b_hi = std::exp(u_hi);
  if (!(profile.score(b_lo) > 0.0)) b_lo = lo;
  if (!(profile.score(b_hi) < 0.0)) b_hi = hi;
  double b = 0.5 * (b_lo + b_hi);
  for (;;) {
    b = 0.5 * (b_lo + b_hi);
    if (b <= b_lo || b >= b_hi) break;
    const double s = profile.score(b);
    if (s == 0.0) break;
    if (++iterations >= options.max_iterations)
      throw EstimationError("score bisection did not converge", profile.fault_content(b), b);
    (s > 0.0 ? b_lo : b_hi) = b;
  }
  if (std::abs(profile.score(b_lo)) < std::abs(profile.score(b))) b = b_lo;
  if (std::abs(profile.score(b_hi)) < std::abs(profile.score(b))) b = b_hi;
  return make(b, FitStatus::converged);
}

FitResult fit_least_squares(const FailureDataset& data, const FitOptions& options) {
  const auto times = data.failure_times();
  const LeastSquares ls{times};
  const double span = times.back();
  const Interval log_range{std::log(1e-6 / span), std::log(1e3 / span)};
  auto objective = [&](double u) { return -ls.solve(std::exp(u)).second; };
  search::ScanOptions scan;
  scan.grid_points = 401;
  scan.rel_tolerance = options.rel_tolerance;
  scan.max_iterations = options.max_iterations;
  const search::Point best = search::maximize_earliest(objective, log_range, scan);
  const double b = std::exp(best.x);
  const auto [a, sse] = ls.solve(b);
  if (!std::isfinite(a) || a <= 0.0) throw EstimationError("least squares produced a non-positive fault content", a, b);
  GoelOkumotoModel model(a, b);
  const bool on_edge = best.x <= log_range.lower || best.x >= log_range.upper;
  return FitResult{model, FitMethod::least_squares, on_edge ? FitStatus::boundary : FitStatus::converged,
                   log_likelihood(model, data), sse, static_cast<int>(scan.grid_points)};
}

}  // namespace

FitResult fit(const FailureDataset& data, const FitOptions& options) {
  check_fit_input(data, options);
  FitResult result = options.method == FitMethod::least_squares ? fit_least_squares(data, options)
                                                                : fit_max_likelihood(data, options);
  return result;
}

const char* to_string(FitMethod method) {
  switch (method) {
    case FitMethod::max_likelihood: return "mle";
    case FitMethod::least_squares: return "lsq";
  }
  return "?";
}

const char* to_string(FitStatus status) {
  switch (status) {
    case FitStatus::converged: return "converged";
    case FitStatus::boundary: return "boundary";
  }
  return "?";
}

}  // namespace relfuzz
