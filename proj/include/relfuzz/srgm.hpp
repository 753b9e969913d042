#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace relfuzz {

/// Goel-Okumoto exponential NHPP reliability growth model.
///
/// Expected cumulative faults follow m(t) = a(1 - exp(-b t)), the solution of
/// m'(t) = b(a - m(t)) with m(0) = 0. `a` is the expected total fault content
/// and `b` the per-fault detection rate per unit of test time.
class GoelOkumotoModel {
 public:
  /// Throws DomainError unless both parameters are finite and positive.
  GoelOkumotoModel(double fault_content, double detection_rate);

  double fault_content() const { return a_; }
  double detection_rate() const { return b_; }

  double mean_value(double t) const;
  double intensity(double t) const;

  /// Expected faults detected in (t, t + window].
  double expected_faults_in(double t, double window) const;

  /// Probability of no failure in (release, release + horizon].
  double conditional_reliability(double release, double horizon) const;

  friend bool operator==(const GoelOkumotoModel&, const GoelOkumotoModel&) = default;

 private:
  double a_;
  double b_;
};

/// Cumulative failure epochs observed up to `observation_end`. Times must be
/// strictly increasing and non-negative; input that is out of order is
/// rejected rather than sorted.
class FailureDataset {
 public:
  FailureDataset(std::vector<double> failure_times, double observation_end);

  /// Observation end defaults to the last failure epoch.
  explicit FailureDataset(std::vector<double> failure_times);

  std::span<const double> failure_times() const { return times_; }
  double observation_end() const { return end_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }

 private:
  std::vector<double> times_;
  double end_;
};

/// Reads one cumulative failure time per line. Blank lines and lines starting
/// with '#' are skipped. Throws EstimationError on malformed input, naming the
/// offending line.
std::vector<double> read_failure_times(std::istream& in);
std::vector<double> read_failure_times(const std::filesystem::path& path);

/// NHPP log-likelihood: sum ln(lambda(t_i)) - m(observation_end).
double log_likelihood(const GoelOkumotoModel& model, const FailureDataset& data);

enum class FitMethod { max_likelihood, least_squares };

enum class FitStatus {
  converged,
  /// The likelihood keeps increasing as b -> 0 (mean failure epoch is at or
  /// beyond half the observation window). The returned model sits on the lower
  /// edge of the search bracket and matches the observed count at the end of
  /// observation, but is not an interior optimum.
  boundary,
};

struct FitOptions {
  FitMethod method = FitMethod::max_likelihood;
  std::optional<GoelOkumotoModel> init;
  int max_iterations = 200;
  double rel_tolerance = 1e-10;
};

struct FitResult {
  GoelOkumotoModel model;
  FitMethod method;
  FitStatus status;
  double log_likelihood;
  /// Sum of squared residuals of the cumulative count curve; filled for both
  /// methods so the two can be compared.
  double sum_squared_error;
  int iterations;
};

/// Estimates (a, b) from failure data. Requires at least two failures.
///
/// Maximum likelihood uses the profile reduction a(b) = n / (1 - exp(-b T))
/// and searches b alone: golden section on log b, then bisection on the sign
/// of the profile score. Least squares fits m(t_i) to the cumulative counts
/// i = 1..n with the analogous closed form for a given b.
FitResult fit(const FailureDataset& data, const FitOptions& options = {});

const char* to_string(FitMethod method);
const char* to_string(FitStatus status);

}  // namespace relfuzz
