#pragma once

#include "relfuzz/srgm.hpp"

namespace relfuzz {

/// Exponential fault-removal time truncated at `cutoff`.
class TruncatedExponential {
 public:
  TruncatedExponential(double rate, double cutoff);

  double rate() const { return rate_; }
  double cutoff() const { return cutoff_; }

 private:
  double rate_;
  double cutoff_;
};

double removal_time_pdf(const TruncatedExponential& dist, double y);
double expected_removal_time(const TruncatedExponential& dist);

/// Cost constants of the testing + warranty cost structure.
struct CostParams {
  double setup_cost = 0.0;                  // fixed cost of testing
  double testing_removal_cost_rate = 0.0;   // per unit removal time during testing
  double testing_effort_coefficient = 0.0;  // scales T^effort_exponent
  double warranty_removal_cost_rate = 0.0;  // per unit removal time under warranty
  double effort_exponent = 1.0;             // in (0, 1]
  double mean_testing_removal_time = 0.0;
  double mean_warranty_removal_time = 0.0;
  double warranty_length = 0.0;

  /// Throws DomainError when a field is negative or non-finite, the exponent
  /// is outside (0, 1], or the warranty length is not positive.
  void validate() const;
};

struct CostBreakdown {
  double setup;
  double testing_removal;
  double testing_effort;
  double warranty;
  double total;
};

double testing_removal_cost(const GoelOkumotoModel& model, const CostParams& p, double release);
double testing_effort_cost(const CostParams& p, double release);
double warranty_cost(const GoelOkumotoModel& model, const CostParams& p, double release);
double total_cost(const GoelOkumotoModel& model, const CostParams& p, double release);

/// All components at once; `total` is computed exactly as total_cost does.
CostBreakdown cost_breakdown(const GoelOkumotoModel& model, const CostParams& p, double release);

}  // namespace relfuzz
