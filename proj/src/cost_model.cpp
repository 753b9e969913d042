#include "relfuzz/cost_model.hpp"

#include <cmath>
#include <string>

#include "relfuzz/errors.hpp"

namespace relfuzz {

namespace {

void require_release(double release) {
  if (!std::isfinite(release) || release < 0.0) throw DomainError("release time must be finite and non-negative");
}

void require_non_negative(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) throw DomainError(std::string(name) + " must be finite and non-negative");
}

}  // namespace

TruncatedExponential::TruncatedExponential(double rate, double cutoff) : rate_(rate), cutoff_(cutoff) {
  if (!std::isfinite(rate_) || rate_ <= 0.0) throw DomainError("removal rate must be positive");
  if (!std::isfinite(cutoff_) || cutoff_ <= 0.0) throw DomainError("removal cutoff must be positive");
}

double removal_time_pdf(const TruncatedExponential& dist, double y) {
  if (!(y >= 0.0) || y > dist.cutoff()) return 0.0;
  const double lambda = dist.rate();
  return lambda * std::exp(-lambda * y) / -std::expm1(-lambda * dist.cutoff());
}

double expected_removal_time(const TruncatedExponential& dist) {
  const double lambda = dist.rate();
  const double x = lambda * dist.cutoff();
  // (1 - (x + 1) e^{-x}) / (lambda (1 - e^{-x})); the numerator is rewritten
  // as -expm1(-x) - x e^{-x} to keep precision for small x.
  return (-std::expm1(-x) - x * std::exp(-x)) / (lambda * -std::expm1(-x));
}

void CostParams::validate() const {
  require_non_negative(setup_cost, "c0");
  require_non_negative(testing_removal_cost_rate, "c1");
  require_non_negative(testing_effort_coefficient, "c2");
  require_non_negative(warranty_removal_cost_rate, "c3");
  require_non_negative(mean_testing_removal_time, "mu_y");
  require_non_negative(mean_warranty_removal_time, "mu_w");
  if (!std::isfinite(effort_exponent) || effort_exponent <= 0.0 || effort_exponent > 1.0)
    throw DomainError("alpha_exp must be in (0, 1]");
  if (!std::isfinite(warranty_length) || warranty_length <= 0.0) throw DomainError("t_w must be positive");
}

double testing_removal_cost(const GoelOkumotoModel& model, const CostParams& p, double release) {
  require_release(release);
  return p.testing_removal_cost_rate * model.mean_value(release) * p.mean_testing_removal_time;
}

double testing_effort_cost(const CostParams& p, double release) {
  require_release(release);
  return p.testing_effort_coefficient * std::pow(release, p.effort_exponent);
}

double warranty_cost(const GoelOkumotoModel& model, const CostParams& p, double release) {
  require_release(release);
  return p.warranty_removal_cost_rate * p.mean_warranty_removal_time *
         model.expected_faults_in(release, p.warranty_length);
}

CostBreakdown cost_breakdown(const GoelOkumotoModel& model, const CostParams& p, double release) {
  CostBreakdown c{};
  c.setup = p.setup_cost;
  c.testing_removal = testing_removal_cost(model, p, release);
  c.testing_effort = testing_effort_cost(p, release);
  c.warranty = warranty_cost(model, p, release);
  c.total = c.setup + c.testing_removal + c.testing_effort + c.warranty;
  return c;
}

double total_cost(const GoelOkumotoModel& model, const CostParams& p, double release) {
  return cost_breakdown(model, p, release).total;
}

}  // namespace relfuzz
