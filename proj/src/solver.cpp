#include "relfuzz/solver.hpp"

#include <algorithm>
#include <cmath>

#include "relfuzz/errors.hpp"

namespace relfuzz {

Interval ReleaseProblem::default_window(const GoelOkumotoModel& model) {
  return {0.0, 10.0 / model.detection_rate()};
}

ReleaseProblem ReleaseProblem::with_default_window(const GoelOkumotoModel& model, const CostParams& cost,
                                                   const FuzzyTargets& targets) {
  return {model, cost, targets, default_window(model)};
}

void ReleaseProblem::validate() const {
  cost.validate();
  targets.validate();
  if (!std::isfinite(window.lower) || !std::isfinite(window.upper) || window.lower < 0.0 ||
      !(window.lower < window.upper))
    throw DomainError("search window must be a non-degenerate interval with lower bound >= 0");
}

MembershipPair membership_pair(const ReleaseProblem& p, double release, bool clamp) {
  const double cost = total_cost(p.model, p.cost, release);
  const double reliability = p.model.conditional_reliability(release, p.targets.mission_time);
  return {membership(p.targets.cost_membership(), cost, clamp),
          membership(p.targets.reliability_membership(), reliability, clamp)};
}

namespace {

bool on_edge(const Interval& window, double t) {
  const double eps = 1e-9 * std::max(1.0, window.width());
  return t - window.lower <= eps || window.upper - t <= eps;
}

ReleaseDecision evaluate(const ReleaseProblem& p, double release, DecisionStatus status) {
  ReleaseDecision d{};
  d.release_time = release;
  d.cost = total_cost(p.model, p.cost, release);
  d.reliability = p.model.conditional_reliability(release, p.targets.mission_time);
  d.memberships = {p.targets.cost_membership().extended(d.cost),
                   p.targets.reliability_membership().extended(d.reliability)};
  d.satisfaction = std::min(p.targets.cost_membership().clamped(d.cost),
                            p.targets.reliability_membership().clamped(d.reliability));
  d.status = status;
  d.at_window_boundary = on_edge(p.window, release);
  return d;
}

}  // namespace

MaximinOutcome solve_maximin(const ReleaseProblem& p, const search::ScanOptions& options) {
  p.validate();
  const RampMembership cost_ramp = p.targets.cost_membership();
  const RampMembership rel_ramp = p.targets.reliability_membership();
  // Unclamped below, capped at full satisfaction: positive exactly where the
  // clamped decision is positive, and keeps the size of the violation when
  // nothing is feasible. The cap makes saturated stretches ties, which the
  // search resolves to the earliest release.
  auto decision_degree = [&](double t) {
    const double c = cost_ramp.extended(total_cost(p.model, p.cost, t));
    const double r = rel_ramp.extended(p.model.conditional_reliability(t, p.targets.mission_time));
    return std::min(1.0, std::min(c, r));
  };
  const search::Point best = search::maximize_earliest(decision_degree, p.window, options);

  if (best.value > 0.0) return evaluate(p, best.x, DecisionStatus::feasible);

  const ReleaseDecision at_best = evaluate(p, best.x, DecisionStatus::feasible);
  InfeasibilityReport report{};
  report.best_time = best.x;
  report.maximin_value = best.value;
  report.kind = best.value < -kInfeasibilityThreshold ? InfeasibilityKind::strict : InfeasibilityKind::boundary;
  report.cost = at_best.cost;
  report.reliability = at_best.reliability;
  report.memberships = at_best.memberships;
  return report;
}

double goal_shortfall(const ReleaseProblem& p, double release, GoalWeights weights, double alpha_target) {
  const MembershipPair mu = membership_pair(p, release, false);
  return weights.cost * std::max(0.0, alpha_target - mu.cost) +
         weights.reliability * std::max(0.0, alpha_target - mu.reliability);
}

ReleaseDecision solve_goal_program(const ReleaseProblem& p, GoalWeights weights, double alpha_target,
                                   const search::ScanOptions& options) {
  p.validate();
  if (!(weights.cost >= 0.0) || !(weights.reliability >= 0.0) || !std::isfinite(weights.cost) ||
      !std::isfinite(weights.reliability))
    throw DomainError("goal weights must be finite and non-negative");
  if (!std::isfinite(alpha_target)) throw DomainError("alpha target must be finite");

  auto negated = [&](double t) { return -goal_shortfall(p, t, weights, alpha_target); };
  const search::Point best = search::maximize_earliest(negated, p.window, options);

  ReleaseDecision d = evaluate(p, best.x, DecisionStatus::goal_compromise);
  const double gap_cost = alpha_target - d.memberships.cost;
  const double gap_rel = alpha_target - d.memberships.reliability;
  d.deviations = Deviations{std::max(0.0, gap_cost), std::max(0.0, -gap_cost), std::max(0.0, gap_rel),
                            std::max(0.0, -gap_rel)};
  d.objective = weights.cost * d.deviations->under_cost + weights.reliability * d.deviations->under_reliability;
  return d;
}

const char* to_string(DecisionStatus status) {
  switch (status) {
    case DecisionStatus::feasible: return "feasible";
    case DecisionStatus::goal_compromise: return "goal_compromise";
  }
  return "?";
}

const char* to_string(InfeasibilityKind kind) {
  switch (kind) {
    case InfeasibilityKind::strict: return "infeasible";
    case InfeasibilityKind::boundary: return "infeasible_boundary";
  }
  return "?";
}

}  // namespace relfuzz
