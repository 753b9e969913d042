#pragma once

#include <optional>
#include <variant>

#include "relfuzz/cost_model.hpp"
#include "relfuzz/fuzzy_core.hpp"
#include "relfuzz/scalar_search.hpp"
#include "relfuzz/srgm.hpp"

namespace relfuzz {

/// One release-time decision instance: the reliability model, the cost
/// structure, the fuzzy goals and the window of candidate release times.
struct ReleaseProblem {
  GoelOkumotoModel model;
  CostParams cost;
  FuzzyTargets targets;
  Interval window;

  /// [0, 10 / b]: by then all but e^-10 of the fault content is detected.
  static Interval default_window(const GoelOkumotoModel& model);

  static ReleaseProblem with_default_window(const GoelOkumotoModel& model, const CostParams& cost,
                                            const FuzzyTargets& targets);

  void validate() const;
};

struct MembershipPair {
  double cost;
  double reliability;
};

/// Cost and reliability satisfaction degrees at release time `release`.
MembershipPair membership_pair(const ReleaseProblem& p, double release, bool clamp = true);

enum class DecisionStatus { feasible, goal_compromise };

/// Goal-programming deviations from the target level: `under_*` is the
/// shortfall, `over_*` the surplus. At most one of each pair is non-zero.
struct Deviations {
  double under_cost;
  double over_cost;
  double under_reliability;
  double over_reliability;
};

struct ReleaseDecision {
  double release_time;
  /// Satisfaction degree: min of the clamped memberships at release_time.
  double satisfaction;
  double cost;
  double reliability;
  DecisionStatus status;
  /// Unclamped memberships at release_time.
  MembershipPair memberships;
  std::optional<Deviations> deviations;
  /// Weighted shortfall minimized by the goal program (0 for maximin).
  double objective = 0.0;
  /// release_time sits on an edge of the search window.
  bool at_window_boundary = false;
};

enum class InfeasibilityKind {
  strict,    // best unclamped min membership < -1e-9
  boundary,  // best unclamped min membership in [-1e-9, 0]
};

struct InfeasibilityReport {
  double best_time;
  /// Largest unclamped min(mu_cost, mu_reliability) found; never positive.
  double maximin_value;
  InfeasibilityKind kind;
  double cost;
  double reliability;
  MembershipPair memberships;
};

using MaximinOutcome = std::variant<ReleaseDecision, InfeasibilityReport>;

constexpr double kInfeasibilityThreshold = 1e-9;

/// Max-min (Bellman-Zadeh) decision: maximize min(mu_cost(T), mu_rel(T)) over
/// the window. Positive maximin gives a feasible decision with the earliest
/// maximizing T; otherwise an infeasibility report.
MaximinOutcome solve_maximin(const ReleaseProblem& p, const search::ScanOptions& options = {});

struct GoalWeights {
  double cost = 1.0;
  double reliability = 1.0;
};

/// Fuzzy goal program: minimize w_c * eta_c + w_r * eta_r where
/// mu_i(T) + eta_i - rho_i = alpha_target with unclamped memberships and
/// non-negative deviations. Throws DomainError for negative weights.
ReleaseDecision solve_goal_program(const ReleaseProblem& p, GoalWeights weights = {}, double alpha_target = 0.0,
                                   const search::ScanOptions& options = {});

/// Weighted shortfall objective of the goal program at `release`.
double goal_shortfall(const ReleaseProblem& p, double release, GoalWeights weights, double alpha_target);

const char* to_string(DecisionStatus status);
const char* to_string(InfeasibilityKind kind);

}  // namespace relfuzz
