#pragma once

#include <initializer_list>
#include <optional>
#include <span>

namespace relfuzz {

struct Interval {
  double lower;
  double upper;

  double width() const { return upper - lower; }
  bool contains(double v) const { return lower <= v && v <= upper; }
  bool contains(const Interval& other) const { return lower <= other.lower && other.upper <= upper; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class RampDirection {
  decreasing,  // fuzzy "less or equal": full satisfaction below full_value
  increasing,  // fuzzy "greater or equal": full satisfaction above full_value
};

/// Monotone linear membership function.
///
/// Clamped evaluation is 1 on the full-satisfaction side of `full_value`, 0 on
/// the far side of `zero_value` and linear in between. The unclamped (extended)
/// evaluation keeps the linear piece everywhere, which goal programming needs
/// to measure how far a goal is missed.
class RampMembership {
 public:
  RampMembership(double full_value, double zero_value, RampDirection direction);

  /// Fuzzy "v <= full": 1 at or below `full`, 0 at or above `zero`.
  static RampMembership at_most(double full, double zero);
  /// Fuzzy "v >= full": 1 at or above `full`, 0 at or below `zero`.
  static RampMembership at_least(double full, double zero);

  double full_value() const { return full_; }
  double zero_value() const { return zero_; }
  RampDirection direction() const { return direction_; }

  double clamped(double v) const;
  double extended(double v) const;

  /// Value at which the linear piece equals `level`.
  double inverse(double level) const;

 private:
  double full_;
  double zero_;
  RampDirection direction_;
};

double membership(const RampMembership& m, double v, bool clamp = true);

/// Sub-interval of `domain` where the clamped membership is at least `level`.
/// Returns nullopt when that set is empty. Throws DomainError for a level
/// outside (0, 1] or a non-finite domain.
std::optional<Interval> alpha_cut(const RampMembership& m, double level, const Interval& domain);

/// Standard fuzzy intersection (minimum). Throws DomainError on empty input.
double intersect(std::span<const double> degrees);
double intersect(std::initializer_list<double> degrees);

/// Standard fuzzy union (maximum). Throws DomainError on empty input.
double unite(std::span<const double> degrees);
double unite(std::initializer_list<double> degrees);

/// Fuzzy goals of the release decision: a cost budget with its tolerance and a
/// reliability aspiration with its tolerance over a mission window.
struct FuzzyTargets {
  double budget = 0.0;                 // cost with full satisfaction
  double cost_tolerance = 0.0;         // cost with zero satisfaction, > budget
  double reliability_goal = 0.0;       // reliability with full satisfaction
  double reliability_tolerance = 0.0;  // reliability with zero satisfaction, < goal
  double mission_time = 0.0;           // operational window for reliability, > 0

  void validate() const;

  RampMembership cost_membership() const;
  RampMembership reliability_membership() const;
};

}  // namespace relfuzz
