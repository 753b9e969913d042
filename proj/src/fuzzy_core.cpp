#include "relfuzz/fuzzy_core.hpp"

#include <algorithm>
#include <cmath>

#include "relfuzz/errors.hpp"

namespace relfuzz {

RampMembership::RampMembership(double full_value, double zero_value, RampDirection direction)
    : full_(full_value), zero_(zero_value), direction_(direction) {
  if (!std::isfinite(full_) || !std::isfinite(zero_)) throw DomainError("ramp end points must be finite");
  if (full_ == zero_) throw DomainError("degenerate ramp: full and zero values coincide");
  const bool ordered = direction_ == RampDirection::decreasing ? full_ < zero_ : zero_ < full_;
  if (!ordered) throw DomainError("ramp end points are ordered against its direction");
}

RampMembership RampMembership::at_most(double full, double zero) {
  return {full, zero, RampDirection::decreasing};
}

RampMembership RampMembership::at_least(double full, double zero) {
  return {full, zero, RampDirection::increasing};
}

double RampMembership::extended(double v) const { return (v - zero_) / (full_ - zero_); }

double RampMembership::clamped(double v) const {
  if (direction_ == RampDirection::decreasing) {
    if (v <= full_) return 1.0;
    if (v >= zero_) return 0.0;
  } else {
    if (v >= full_) return 1.0;
    if (v <= zero_) return 0.0;
  }
  return std::clamp(extended(v), 0.0, 1.0);
}

double RampMembership::inverse(double level) const {
  if (level == 1.0) return full_;
  if (level == 0.0) return zero_;
  return zero_ + level * (full_ - zero_);
}

double membership(const RampMembership& m, double v, bool clamp) { return clamp ? m.clamped(v) : m.extended(v); }

std::optional<Interval> alpha_cut(const RampMembership& m, double level, const Interval& domain) {
  if (!(level > 0.0 && level <= 1.0)) throw DomainError("alpha-cut level must be in (0, 1]");
  if (!std::isfinite(domain.lower) || !std::isfinite(domain.upper) || domain.lower > domain.upper)
    throw DomainError("alpha-cut domain must be a finite interval");
  const double edge = m.inverse(level);
  Interval cut = domain;
  if (m.direction() == RampDirection::decreasing)
    cut.upper = std::min(domain.upper, edge);
  else
    cut.lower = std::max(domain.lower, edge);
  if (cut.lower > cut.upper) return std::nullopt;
  return cut;
}

double intersect(std::span<const double> degrees) {
  if (degrees.empty()) throw DomainError("intersection of no degrees");
  return *std::min_element(degrees.begin(), degrees.end());
}

double intersect(std::initializer_list<double> degrees) { return intersect(std::span(degrees.begin(), degrees.size())); }

double unite(std::span<const double> degrees) {
  if (degrees.empty()) throw DomainError("union of no degrees");
  return *std::max_element(degrees.begin(), degrees.end());
}

double unite(std::initializer_list<double> degrees) { return unite(std::span(degrees.begin(), degrees.size())); }

void FuzzyTargets::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(budget) || !finite(cost_tolerance) || !(budget < cost_tolerance))
    throw DomainError("cost tolerance must exceed the budget");
  if (!(reliability_goal > 0.0 && reliability_goal < 1.0)) throw DomainError("reliability goal must be in (0, 1)");
  if (!(reliability_tolerance > 0.0 && reliability_tolerance < 1.0))
    throw DomainError("reliability tolerance must be in (0, 1)");
  if (!(reliability_tolerance < reliability_goal)) throw DomainError("reliability tolerance must be below the goal");
  if (!finite(mission_time) || !(mission_time > 0.0)) throw DomainError("mission time must be positive");
}

RampMembership FuzzyTargets::cost_membership() const { return RampMembership::at_most(budget, cost_tolerance); }

RampMembership FuzzyTargets::reliability_membership() const {
  return RampMembership::at_least(reliability_goal, reliability_tolerance);
}

}  // namespace relfuzz
