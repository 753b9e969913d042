#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "relfuzz/errors.hpp"
#include "relfuzz/solver.hpp"

using namespace relfuzz;
using doctest::Approx;

namespace {

CostParams reference_costs() {
  CostParams p;
  p.setup_cost = 50;
  p.testing_removal_cost_rate = 60;
  p.testing_effort_coefficient = 700;
  p.warranty_removal_cost_rate = 3600;
  p.effort_exponent = 0.95;
  p.mean_testing_removal_time = 0.1;
  p.mean_warranty_removal_time = 0.5;
  p.warranty_length = 450;
  return p;
}

ReleaseProblem feasible_problem() {
  return ReleaseProblem::with_default_window(GoelOkumotoModel(143.32, 0.1246), reference_costs(),
                                             FuzzyTargets{26000, 31000, 0.95, 0.80, 1.0});
}

ReleaseProblem infeasible_problem() {
  ReleaseProblem p = feasible_problem();
  p.targets.budget = 23000;
  p.targets.cost_tolerance = 24500;
  return p;
}

}  // namespace

TEST_CASE("default window and validation") {
  const ReleaseProblem p = feasible_problem();
  CHECK(p.window.lower == 0.0);
  CHECK(p.window.upper == Approx(10.0 / 0.1246));
  ReleaseProblem bad = p;
  bad.window = {5.0, 5.0};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.window = {-1.0, 5.0};
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("membership pair at reference release times") {
  const MembershipPair at_opt = membership_pair(feasible_problem(), 42.72);
  CHECK(at_opt.cost == Approx(0.810).epsilon(0.002 / 0.81));
  CHECK(at_opt.reliability == Approx(0.809).epsilon(0.002 / 0.809));

  const MembershipPair compromise = membership_pair(infeasible_problem(), 34.68, false);
  CHECK(compromise.cost == Approx(-0.105).epsilon(0.005 / 0.105));
  CHECK(std::abs(compromise.reliability) < 0.001 / 0.15);

  // Cost equals the tolerance exactly somewhere past the optimum.
  const ReleaseProblem p = feasible_problem();
  double lo = 42.72, hi = 80.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (total_cost(p.model, p.cost, mid) < 31000 ? lo : hi) = mid;
  }
  CHECK(membership_pair(p, hi).cost == 0.0);
}

TEST_CASE("maximin on the feasible reference configuration") {
  const auto outcome = solve_maximin(feasible_problem());
  REQUIRE(std::holds_alternative<ReleaseDecision>(outcome));
  const auto& d = std::get<ReleaseDecision>(outcome);
  CHECK(d.status == DecisionStatus::feasible);
  CHECK(d.release_time == Approx(42.72).epsilon(0.05 / 42.72));
  CHECK(d.satisfaction == Approx(0.809).epsilon(0.005 / 0.809));
  CHECK(d.reliability == Approx(0.9213).epsilon(0.001 / 0.9213));
  CHECK(d.satisfaction == Approx(std::min(d.memberships.cost, d.memberships.reliability)).epsilon(1e-6));
  // Interior optimum: the two memberships cross.
  CHECK(std::abs(d.memberships.cost - d.memberships.reliability) < 1e-4);
  CHECK_FALSE(d.deviations.has_value());
  CHECK_FALSE(d.at_window_boundary);
}

TEST_CASE("maximin on the infeasible reference configuration") {
  const auto outcome = solve_maximin(infeasible_problem());
  REQUIRE(std::holds_alternative<InfeasibilityReport>(outcome));
  const auto& r = std::get<InfeasibilityReport>(outcome);
  CHECK(r.kind == InfeasibilityKind::strict);
  CHECK(r.maximin_value < 0.0);
  const auto brute = oracle::brute_maximin(oracle::reference_infeasible(), 0, 10 / 0.1246L, 200001);
  CHECK(r.maximin_value == Approx(static_cast<double>(brute.value)).epsilon(1e-4));
}

TEST_CASE("maximin classifies a zero maximin as boundary") {
  // Cost tolerance placed at the best achievable cost with a
  // reliability goal that is trivially met: the maximin is 0.
  ReleaseProblem p = feasible_problem();
  p.targets.reliability_goal = 1e-11;
  p.targets.reliability_tolerance = 1e-12;
  auto neg_cost = [&](double t) { return -total_cost(p.model, p.cost, t); };
  const double t_min = search::golden_section_max(neg_cost, 20.0, 45.0, 1e-12, 500).x;
  // 1e-7 below the minimum cost: maximin is -1e-10, inside the boundary band.
  p.targets.cost_tolerance = total_cost(p.model, p.cost, t_min) - 1e-7;
  p.targets.budget = p.targets.cost_tolerance - 1000;
  const auto outcome = solve_maximin(p);
  REQUIRE(std::holds_alternative<InfeasibilityReport>(outcome));
  CHECK(std::get<InfeasibilityReport>(outcome).kind == InfeasibilityKind::boundary);
}

TEST_CASE("saturated goals give full satisfaction at the earliest release") {
  ReleaseProblem p = feasible_problem();
  p.targets = FuzzyTargets{1e9, 2e9, 1e-11, 1e-12, 1.0};
  const auto outcome = solve_maximin(p);
  REQUIRE(std::holds_alternative<ReleaseDecision>(outcome));
  const auto& d = std::get<ReleaseDecision>(outcome);
  CHECK(d.satisfaction == 1.0);
  CHECK(d.release_time == 0.0);
  CHECK(d.at_window_boundary);
}

TEST_CASE("goal program on the infeasible reference configuration") {
  const ReleaseDecision d = solve_goal_program(infeasible_problem());
  REQUIRE(d.deviations);
  CHECK(d.status == DecisionStatus::goal_compromise);
  CHECK(d.release_time == Approx(34.68).epsilon(0.05 / 34.68));
  CHECK(d.deviations->under_cost == Approx(0.105).epsilon(0.005 / 0.105));
  CHECK(d.deviations->under_reliability < 1e-6);
  CHECK(d.cost == Approx(24657.35).epsilon(0.005));
  CHECK(d.cost - 24500 == Approx(157.35).epsilon(0.05));
  CHECK(d.reliability == Approx(0.80).epsilon(0.001 / 0.8));

  CHECK(d.deviations->under_cost * d.deviations->over_cost == 0.0);
  CHECK(d.deviations->under_reliability * d.deviations->over_reliability == 0.0);
  CHECK(d.objective == Approx(goal_shortfall(infeasible_problem(), d.release_time, {}, 0.0)).epsilon(1e-9));
}

TEST_CASE("goal program on a feasible configuration has no shortfall") {
  const ReleaseProblem p = feasible_problem();
  const ReleaseDecision d = solve_goal_program(p);
  REQUIRE(d.deviations);
  CHECK(d.deviations->under_cost < 1e-9);
  CHECK(d.deviations->under_reliability < 1e-9);
  CHECK(d.memberships.cost >= -1e-9);
  CHECK(d.memberships.reliability >= -1e-9);
}

TEST_CASE("goal program weights") {
  CHECK_THROWS_AS(solve_goal_program(infeasible_problem(), {-1.0, 1.0}), DomainError);
  // Cost weight only: the release time minimizing the cost shortfall, which
  // for this configuration is where the cost curve bottoms out.
  const ReleaseDecision d = solve_goal_program(infeasible_problem(), {1.0, 0.0});
  const auto brute = oracle::brute_goal(oracle::reference_infeasible(), 0, 10 / 0.1246L, 1000001, 1, 0);
  CHECK(d.release_time == Approx(static_cast<double>(brute.t)).epsilon(1e-3));
  CHECK(d.objective == Approx(static_cast<double>(brute.value)).epsilon(1e-6));
  CHECK(d.release_time == Approx(32.5).epsilon(0.01));
}

TEST_CASE("maximin agrees with a brute-force scan on random problems") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto scale = [&](double v) { return v * std::pow(10.0, u(rng)); };
  for (int i = 0; i < 10; ++i) {
    oracle::Params o = oracle::reference_feasible();
    o.a = scale(143.32);
    o.b = scale(0.1246);
    o.c2 = scale(700);
    o.c3 = scale(3600);
    o.budget = scale(26000);
    o.cost_tol = o.budget + scale(5000);
    ReleaseProblem p = feasible_problem();
    p.model = GoelOkumotoModel(static_cast<double>(o.a), static_cast<double>(o.b));
    p.cost.testing_effort_coefficient = static_cast<double>(o.c2);
    p.cost.warranty_removal_cost_rate = static_cast<double>(o.c3);
    p.targets.budget = static_cast<double>(o.budget);
    p.targets.cost_tolerance = static_cast<double>(o.cost_tol);
    p.window = ReleaseProblem::default_window(p.model);

    const auto brute = oracle::brute_maximin(o, 0, p.window.upper, 100001);
    const auto outcome = solve_maximin(p);
    const double value = std::holds_alternative<ReleaseDecision>(outcome)
                             ? std::get<ReleaseDecision>(outcome).satisfaction
                             : std::get<InfeasibilityReport>(outcome).maximin_value;
    CAPTURE(i);
    CHECK(value >= static_cast<double>(brute.value) - 1e-9);
    CHECK(value == Approx(static_cast<double>(brute.value)).epsilon(1e-3).scale(1.0));
  }
}

TEST_CASE("looser cost tolerance never lowers satisfaction") {
  ReleaseProblem p = feasible_problem();
  double previous = -INFINITY;
  for (double tolerance = 26500; tolerance <= 60000; tolerance += 2500) {
    p.targets.cost_tolerance = tolerance;
    const auto outcome = solve_maximin(p);
    const double value = std::holds_alternative<ReleaseDecision>(outcome)
                             ? std::get<ReleaseDecision>(outcome).satisfaction
                             : std::get<InfeasibilityReport>(outcome).maximin_value;
    REQUIRE(value >= previous - 1e-12);
    previous = value;
  }
}

TEST_CASE("a tiny window pins the decision to its edge") {
  ReleaseProblem p = feasible_problem();
  p.window = {0.0, 0.001};
  const auto outcome = solve_maximin(p);
  REQUIRE(std::holds_alternative<InfeasibilityReport>(outcome));
  const ReleaseDecision d = solve_goal_program(p);
  CHECK(d.at_window_boundary);
  CHECK(d.release_time == Approx(0.001));
}
