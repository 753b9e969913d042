#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "relfuzz/errors.hpp"
#include "relfuzz/fuzzy_core.hpp"

namespace relfuzz::search {

struct ScanOptions {
  std::size_t grid_points = 2001;
  double rel_tolerance = 1e-8;
  /// Values within this (relative to max(1, |best|)) of the best are ties.
  double tie_tolerance = 1e-12;
  int max_iterations = 200;
};

struct Point {
  double x;
  double value;
};

/// Evenly spaced grid with both end points included exactly.
inline std::vector<double> grid(const Interval& window, std::size_t points) {
  if (points < 2) throw DomainError("grid needs at least two points");
  std::vector<double> xs(points);
  const double step = window.width() / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) xs[i] = window.lower + step * static_cast<double>(i);
  xs.back() = window.upper;
  return xs;
}

/// Golden-section maximization on [lo, hi]; assumes f is unimodal there.
template <class F>
Point golden_section_max(F&& f, double lo, double hi, double abs_tolerance, int max_iterations) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < max_iterations && hi - lo > abs_tolerance; ++it) {
    // ">=" keeps the left half on ties so plateaus resolve towards lo.
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  Point best = f1 >= f2 ? Point{x1, f1} : Point{x2, f2};
  for (double x : {lo, hi}) {
    const double v = f(x);
    if (v > best.value || (v == best.value && x < best.x)) best = {x, v};
  }
  return best;
}

/// Global maximization of a scalar function over `window`: grid scan, golden
/// section on every grid-level local maximum, then a left-edge bisection so
/// that among near-ties the smallest argument wins. Evaluation order is fixed,
/// so the result is deterministic.
template <class F>
Point maximize_earliest(F&& f, const Interval& window, const ScanOptions& options = {}) {
  if (!(window.lower < window.upper) || !std::isfinite(window.lower) || !std::isfinite(window.upper))
    throw DomainError("search window must be a finite non-degenerate interval");

  const std::vector<double> xs = grid(window, options.grid_points);
  const std::size_t n = xs.size();
  std::vector<double> vs(n);
  for (std::size_t i = 0; i < n; ++i) vs[i] = f(xs[i]);

  std::vector<Point> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || vs[i] > vs[i - 1];
    const bool right_ok = i + 1 == n || vs[i] >= vs[i + 1];
    if (!left_ok || !right_ok) continue;
    const double lo = xs[i == 0 ? 0 : i - 1];
    const double hi = xs[i + 1 == n ? n - 1 : i + 1];
    const double tol = options.rel_tolerance * std::max({std::abs(lo), std::abs(hi), window.width() * 1e-6});
    Point refined = golden_section_max(f, lo, hi, tol, options.max_iterations);
    candidates.push_back(refined.value > vs[i] ? refined : Point{xs[i], vs[i]});
  }

  double best = vs[0];
  for (double v : vs) best = std::max(best, v);
  for (const Point& c : candidates) best = std::max(best, c.value);
  const double threshold = best - options.tie_tolerance * std::max(1.0, std::abs(best));

  // Earliest point known to be within the tie band.
  Point first{window.upper, 0.0};
  bool found = false;
  std::size_t first_grid = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (vs[i] >= threshold) {
      first = {xs[i], vs[i]};
      first_grid = i;
      found = true;
      break;
    }
  }
  for (const Point& c : candidates) {
    if (c.value >= threshold && (!found || c.x < first.x)) {
      first = c;
      found = true;
    }
  }
  if (first.x <= window.lower) return first;

  // Largest grid point strictly left of `first`; it is outside the tie band.
  std::size_t k = std::min(first_grid, n - 1);
  while (k > 0 && xs[k] >= first.x) --k;
  if (xs[k] >= first.x) return first;
  double lo = xs[k];
  double hi = first.x;
  double hi_value = first.value;
  const double tol = 1e-12 * std::max(1.0, std::abs(hi));
  for (int it = 0; it < options.max_iterations && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = f(mid);
    if (v >= threshold) {
      hi = mid;
      hi_value = v;
    } else {
      lo = mid;
    }
  }
  return {hi, hi_value};
}

}  // namespace relfuzz::search
