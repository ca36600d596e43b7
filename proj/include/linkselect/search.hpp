#pragma once

// Capacity search: sweep a geometric grid of capacities, solve the LP bound
// and the rounding at each, keep the cheapest rounded solution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "linkselect/approx.hpp"
#include "linkselect/lp_bound.hpp"
#include "linkselect/model.hpp"
#include "linkselect/parallel.hpp"

namespace linkselect {

inline constexpr double kDefaultEpsilon = 0.1;

struct CapacityGrid {
  double epsilon = kDefaultEpsilon;
  std::vector<double> values;
};

/// {0} together with x_min (1+eps)^k for every k keeping the value <= M_max;
/// M_max itself is appended when the last power falls short of it.
inline CapacityGrid capacity_grid(double x_min, double m_max, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be positive");
  CapacityGrid grid{epsilon, {0.0}};
  if (!(m_max > 0.0)) return grid;
  if (!(x_min > 0.0) || x_min > m_max + kTolerance)
    throw std::invalid_argument("capacity grid needs 0 < x_min <= M_max");
  for (int k = 0;; ++k) {
    const double v = x_min * std::pow(1.0 + epsilon, k);
    if (v > m_max + kTolerance) break;
    grid.values.push_back(v);
  }
  if (grid.values.back() < m_max - kTolerance) grid.values.push_back(m_max);
  return grid;
}

inline CapacityGrid capacity_grid(const Instance& instance, double epsilon) {
  if (instance.empty()) return capacity_grid(0.0, 0.0, epsilon);
  return capacity_grid(x_min(instance), m_max(instance), epsilon);
}

struct GridPointResult {
  double capacity = 0.0;
  bool feasible = true;  // false only when pinned packets cannot be carried
  double lp_objective = 0.0;
  double forced_cost = 0.0;
  double lower_bound_term = 0.0;  // lp_objective + forced_cost + M/(1+eps)
  DecisionSolution alg_solution;  // decisions over the full instance
  FractionalSolution fractional;  // over the preprocessed sub-instance
  ApproxRun run;                  // over the preprocessed sub-instance
  std::vector<std::size_t> kept;  // sub-instance position -> original position
};

struct SolveOptions {
  double epsilon = kDefaultEpsilon;
  std::size_t threads = 1;
  PinnedSet pinned;  // packets that must be accepted (network solver)
  Constants constants;
};

struct SolveResult {
  DecisionSolution best;
  std::size_t best_index = 0;
  std::vector<GridPointResult> points;

  /// min over the grid of (LB_M + forced + M/(1+eps)); a lower bound on OPT.
  double lower_bound() const {
    double lb = std::numeric_limits<double>::infinity();
    for (const auto& p : points)
      if (p.feasible) lb = std::min(lb, p.lower_bound_term);
    return lb;
  }
};

/// LP bound plus rounding at one capacity.
inline GridPointResult evaluate_capacity(const Instance& instance, double capacity, const SolveOptions& options) {
  GridPointResult point;
  point.capacity = capacity;
  const auto pre = preprocess_oversized(instance, capacity);
  point.forced_cost = pre.forced_cost;
  point.kept = pre.kept;

  PinnedSet sub_pinned;
  if (!options.pinned.empty()) {
    for (std::size_t i = 0; i < instance.size(); ++i)
      if (options.pinned[i] && instance[i].weight > capacity + kTolerance) {
        point.feasible = false;
        return point;
      }
    sub_pinned.resize(pre.kept.size());
    for (std::size_t k = 0; k < pre.kept.size(); ++k) sub_pinned[k] = options.pinned[pre.kept[k]];
  }

  auto frac = try_solve_lp(pre.instance, capacity, sub_pinned);
  if (!frac) {
    point.feasible = false;
    return point;
  }
  point.fractional = std::move(*frac);
  point.lp_objective = point.fractional.objective;
  point.lower_bound_term = point.lp_objective + point.forced_cost + capacity / (1.0 + options.epsilon);
  point.run = run_approx(pre.instance, capacity, point.fractional, pre.forced_cost, options.constants);
  point.alg_solution = point.run.solution;
  point.alg_solution.decisions = expand_decisions(pre, instance.size(), point.run.solution.decisions);
  return point;
}

/// Sweeps the capacity grid and returns the cheapest rounded solution
/// (ties go to the smaller capacity).
inline SolveResult solve(const Instance& instance, const SolveOptions& options = {}) {
  if (!options.pinned.empty() && options.pinned.size() != instance.size())
    throw std::invalid_argument("pinned set does not match instance");
  const auto grid = capacity_grid(instance, options.epsilon);
  SolveResult result;
  result.points.resize(grid.values.size());
  parallel_for(grid.values.size(), options.threads,
               [&](std::size_t g) { result.points[g] = evaluate_capacity(instance, grid.values[g], options); });

  bool found = false;
  for (std::size_t g = 0; g < result.points.size(); ++g) {
    const auto& p = result.points[g];
    if (!p.feasible) continue;
    if (!found || p.alg_solution.cost.total < result.best.cost.total - kTolerance) {
      result.best = p.alg_solution;
      result.best_index = g;
      found = true;
    }
  }
  if (!found) throw InvariantError("capacity search found no feasible grid point");
  return result;
}

inline SolveResult solve(const Instance& instance, double epsilon) {
  SolveOptions options;
  options.epsilon = epsilon;
  return solve(instance, options);
}

}  // namespace linkselect
