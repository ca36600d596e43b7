#pragma once

// Fractional lower bound for a fixed link capacity M.
//
// Each packet i is accepted to an extent y_i in [0, x_i]. The left end of the
// link holds S_L,i = S_L,0 - P_i(y) after step i, where P_i is the signed
// prefix flow; the right end holds M - S_L,i. The objective charges every
// unit of declined flow at the packet's per-unit rejection rate f + m/x_i.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "linkselect/model.hpp"
#include "linkselect/simplex.hpp"

namespace linkselect {

struct FractionalSolution {
  double capacity = 0.0;
  std::vector<double> y;
  std::vector<double> left_trace;   // S_L,0..t
  std::vector<double> right_trace;  // S_R,0..t
  double objective = 0.0;
};

/// Packets heavier than M removed from an instance, with their forced cost.
struct Preprocessed {
  Instance instance;
  double forced_cost = 0.0;
  std::vector<std::size_t> kept;  // sub-instance position -> original position (0-based)
};

/// Removes packets that cannot fit on a link of capacity M.
inline Preprocessed preprocess_oversized(const Instance& instance, double capacity) {
  if (capacity < 0.0) throw std::invalid_argument("capacity must be non-negative");
  Preprocessed out{Instance(instance.f(), instance.m()), 0.0, {}};
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const auto& p = instance[i];
    if (p.weight > capacity + kTolerance) {
      out.forced_cost += rejection_cost(instance, p);
    } else {
      out.instance.add(p.direction, p.weight);
      out.kept.push_back(i);
    }
  }
  return out;
}

/// Maps sub-instance decisions back to the original sequence; removed
/// packets are rejected.
inline std::vector<Decision> expand_decisions(const Preprocessed& pre, std::size_t original_size,
                                              const std::vector<Decision>& sub) {
  std::vector<Decision> out(original_size, Decision::Reject);
  for (std::size_t k = 0; k < pre.kept.size(); ++k) out[pre.kept[k]] = sub[k];
  return out;
}

/// Per-unit cost of declining part of a packet.
inline double unit_rejection_rate(const Instance& instance, const Packet& p) {
  return instance.f() + instance.m() / p.weight;
}

inline double fractional_cost(const Instance& instance, const std::vector<double>& y) {
  double v = 0.0;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const auto& p = instance[i];
    const double declined = p.weight - y[i];
    v += instance.f() * declined + instance.m() * declined / p.weight;
  }
  return v;
}

namespace detail {

inline void check_fits(const Instance& instance, double capacity) {
  if (capacity < 0.0) throw std::invalid_argument("capacity must be non-negative");
  for (const auto& p : instance.packets())
    if (p.weight > capacity + kTolerance)
      throw std::invalid_argument("packet " + std::to_string(p.index) +
                                  " is heavier than the capacity; preprocess first");
}

}  // namespace detail

/// The LP exactly as written with explicit capacity traces. Columns are
/// y_1..y_t, then S_L,0..S_L,t, then S_R,0..S_R,t. Used for cross-checking.
inline lp::Problem build_full_lp(const Instance& instance, double capacity) {
  detail::check_fits(instance, capacity);
  const auto t = instance.size();
  lp::Problem prob;
  double offset = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    const auto& p = instance[i];
    prob.add_variable(0.0, p.weight, -unit_rejection_rate(instance, p), "y" + std::to_string(i + 1));
    offset += rejection_cost(instance, p);
  }
  prob.objective_offset = offset;
  const auto sl = [t](std::size_t i) { return t + i; };
  const auto sr = [t](std::size_t i) { return 2 * t + 1 + i; };
  for (std::size_t i = 0; i <= t; ++i) prob.add_variable(0.0, capacity, 0.0, "SL" + std::to_string(i));
  for (std::size_t i = 0; i <= t; ++i) prob.add_variable(0.0, capacity, 0.0, "SR" + std::to_string(i));

  for (std::size_t i = 0; i <= t; ++i) {
    auto& c = prob.add_constraint(lp::Relation::Equal, capacity);
    c.coefficients[sl(i)] = 1.0;
    c.coefficients[sr(i)] = 1.0;
  }
  for (std::size_t i = 1; i <= t; ++i) {
    const double s = flow_sign(instance[i - 1].direction);
    // S_L,i - S_L,i-1 + s*y_i = 0
    auto& left = prob.add_constraint(lp::Relation::Equal, 0.0);
    left.coefficients[sl(i)] = 1.0;
    left.coefficients[sl(i - 1)] = -1.0;
    left.coefficients[i - 1] = s;
    // S_R,i - S_R,i-1 - s*y_i = 0
    auto& right = prob.add_constraint(lp::Relation::Equal, 0.0);
    right.coefficients[sr(i)] = 1.0;
    right.coefficients[sr(i - 1)] = -1.0;
    right.coefficients[i - 1] = -s;
  }
  return prob;
}

/// The same LP with the traces eliminated: columns y_1..y_t then S_L,0, and
/// rows 0 <= S_L,0 - P_i(y) <= M for every i.
inline lp::Problem build_reduced_lp(const Instance& instance, double capacity) {
  detail::check_fits(instance, capacity);
  const auto t = instance.size();
  lp::Problem prob;
  double offset = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    const auto& p = instance[i];
    prob.add_variable(0.0, p.weight, -unit_rejection_rate(instance, p), "y" + std::to_string(i + 1));
    offset += rejection_cost(instance, p);
  }
  prob.objective_offset = offset;
  const auto s0 = prob.add_variable(0.0, capacity, 0.0, "SL0");
  for (std::size_t i = 1; i <= t; ++i) {
    for (auto rel : {lp::Relation::GreaterEqual, lp::Relation::LessEqual}) {
      auto& c = prob.add_constraint(rel, rel == lp::Relation::GreaterEqual ? 0.0 : capacity);
      c.coefficients[s0] = 1.0;
      for (std::size_t k = 0; k < i; ++k) c.coefficients[k] = -flow_sign(instance[k].direction);
    }
  }
  return prob;
}

/// Tie-break objectives preferring larger y_1, then larger y_2, ...
inline std::vector<std::vector<double>> lexicographic_acceptance(std::size_t packets, std::size_t columns) {
  std::vector<std::vector<double>> out;
  out.reserve(packets);
  for (std::size_t i = 0; i < packets; ++i) {
    std::vector<double> c(columns, 0.0);
    c[i] = -1.0;
    out.push_back(std::move(c));
  }
  return out;
}

/// Rebuilds traces and objective from acceptance amounts and the left start.
inline FractionalSolution make_fractional(const Instance& instance, double capacity, std::vector<double> y,
                                          double left0) {
  const auto t = instance.size();
  FractionalSolution sol;
  sol.capacity = capacity;
  for (std::size_t i = 0; i < t; ++i) {
    // snap solver noise onto the box so Full/zero classifications are exact
    y[i] = std::clamp(y[i], 0.0, instance[i].weight);
    if (instance[i].weight - y[i] <= kTolerance) y[i] = instance[i].weight;
    if (y[i] <= kTolerance) y[i] = 0.0;
  }
  sol.y = std::move(y);
  sol.left_trace.resize(t + 1);
  sol.right_trace.resize(t + 1);
  double left = std::clamp(left0, 0.0, capacity);
  sol.left_trace[0] = left;
  sol.right_trace[0] = capacity - left;
  for (std::size_t i = 0; i < t; ++i) {
    left -= flow_sign(instance[i].direction) * sol.y[i];
    sol.left_trace[i + 1] = left;
    sol.right_trace[i + 1] = capacity - left;
  }
  sol.objective = fractional_cost(instance, sol.y);
  return sol;
}

/// Packets the solution must accept in full (forces y_i = x_i).
using PinnedSet = std::vector<bool>;

/// Optimal fractional solution, or nullopt when pinned packets cannot all be
/// carried at this capacity. Without pins the LP is always feasible (y = 0).
inline std::optional<FractionalSolution> try_solve_lp(const Instance& instance, double capacity,
                                                      const PinnedSet& pinned = {}) {
  auto prob = build_reduced_lp(instance, capacity);
  const auto t = instance.size();
  for (std::size_t i = 0; i < pinned.size() && i < t; ++i)
    if (pinned[i]) prob.lower[i] = prob.upper[i];
  const auto res = lp::solve(prob, lexicographic_acceptance(t, prob.variable_count()));
  if (res.status != lp::Status::Optimal) return std::nullopt;
  std::vector<double> y(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(t));
  return make_fractional(instance, capacity, std::move(y), res.x[t]);
}

/// Solves the LP bound at capacity M. All packets must fit (weight <= M).
inline FractionalSolution solve_lp(const Instance& instance, double capacity) {
  auto sol = try_solve_lp(instance, capacity);
  if (!sol) throw InvariantError("LP bound reported infeasible although y = 0 is feasible");
  return *sol;
}

/// Checks the structural invariants of a fractional solution. Returns an
/// empty string when valid, otherwise a description of the first violation.
inline std::string validate_fractional(const Instance& instance, const FractionalSolution& sol,
                                       double tol = 1e-7) {
  const auto t = instance.size();
  if (sol.y.size() != t || sol.left_trace.size() != t + 1 || sol.right_trace.size() != t + 1)
    return "dimension mismatch";
  for (std::size_t i = 0; i <= t; ++i) {
    if (sol.left_trace[i] < -tol || sol.right_trace[i] < -tol) return "negative trace at " + std::to_string(i);
    if (std::abs(sol.left_trace[i] + sol.right_trace[i] - sol.capacity) > tol)
      return "trace sum differs from capacity at " + std::to_string(i);
  }
  for (std::size_t i = 0; i < t; ++i) {
    if (sol.y[i] < -tol || sol.y[i] > instance[i].weight + tol) return "y out of range at " + std::to_string(i);
    const double s = flow_sign(instance[i].direction);
    if (std::abs(sol.left_trace[i + 1] - (sol.left_trace[i] - s * sol.y[i])) > tol)
      return "left trace update broken at " + std::to_string(i + 1);
    if (std::abs(sol.right_trace[i + 1] - (sol.right_trace[i] + s * sol.y[i])) > tol)
      return "right trace update broken at " + std::to_string(i + 1);
  }
  if (std::abs(sol.objective - fractional_cost(instance, sol.y)) > tol) return "objective mismatch";
  return {};
}

}  // namespace linkselect
