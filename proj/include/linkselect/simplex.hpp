#pragma once

// Dense bounded-variable primal simplex.
//
// Solves   minimise c.x + offset   s.t.  A x {<=,=,>=} b,  lower <= x <= upper
// with finite variable bounds. Inequality rows get a slack column; rows whose
// slack cannot start feasible get an artificial column priced out in phase 1.
// Entering and leaving choices follow Bland's rule, so degenerate vertices
// cannot cycle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "linkselect/model.hpp"

namespace linkselect::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Constraint {
  std::vector<double> coefficients;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

struct Problem {
  std::vector<double> objective;
  double objective_offset = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Constraint> constraints;
  std::vector<std::string> names;

  std::size_t variable_count() const noexcept { return objective.size(); }

  /// Adds a variable and returns its column index.
  std::size_t add_variable(double lo, double hi, double cost, std::string name = {}) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(hi);
    names.push_back(std::move(name));
    for (auto& c : constraints) c.coefficients.push_back(0.0);
    return objective.size() - 1;
  }

  Constraint& add_constraint(Relation rel, double rhs) {
    constraints.push_back(Constraint{std::vector<double>(variable_count(), 0.0), rel, rhs});
    return constraints.back();
  }

  void validate() const {
    const auto n = variable_count();
    if (lower.size() != n || upper.size() != n)
      throw std::invalid_argument("lp: bound vectors do not match variable count");
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) || !std::isfinite(objective[j]))
        throw std::invalid_argument("lp: bounds and costs must be finite");
      if (lower[j] > upper[j] + kTolerance) throw std::invalid_argument("lp: empty variable range");
    }
    for (const auto& c : constraints) {
      if (c.coefficients.size() != n) throw std::invalid_argument("lp: ragged constraint row");
      if (!std::isfinite(c.rhs)) throw std::invalid_argument("lp: non-finite right-hand side");
    }
  }

  double evaluate(const std::vector<double>& x) const {
    double v = objective_offset;
    for (std::size_t j = 0; j < x.size(); ++j) v += objective[j] * x[j];
    return v;
  }
};

enum class Status { Optimal, Infeasible };

struct Options {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  std::size_t max_iterations = 200000;
};

struct Result {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

namespace detail {

class Tableau {
public:
  Tableau(const Problem& p, const Options& opt) : opt_(opt), n_struct_(p.variable_count()) {
    p.validate();
    const auto m = p.constraints.size();
    rows_ = m;

    for (std::size_t j = 0; j < n_struct_; ++j) add_column(p.lower[j], p.upper[j]);
    std::vector<std::ptrdiff_t> slack_of(m, -1);
    for (std::size_t i = 0; i < m; ++i)
      if (p.constraints[i].relation != Relation::Equal)
        slack_of[i] = static_cast<std::ptrdiff_t>(add_column(0.0, kInf));

    // residual of each row with every structural variable at its lower bound
    std::vector<double> residual(m);
    for (std::size_t i = 0; i < m; ++i) {
      double r = p.constraints[i].rhs;
      for (std::size_t j = 0; j < n_struct_; ++j) r -= p.constraints[i].coefficients[j] * p.lower[j];
      residual[i] = r;
    }

    // slack enters with +1 for <= rows and -1 for >= rows
    std::vector<double> slack_sign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      if (slack_of[i] >= 0) slack_sign[i] = p.constraints[i].relation == Relation::LessEqual ? 1.0 : -1.0;

    basis_.assign(m, 0);
    std::vector<std::ptrdiff_t> artificial_of(m, -1);
    for (std::size_t i = 0; i < m; ++i) {
      const bool slack_ok = slack_of[i] >= 0 && residual[i] * slack_sign[i] >= -opt_.feasibility_tol;
      if (!slack_ok) artificial_of[i] = static_cast<std::ptrdiff_t>(add_column(0.0, kInf, true));
    }

    const auto ncols = cols();
    table_.assign(m, std::vector<double>(ncols + 1, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
      auto& row = table_[i];
      for (std::size_t j = 0; j < n_struct_; ++j) row[j] = p.constraints[i].coefficients[j];
      if (slack_of[i] >= 0) row[static_cast<std::size_t>(slack_of[i])] = slack_sign[i];
      row[ncols] = p.constraints[i].rhs;
      if (artificial_of[i] >= 0) {
        const double sgn = residual[i] >= 0.0 ? 1.0 : -1.0;
        row[static_cast<std::size_t>(artificial_of[i])] = sgn;
        basis_[i] = static_cast<std::size_t>(artificial_of[i]);
      } else {
        basis_[i] = static_cast<std::size_t>(slack_of[i]);
      }
      // scale the row so that the basic column has coefficient +1
      const double piv = row[basis_[i]];
      if (piv != 1.0)
        for (auto& v : row) v /= piv;
    }

    value_.assign(ncols, 0.0);
    at_upper_.assign(ncols, false);
    is_basic_.assign(ncols, false);
    for (std::size_t j = 0; j < ncols; ++j) value_[j] = lower_[j];
    for (std::size_t i = 0; i < m; ++i) is_basic_[basis_[i]] = true;
    refresh_basic_values();
  }

  bool needs_phase_one() const {
    for (std::size_t j = 0; j < cols(); ++j)
      if (artificial_[j] && is_basic_[j]) return true;
    return false;
  }

  /// Runs phase 1 (if needed); false when the rows are inconsistent.
  bool make_feasible() {
    if (!needs_phase_one()) {
      retire_artificials();
      return true;
    }
    std::vector<double> cost(cols(), 0.0);
    for (std::size_t j = 0; j < cols(); ++j)
      if (artificial_[j]) cost[j] = 1.0;
    optimise(cost);
    double infeasibility = 0.0;
    for (std::size_t j = 0; j < cols(); ++j)
      if (artificial_[j]) infeasibility += value_[j];
    if (infeasibility > opt_.feasibility_tol * static_cast<double>(rows_ + 1)) return false;
    retire_artificials();
    return true;
  }

  /// Minimises cost over the current face, starting from the current basis.
  void optimise(const std::vector<double>& cost) {
    std::vector<double> d(cols());
    for (;;) {
      if (++iterations_ > opt_.max_iterations) throw InvariantError("simplex: iteration limit reached");
      reduced_costs(cost, d);

      // Bland: lowest-index improving column
      std::ptrdiff_t enter = -1;
      for (std::size_t j = 0; j < cols(); ++j) {
        if (is_basic_[j] || fixed(j)) continue;
        if ((!at_upper_[j] && d[j] < -opt_.optimality_tol) || (at_upper_[j] && d[j] > opt_.optimality_tol)) {
          enter = static_cast<std::ptrdiff_t>(j);
          break;
        }
      }
      if (enter < 0) return;
      step(static_cast<std::size_t>(enter));
    }
  }

  /// Pins every non-basic column whose reduced cost is non-zero at the
  /// optimum of `cost`, restricting later passes to the optimal face.
  void restrict_to_optimal_face(const std::vector<double>& cost) {
    std::vector<double> d(cols());
    reduced_costs(cost, d);
    for (std::size_t j = 0; j < cols(); ++j) {
      if (is_basic_[j] || fixed(j)) continue;
      if (std::abs(d[j]) > opt_.optimality_tol) {
        lower_[j] = upper_[j] = value_[j];
      }
    }
  }

  bool is_fixed_nonbasic(std::size_t j) const { return !is_basic_[j] && fixed(j); }

  std::vector<double> structural_values() const {
    return std::vector<double>(value_.begin(), value_.begin() + static_cast<std::ptrdiff_t>(n_struct_));
  }

  std::size_t cols() const noexcept { return lower_.size(); }
  std::size_t iterations() const noexcept { return iterations_; }

  std::vector<double> extend_cost(const std::vector<double>& structural) const {
    std::vector<double> c(cols(), 0.0);
    for (std::size_t j = 0; j < n_struct_; ++j) c[j] = structural[j];
    return c;
  }

private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  std::size_t add_column(double lo, double hi, bool artificial = false) {
    lower_.push_back(lo);
    upper_.push_back(hi);
    artificial_.push_back(artificial);
    return lower_.size() - 1;
  }

  bool fixed(std::size_t j) const { return upper_[j] - lower_[j] <= 0.0; }

  void retire_artificials() {
    for (std::size_t j = 0; j < cols(); ++j)
      if (artificial_[j]) {
        lower_[j] = 0.0;
        upper_[j] = 0.0;
        if (!is_basic_[j]) {
          value_[j] = 0.0;
          at_upper_[j] = false;
        }
      }
    refresh_basic_values();
  }

  void reduced_costs(const std::vector<double>& cost, std::vector<double>& d) const {
    for (std::size_t j = 0; j < cols(); ++j) d[j] = cost[j];
    for (std::size_t i = 0; i < rows_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const auto& row = table_[i];
      for (std::size_t j = 0; j < cols(); ++j) d[j] -= cb * row[j];
    }
  }

  // x_B = B^-1 b - B^-1 N x_N, recomputed from the tableau to avoid drift
  void refresh_basic_values() {
    const auto rhs = cols();
    for (std::size_t i = 0; i < rows_; ++i) {
      const auto& row = table_[i];
      double v = row[rhs];
      for (std::size_t j = 0; j < cols(); ++j)
        if (!is_basic_[j] && value_[j] != 0.0) v -= row[j] * value_[j];
      value_[basis_[i]] = v;
    }
  }

  void step(std::size_t enter) {
    const double dir = at_upper_[enter] ? -1.0 : 1.0;
    double theta = upper_[enter] - lower_[enter];
    std::ptrdiff_t leave_row = -1;
    bool leave_to_upper = false;

    for (std::size_t i = 0; i < rows_; ++i) {
      const double alpha = table_[i][enter] * dir;
      const auto b = basis_[i];
      double limit;
      bool to_upper;
      if (alpha > opt_.pivot_tol) {
        limit = (value_[b] - lower_[b]) / alpha;
        to_upper = false;
      } else if (alpha < -opt_.pivot_tol && std::isfinite(upper_[b])) {
        limit = (upper_[b] - value_[b]) / -alpha;
        to_upper = true;
      } else {
        continue;
      }
      if (limit < 0.0) limit = 0.0;
      // ties go to the lowest-index basic column
      const bool take = limit < theta - 1e-12 ||
                        (leave_row >= 0 && limit <= theta + 1e-12 &&
                         b < basis_[static_cast<std::size_t>(leave_row)]);
      if (take) {
        theta = limit;
        leave_row = static_cast<std::ptrdiff_t>(i);
        leave_to_upper = to_upper;
      }
    }

    if (!std::isfinite(theta)) throw InvariantError("simplex: unbounded direction");

    if (leave_row < 0) {
      // bound flip, basis unchanged
      at_upper_[enter] = !at_upper_[enter];
      value_[enter] = at_upper_[enter] ? upper_[enter] : lower_[enter];
      refresh_basic_values();
      return;
    }

    const auto r = static_cast<std::size_t>(leave_row);
    const auto leaving = basis_[r];
    pivot(r, enter);
    is_basic_[leaving] = false;
    is_basic_[enter] = true;
    basis_[r] = enter;
    at_upper_[leaving] = leave_to_upper;
    value_[leaving] = leave_to_upper ? upper_[leaving] : lower_[leaving];
    at_upper_[enter] = false;
    refresh_basic_values();
  }

  void pivot(std::size_t r, std::size_t c) {
    auto& prow = table_[r];
    const double p = prow[c];
    for (auto& v : prow) v /= p;
    prow[c] = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      auto& row = table_[i];
      const double factor = row[c];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < row.size(); ++j) row[j] -= factor * prow[j];
      row[c] = 0.0;
    }
  }

  Options opt_;
  std::size_t n_struct_;
  std::size_t rows_ = 0;
  std::vector<double> lower_, upper_;
  std::vector<bool> artificial_;
  std::vector<std::vector<double>> table_;  // B^-1 [A | b]
  std::vector<std::size_t> basis_;
  std::vector<double> value_;
  std::vector<bool> at_upper_;
  std::vector<bool> is_basic_;
  std::size_t iterations_ = 0;
};

}  // namespace detail

/// Solves the problem, then breaks ties among optimal vertices by minimising
/// each of `tie_break` objectives in turn over the optimal face of the
/// previous ones.
inline Result solve(const Problem& problem, const std::vector<std::vector<double>>& tie_break = {},
                    const Options& options = {}) {
  detail::Tableau tab(problem, options);
  Result result;
  if (!tab.make_feasible()) {
    result.status = Status::Infeasible;
    result.iterations = tab.iterations();
    return result;
  }
  auto cost = tab.extend_cost(problem.objective);
  tab.optimise(cost);
  for (const auto& secondary : tie_break) {
    tab.restrict_to_optimal_face(cost);
    cost = tab.extend_cost(secondary);
    tab.optimise(cost);
  }
  result.status = Status::Optimal;
  result.x = tab.structural_values();
  for (std::size_t j = 0; j < result.x.size(); ++j)
    result.x[j] = std::clamp(result.x[j], problem.lower[j], problem.upper[j]);
  result.objective = problem.evaluate(result.x);
  result.iterations = tab.iterations();
  return result;
}

}  // namespace linkselect::lp
