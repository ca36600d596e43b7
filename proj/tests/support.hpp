#pragma once

// Independent reference procedures used only by the tests. None of these
// share code paths with the library implementations they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "linkselect/harness.hpp"
#include "linkselect/model.hpp"
#include "linkselect/simplex.hpp"

namespace linkselect::support {

/// Smallest capacity (on a grid of `step`) admitting the decisions for some
/// initial left amount on the same grid, found by direct replay.
inline std::pair<double, double> grid_min_capacity(const Instance& inst, const std::vector<Decision>& d,
                                                   double step, double cap_limit) {
  for (double cap = 0.0; cap <= cap_limit + 1e-12; cap += step) {
    for (double left0 = 0.0; left0 <= cap + 1e-12; left0 += step) {
      double left = left0;
      bool ok = true;
      for (std::size_t i = 0; i < inst.size() && ok; ++i) {
        if (d[i] != Decision::Accept) continue;
        left += inst[i].direction == Direction::LeftToRight ? -inst[i].weight : inst[i].weight;
        ok = left >= -1e-12 && left <= cap + 1e-12;
      }
      if (ok) return {cap, left0};
    }
  }
  return {std::numeric_limits<double>::infinity(), 0.0};
}

/// Solves a square system by Gaussian elimination with partial pivoting.
inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b) {
  const auto n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-12) return std::nullopt;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double fct = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= fct * a[c][k];
      b[r] -= fct * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

/// Minimum of a bounded LP by enumerating every vertex: each choice of n
/// tight constraints among rows and bounds is solved and kept if feasible.
/// Exponential; for problems with a handful of variables only.
inline std::optional<double> vertex_enumeration_min(const lp::Problem& p) {
  const auto n = p.variable_count();
  struct Hyper {
    std::vector<double> a;
    double b;
  };
  std::vector<Hyper> planes;
  for (const auto& c : p.constraints) planes.push_back({c.coefficients, c.rhs});
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    planes.push_back({e, p.lower[j]});
    planes.push_back({e, p.upper[j]});
  }
  const auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j)
      if (x[j] < p.lower[j] - 1e-7 || x[j] > p.upper[j] + 1e-7) return false;
    for (const auto& c : p.constraints) {
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += c.coefficients[j] * x[j];
      if (c.relation == lp::Relation::LessEqual && v > c.rhs + 1e-7) return false;
      if (c.relation == lp::Relation::GreaterEqual && v < c.rhs - 1e-7) return false;
      if (c.relation == lp::Relation::Equal && std::abs(v - c.rhs) > 1e-7) return false;
    }
    return true;
  };
  std::optional<double> best;
  if (n == 0) return p.objective_offset;
  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  const auto m = planes.size();
  if (m < n) return std::nullopt;
  for (;;) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (auto k : pick) {
      a.push_back(planes[k].a);
      b.push_back(planes[k].b);
    }
    if (auto x = solve_square(a, b); x && feasible(*x)) {
      const double v = p.evaluate(*x);
      if (!best || v < *best) best = v;
    }
    // next combination
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(n) - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - n + static_cast<std::size_t>(i)) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (auto k = static_cast<std::size_t>(i) + 1; k < n; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

/// Random integer-weight instance for property tests.
inline Instance random_instance(std::uint64_t seed, std::size_t t, std::int64_t hi = 20, double f = -1.0,
                                double m = -1.0) {
  SplitMix64 rng(seed ^ 0xA5A5A5A5ULL);
  const double fs[] = {0.25, 1.0, 4.0};
  const double ms[] = {0.0, 1.0};
  if (f < 0) f = fs[rng.uniform_int(0, 2)];
  if (m < 0) m = ms[rng.uniform_int(0, 1)];
  GeneratorConfig cfg;
  cfg.t = t;
  cfg.weights = UniformInt{1, hi};
  cfg.f = f;
  cfg.m = m;
  cfg.seed = seed;
  return generate(cfg);
}

}  // namespace linkselect::support
