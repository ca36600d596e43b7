#pragma once

// Exhaustive optimum over all 2^t accept/reject vectors. Ground truth for
// ratio measurements and the hardness check; exponential by design.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "linkselect/model.hpp"

namespace linkselect {

inline constexpr std::size_t kDefaultOracleLimit = 20;

struct ExactResult {
  double total = 0.0;           // OPT
  double capacity_cost = 0.0;   // OPT^C
  double rejection_cost = 0.0;  // OPT^R
  std::vector<Decision> decisions;
  double initial_left = 0.0;
};

struct FixedCapacityResult {
  double rejection_cost = 0.0;  // OPT_M^R
  std::vector<Decision> decisions;
};

namespace detail {

// Depth-first walk over decision vectors, Accept branch first, carrying the
// running prefix flow, its extremes and the rejection cost. Every leaf is a
// full decision vector, so the walk visits 2^t leaves with O(1) work per node.
template <class Leaf, class Prune>
void enumerate_decisions(const Instance& instance, Leaf&& leaf, Prune&& prune) {
  const auto t = instance.size();
  std::vector<Decision> current(t, Decision::Reject);
  struct Frame {
    double prefix, hi, lo, rejected;
  };
  auto rec = [&](auto&& self, std::size_t i, Frame s) -> void {
    if (prune(s.hi - s.lo)) return;
    if (i == t) {
      leaf(current, s.hi - s.lo, s.hi, s.rejected);
      return;
    }
    const auto& p = instance[i];
    const double prefix = s.prefix + flow_sign(p.direction) * p.weight;
    current[i] = Decision::Accept;
    self(self, i + 1, Frame{prefix, std::max(s.hi, prefix), std::min(s.lo, prefix), s.rejected});
    current[i] = Decision::Reject;
    self(self, i + 1, Frame{s.prefix, s.hi, s.lo, s.rejected + rejection_cost(instance, p)});
  };
  rec(rec, 0, Frame{0.0, 0.0, 0.0, 0.0});
}

inline void check_limit(const Instance& instance, std::size_t limit) {
  if (instance.size() > limit)
    throw SizeLimitError("exact oracle: " + std::to_string(instance.size()) + " packets exceed the limit of " +
                         std::to_string(limit));
}

}  // namespace detail

/// OPT over all decision vectors. Among vectors within kTolerance of the
/// best cost, the one accepting earliest in sequence order wins.
inline ExactResult exact_opt(const Instance& instance, std::size_t limit = kDefaultOracleLimit) {
  detail::check_limit(instance, limit);
  ExactResult best;
  best.total = std::numeric_limits<double>::infinity();
  detail::enumerate_decisions(
      instance,
      [&](const std::vector<Decision>& d, double capacity, double left, double rejected) {
        const double cost = capacity + rejected;
        if (cost < best.total - kTolerance) {
          best.total = cost;
          best.capacity_cost = capacity;
          best.rejection_cost = rejected;
          best.decisions = d;
          best.initial_left = left;
        }
      },
      [](double) { return false; });
  return best;
}

/// OPT_M^R: cheapest rejection cost among vectors that fit in capacity M.
inline FixedCapacityResult exact_opt_fixed_capacity(const Instance& instance, double capacity,
                                                    std::size_t limit = kDefaultOracleLimit) {
  detail::check_limit(instance, limit);
  if (capacity < 0.0) throw std::invalid_argument("capacity must be non-negative");
  FixedCapacityResult best;
  best.rejection_cost = std::numeric_limits<double>::infinity();
  detail::enumerate_decisions(
      instance,
      [&](const std::vector<Decision>& d, double, double, double rejected) {
        if (rejected < best.rejection_cost - kTolerance) {
          best.rejection_cost = rejected;
          best.decisions = d;
        }
      },
      // the span of the prefix flow only grows along a branch
      [&](double span) { return span > capacity + kTolerance; });
  return best;
}

}  // namespace linkselect
