#pragma once

// Subset-sum reduction: items become left-to-right packets, the target a
// final right-to-left packet, with f = 3/4 and m = 0. A subset summing to the
// target exists exactly when the optimum reaches the threshold.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "linkselect/model.hpp"
#include "linkselect/oracle.hpp"

namespace linkselect {

struct SubsetSumInstance {
  std::vector<std::int64_t> items;
  std::int64_t target = 1;
};

struct ReductionOutput {
  Instance wps{0.75, 0.0};
  double threshold = 0.0;
};

inline void validate(const SubsetSumInstance& ss) {
  if (ss.target < 1) throw std::invalid_argument("subset-sum target must be >= 1");
  for (auto v : ss.items)
    if (v < 1) throw std::invalid_argument("subset-sum items must be >= 1");
}

inline ReductionOutput reduce(const SubsetSumInstance& ss) {
  validate(ss);
  ReductionOutput out;
  std::int64_t sum = 0;
  for (auto v : ss.items) {
    out.wps.add(Direction::LeftToRight, static_cast<double>(v));
    sum += v;
  }
  out.wps.add(Direction::RightToLeft, static_cast<double>(ss.target));
  out.threshold = static_cast<double>(ss.target) / 4.0 + 0.75 * static_cast<double>(sum);
  return out;
}

/// Bit mask of a subset of items summing to the target, found by plain
/// enumeration (lowest mask first).
inline std::optional<std::uint64_t> find_subset(const SubsetSumInstance& ss) {
  const auto n = ss.items.size();
  if (n >= 63) throw SizeLimitError("subset enumeration limited to 62 items");
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::int64_t s = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (mask >> j & 1U) s += ss.items[j];
    if (s == ss.target) return mask;
  }
  return std::nullopt;
}

/// The solution accepting the chosen items and the final packet, on a link
/// of capacity S whose left end starts full.
inline DecisionSolution witness_solution(const SubsetSumInstance& ss, std::uint64_t mask) {
  const auto red = reduce(ss);
  DecisionSolution sol;
  sol.decisions.assign(red.wps.size(), Decision::Reject);
  for (std::size_t j = 0; j < ss.items.size(); ++j)
    if (mask >> j & 1U) sol.decisions[j] = Decision::Accept;
  sol.decisions.back() = Decision::Accept;
  sol.capacity = static_cast<double>(ss.target);
  sol.initial_left = sol.capacity;
  sol.cost = CostBreakdown::of(sol.capacity, total_rejection_cost(red.wps, sol.decisions));
  return sol;
}

struct VerificationResult {
  bool equivalent = false;
  double opt = 0.0;
  bool subset_exists = false;
  double threshold = 0.0;
  double accepted_item_sum = 0.0;  // A for the oracle's optimum
  double gap = 0.0;                // min(max(S-A,0), 3S/4) - (S-A)/4
};

inline VerificationResult verify_reduction(const SubsetSumInstance& ss, std::size_t limit = kDefaultOracleLimit) {
  const auto red = reduce(ss);
  detail::check_limit(red.wps, limit);
  VerificationResult out;
  out.threshold = red.threshold;
  out.subset_exists = find_subset(ss).has_value();
  const auto best = exact_opt(red.wps, limit);
  out.opt = best.total;
  for (std::size_t j = 0; j < ss.items.size(); ++j)
    if (best.decisions[j] == Decision::Accept) out.accepted_item_sum += static_cast<double>(ss.items[j]);
  const double s = static_cast<double>(ss.target), a = out.accepted_item_sum;
  out.gap = std::min(std::max(s - a, 0.0), 0.75 * s) - 0.25 * (s - a);
  out.equivalent = (out.opt <= out.threshold + kTolerance) == out.subset_exists;
  return out;
}

}  // namespace linkselect
