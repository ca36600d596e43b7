#pragma once

// Constant-factor rounding of the LP bound at a fixed capacity M.
//
// The link gets ARAT*M capacity: the LP traces keep M and the reserves R_L,
// R_R share sqrt(3)*M. A packet is accepted outright while its sender-side
// reserve stays above HIBU*M/2 afterwards; little-accepted packets are
// rejected otherwise. When an almost-accepted packet would push the reserve
// below that line, `divide` scans forward until the reserve recovers or runs
// dry, and `reject_big` drops the heaviest undecided packets of the window to
// pay for the deficit.
//
// Packets travelling right-to-left are handled by the same code with the
// roles of the two reserves exchanged.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linkselect/lp_bound.hpp"
#include "linkselect/model.hpp"

namespace linkselect {

/// Ratio and reserve-threshold constants. Every algorithm below is
/// parametric in (arat, hibu); the defaults satisfy arat * hibu / 2 = 1.
struct Constants {
  double arat = 1.0 + std::sqrt(3.0);
  double hibu = std::sqrt(3.0) - 1.0;

  /// y/x at or above this is almost-accepted.
  double little_threshold() const noexcept { return (1.0 + hibu) / arat; }
  /// Combined reserve as a multiple of M.
  double reserve_total() const noexcept { return 1.0 + hibu; }
};

enum class PacketClass { Little, Almost, Full };
enum class Phase { Balanced, Left, Right };

inline const char* to_string(PacketClass c) noexcept {
  switch (c) {
    case PacketClass::Little: return "little";
    case PacketClass::Almost: return "almost";
    case PacketClass::Full: return "full";
  }
  return "?";
}

inline const char* to_string(Phase p) noexcept {
  switch (p) {
    case Phase::Balanced: return "balanced";
    case Phase::Left: return "left";
    case Phase::Right: return "right";
  }
  return "?";
}

inline PacketClass classify(double y, double x, const Constants& k = {}) {
  if (!(x > 0.0) || y < -kTolerance || y > x + kTolerance)
    throw std::invalid_argument("classify: need 0 <= y <= x and x > 0");
  if (y >= x - kTolerance) return PacketClass::Full;
  if (y / x >= k.little_threshold() - kTolerance) return PacketClass::Almost;
  return PacketClass::Little;
}

inline Phase phase_of(double reserve_left, double reserve_right, double capacity, const Constants& k = {}) {
  const double line = k.hibu * capacity / 2.0;
  if (reserve_left < line - kTolerance) return Phase::Left;
  if (reserve_right < line - kTolerance) return Phase::Right;
  return Phase::Balanced;
}

/// Sets produced by one forward scan. Indices are 0-based positions.
struct WindowResult {
  std::vector<std::size_t> accept_set;  // opposite-direction packets
  std::vector<std::size_t> reject_set;  // same-direction little-accepted packets
  std::vector<std::size_t> undecided;   // same-direction almost/fully accepted packets
  double reserve_after = 0.0;
  std::size_t end = 0;  // last position scanned
};

/// Forward scan starting at almost-accepted packet `start`. `reserve` is the
/// sender-side reserve of that packet before it is processed.
inline WindowResult divide(const Instance& instance, double capacity, const FractionalSolution& frac,
                           double reserve, std::size_t start, const Constants& k = {}) {
  const auto t = instance.size();
  if (start >= t) throw std::invalid_argument("divide: start index out of range");
  const auto& first = instance[start];
  if (classify(frac.y[start], first.weight, k) == PacketClass::Little)
    throw std::invalid_argument("divide: start packet is little-accepted");

  const double line = k.hibu * capacity / 2.0;
  WindowResult w;
  double r = reserve - (first.weight - frac.y[start]);
  w.undecided.push_back(start);
  std::size_t j = start;
  while (r >= -kTolerance && r < line - kTolerance && j + 1 < t) {
    ++j;
    const auto& p = instance[j];
    const double y = frac.y[j];
    if (p.direction == first.direction) {
      if (classify(y, p.weight, k) != PacketClass::Little) {
        r -= p.weight - y;
        w.undecided.push_back(j);
      } else {
        r += y;
        w.reject_set.push_back(j);
      }
    } else {
      r += p.weight - y;
      w.accept_set.push_back(j);
    }
  }
  w.reserve_after = r;
  w.end = j;
  return w;
}

struct RejectBigResult {
  std::vector<std::size_t> rejected;  // in removal order
  double reserve = 0.0;
};

/// Moves the heaviest packets of `undecided` (ties: lower index first) into
/// the rejected set until the reserve is back at HIBU*M/2. Fully accepted
/// packets are never chosen.
inline RejectBigResult reject_big(const Instance& instance, const FractionalSolution& frac,
                                  const std::vector<std::size_t>& undecided, double reserve, double capacity,
                                  const Constants& k = {}) {
  std::vector<std::size_t> order;
  for (auto i : undecided)
    if (classify(frac.y[i], instance[i].weight, k) != PacketClass::Full) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (instance[a].weight != instance[b].weight) return instance[a].weight > instance[b].weight;
    return a < b;
  });

  const double line = k.hibu * capacity / 2.0;
  RejectBigResult out;
  out.reserve = reserve;
  for (auto i : order) {
    if (out.reserve >= line - kTolerance) break;
    out.rejected.push_back(i);
    out.reserve += instance[i].weight;
  }
  if (out.reserve < line - kTolerance)
    throw InvariantError("reject_big: undecided set exhausted before the reserve recovered");
  return out;
}

struct TraceRow {
  std::size_t step = 0;  // 1-based position in the instance
  Direction direction = Direction::LeftToRight;
  double weight = 0.0;
  double y = 0.0;
  PacketClass packet_class = PacketClass::Little;
  Phase phase_before = Phase::Balanced;
  Phase phase = Phase::Balanced;
  Decision decision = Decision::Accept;
  double reserve_left = 0.0;
  double reserve_right = 0.0;
  std::size_t window_id = 0;  // 0 outside windows
};

struct WindowRecord {
  std::size_t id = 0;
  std::size_t start = 0;  // 0-based
  std::size_t end = 0;
  Direction direction = Direction::LeftToRight;
  std::vector<std::size_t> accept_set;
  std::vector<std::size_t> reject_set;
  std::vector<std::size_t> undecided;
  std::vector<std::size_t> undecided_rejected;
  double reserve_before = 0.0;
  double reserve_divide = 0.0;  // value returned by the scan
  double reserve_after = 0.0;   // after pruning
  std::size_t guard_moves = 0;  // extra packets dropped by the prefix re-check
  double lp_cost_undecided = 0.0;
  double rejection_cost_dropped = 0.0;
};

struct ApproxRun {
  DecisionSolution solution;
  std::vector<TraceRow> trace;
  std::vector<WindowRecord> windows;
  double reserve_left0 = 0.0;
  double reserve_right0 = 0.0;
  std::size_t guard_events = 0;
};

/// Runs the rounding at capacity M. All packets must fit; `forced_cost` is
/// added to the rejection cost (packets removed by preprocessing).
inline ApproxRun run_approx(const Instance& instance, double capacity, const FractionalSolution& frac,
                            double forced_cost = 0.0, const Constants& k = {}) {
  const auto t = instance.size();
  if (frac.y.size() != t || frac.left_trace.size() != t + 1)
    throw std::invalid_argument("fractional solution does not match instance");
  detail::check_fits(instance, capacity);

  const double total = k.reserve_total() * capacity;
  const double line = k.hibu * capacity / 2.0;
  const auto side = [](Direction d) { return d == Direction::LeftToRight ? 0 : 1; };

  ApproxRun run;
  run.reserve_left0 = run.reserve_right0 = total / 2.0;
  double reserve[2] = {total / 2.0, total / 2.0};
  std::vector<Decision> decisions(t, Decision::Reject);

  auto classes = std::vector<PacketClass>(t);
  for (std::size_t i = 0; i < t; ++i) classes[i] = classify(frac.y[i], instance[i].weight, k);

  auto push_row = [&](std::size_t i, Phase before, std::size_t window) {
    run.trace.push_back(TraceRow{i + 1, instance[i].direction, instance[i].weight, frac.y[i], classes[i], before,
                                 phase_of(reserve[0], reserve[1], capacity, k), decisions[i], reserve[0], reserve[1],
                                 window});
  };

  // applies a decided packet to a reserve pair
  auto apply = [&](double (&r)[2], std::size_t i) {
    const auto& p = instance[i];
    const int own = side(p.direction), other = 1 - own;
    if (decisions[i] == Decision::Accept) {
      r[own] -= p.weight - frac.y[i];
      r[other] += p.weight - frac.y[i];
    } else {
      r[own] += frac.y[i];
      r[other] -= frac.y[i];
    }
  };

  std::size_t i = 0;
  while (i < t) {
    const auto& p = instance[i];
    const int own = side(p.direction);
    const double missing = p.weight - frac.y[i];
    const Phase before = phase_of(reserve[0], reserve[1], capacity, k);

    if (reserve[own] - missing >= line - kTolerance) {
      decisions[i] = Decision::Accept;
      apply(reserve, i);
      push_row(i, before, 0);
      ++i;
      continue;
    }
    if (classes[i] == PacketClass::Little) {
      decisions[i] = Decision::Reject;
      apply(reserve, i);
      push_row(i, before, 0);
      ++i;
      continue;
    }

    WindowRecord rec;
    rec.id = run.windows.size() + 1;
    rec.start = i;
    rec.direction = p.direction;
    rec.reserve_before = reserve[own];
    const auto w = divide(instance, capacity, frac, reserve[own], i, k);
    rec.end = w.end;
    rec.accept_set = w.accept_set;
    rec.reject_set = w.reject_set;
    rec.undecided = w.undecided;
    rec.reserve_divide = w.reserve_after;
    if (w.reserve_after < -kTolerance)
      rec.undecided_rejected = reject_big(instance, frac, w.undecided, w.reserve_after, capacity, k).rejected;

    // Pruning raises every later prefix of the scan, so the re-check below
    // only fires on numerical noise; it keeps the replay total regardless.
    for (;;) {
      for (auto a : w.accept_set) decisions[a] = Decision::Accept;
      for (auto r : w.reject_set) decisions[r] = Decision::Reject;
      for (auto u : w.undecided) decisions[u] = Decision::Accept;
      for (auto u : rec.undecided_rejected) decisions[u] = Decision::Reject;

      double sim[2] = {reserve[0], reserve[1]};
      bool own_dry = false;
      for (std::size_t s = i; s <= w.end; ++s) {
        apply(sim, s);
        if (sim[own] < -kTolerance) own_dry = true;
        if (sim[1 - own] < -kTolerance) {
          std::ostringstream msg;
          msg << "approx: opposite reserve negative inside window " << rec.id << " at step " << (s + 1)
              << " (R_L=" << sim[0] << ", R_R=" << sim[1] << ")";
          throw InvariantError(msg.str());
        }
      }
      if (!own_dry) break;

      std::size_t best = t;
      for (auto u : w.undecided) {
        if (decisions[u] == Decision::Reject || classes[u] == PacketClass::Full) continue;
        if (best == t || instance[u].weight > instance[best].weight) best = u;
      }
      if (best == t) throw InvariantError("approx: window prefix infeasible and nothing left to drop");
      rec.undecided_rejected.push_back(best);
      ++rec.guard_moves;
      ++run.guard_events;
    }

    for (std::size_t s = i; s <= w.end; ++s) {
      const Phase b = phase_of(reserve[0], reserve[1], capacity, k);
      apply(reserve, s);
      push_row(s, b, rec.id);
    }
    // re-anchor on the exact sum to keep R_L + R_R = (1 + hibu) M
    reserve[1 - own] = total - reserve[own];
    rec.reserve_after = reserve[own];

    const double f = instance.f(), m = instance.m();
    for (auto u : rec.undecided) {
      const double declined = instance[u].weight - frac.y[u];
      rec.lp_cost_undecided += f * declined + m * declined / instance[u].weight;
    }
    for (auto u : rec.undecided_rejected) rec.rejection_cost_dropped += rejection_cost(instance, instance[u]);
    run.windows.push_back(std::move(rec));
    i = w.end + 1;
  }

  run.solution.capacity = k.arat * capacity;
  run.solution.initial_left = frac.left_trace[0] + run.reserve_left0;
  run.solution.decisions = std::move(decisions);
  run.solution.cost =
      CostBreakdown::of(k.arat * capacity, total_rejection_cost(instance, run.solution.decisions) + forced_cost);
  return run;
}

/// Step trace as CSV: `step,dir,weight,y,class,phase,decision,RL,RR,window_id`.
/// `original` optionally maps 1-based steps to positions in a larger instance.
inline std::string approx_trace_csv(const ApproxRun& run, const std::vector<std::size_t>* original = nullptr) {
  std::ostringstream out;
  out << "step,dir,weight,y,class,phase,decision,RL,RR,window_id\n";
  for (const auto& r : run.trace) {
    const auto step = original ? (*original)[r.step - 1] + 1 : r.step;
    out << step << ',' << to_string(r.direction) << ',' << detail::fixed9(r.weight) << ',' << detail::fixed9(r.y)
        << ',' << to_string(r.packet_class) << ',' << to_string(r.phase) << ',' << to_char(r.decision) << ','
        << detail::fixed9(r.reserve_left) << ',' << detail::fixed9(r.reserve_right) << ',' << r.window_id << '\n';
  }
  return out.str();
}

}  // namespace linkselect
