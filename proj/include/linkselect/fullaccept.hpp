#pragma once

// Rounding of a fractional solution on a link of capacity 2M.
//
// The LP traces keep their own M; a second budget of M is split into the
// reserves R_L and R_R. An accepted packet takes y_i from the trace and the
// missing x_i - y_i from its sender-side reserve. A rejected packet hands
// back the y_i the trace already moved, drawing it from the receiver-side
// reserve. Packets with y_i = x_i always pass.

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linkselect/lp_bound.hpp"
#include "linkselect/model.hpp"

namespace linkselect {

enum class AcceptFullVariant {
  GreedyLeft,  // accept whenever the sender reserve covers x_i - y_i
  LazyRight,   // reject whenever the receiver reserve covers y_i, except Full packets
};

struct ReserveTrace {
  std::vector<double> reserve_left;   // R_L,0..t
  std::vector<double> reserve_right;  // R_R,0..t
  std::vector<Decision> decisions;
};

inline ReserveTrace run_accept_full(const Instance& instance, double capacity, const FractionalSolution& frac,
                                    double reserve_left0, double reserve_right0,
                                    AcceptFullVariant variant = AcceptFullVariant::GreedyLeft) {
  const auto t = instance.size();
  if (frac.y.size() != t) throw std::invalid_argument("fractional solution does not match instance");
  if (reserve_left0 < -kTolerance || reserve_right0 < -kTolerance ||
      std::abs(reserve_left0 + reserve_right0 - capacity) > 1e-7)
    throw std::invalid_argument("initial reserves must be non-negative and sum to the capacity");
  detail::check_fits(instance, capacity);

  ReserveTrace trace;
  trace.reserve_left.reserve(t + 1);
  trace.reserve_right.reserve(t + 1);
  trace.decisions.reserve(t);
  double left = reserve_left0, right = reserve_right0;
  trace.reserve_left.push_back(left);
  trace.reserve_right.push_back(right);

  for (std::size_t i = 0; i < t; ++i) {
    const auto& p = instance[i];
    const double y = frac.y[i];
    const double missing = p.weight - y;
    const bool ltr = p.direction == Direction::LeftToRight;
    double& sender = ltr ? left : right;
    double& receiver = ltr ? right : left;

    bool accept;
    if (variant == AcceptFullVariant::GreedyLeft) {
      accept = sender >= missing - kTolerance;
    } else {
      accept = missing <= kTolerance || receiver < y - kTolerance;
    }

    if (accept) {
      sender -= missing;
      receiver += missing;
      trace.decisions.push_back(Decision::Accept);
    } else {
      sender += y;
      receiver -= y;
      trace.decisions.push_back(Decision::Reject);
    }
    trace.reserve_left.push_back(left);
    trace.reserve_right.push_back(right);
  }
  return trace;
}

/// Debug export: `step,direction,weight,y,decision,RL,RR`.
inline std::string reserve_trace_csv(const Instance& instance, const FractionalSolution& frac,
                                     const ReserveTrace& trace) {
  std::ostringstream out;
  out << "step,direction,weight,y,decision,RL,RR\n";
  for (std::size_t i = 0; i < trace.decisions.size(); ++i) {
    out << (i + 1) << ',' << to_string(instance[i].direction) << ',' << detail::fixed9(instance[i].weight) << ','
        << detail::fixed9(frac.y[i]) << ',' << to_char(trace.decisions[i]) << ','
        << detail::fixed9(trace.reserve_left[i + 1]) << ',' << detail::fixed9(trace.reserve_right[i + 1]) << '\n';
  }
  return out.str();
}

}  // namespace linkselect
