#pragma once

// Two generalisations beyond a single isolated link.
//
// Cyclic redistribution: capacity may be moved between the link's ends
// through a cycle elsewhere in the network at cost C(f + m/M) per unit. Two
// non-negative variables per step carry the shift in each direction; the
// shift happens before the step's packet.
//
// Few long packets: a packet routed over several links must be accepted or
// rejected on all of them, so every subset of long packets is tried.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linkselect/approx.hpp"
#include "linkselect/lp_bound.hpp"
#include "linkselect/model.hpp"
#include "linkselect/parallel.hpp"
#include "linkselect/search.hpp"
#include "linkselect/simplex.hpp"

namespace linkselect {

struct CyclicParams {
  double c = 1.0;
};

inline void validate(const CyclicParams& p) {
  if (!(p.c >= 1.0) || !std::isfinite(p.c)) throw std::invalid_argument("cyclic cost multiplier C must be >= 1");
}

/// Column layout: y_1..y_t, S_L,0, then (to_left_i, to_right_i) for each step.
inline lp::Problem build_cyclic_lp(const Instance& instance, double capacity, const CyclicParams& params) {
  validate(params);
  const auto t = instance.size();
  if (t > 0 && !(capacity > 0.0)) throw std::invalid_argument("cyclic LP needs M > 0");
  detail::check_fits(instance, capacity);
  lp::Problem prob;
  double offset = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    const auto& p = instance[i];
    prob.add_variable(0.0, p.weight, -unit_rejection_rate(instance, p), "y" + std::to_string(i + 1));
    offset += rejection_cost(instance, p);
  }
  prob.objective_offset = offset;
  const auto s0 = prob.add_variable(0.0, capacity, 0.0, "SL0");
  const double shift_rate = t > 0 ? params.c * (instance.f() + instance.m() / capacity) : 0.0;
  std::vector<std::size_t> to_left(t), to_right(t);
  for (std::size_t i = 0; i < t; ++i) {
    to_left[i] = prob.add_variable(0.0, capacity, shift_rate, "oRL" + std::to_string(i + 1));
    to_right[i] = prob.add_variable(0.0, capacity, shift_rate, "oLR" + std::to_string(i + 1));
  }
  // the left end right after the shift of step i (before its packet) and
  // right after the packet must both stay within [0, M]
  for (std::size_t i = 1; i <= t; ++i) {
    for (std::size_t upto : {i - 1, i}) {
      for (auto rel : {lp::Relation::GreaterEqual, lp::Relation::LessEqual}) {
        auto& c = prob.add_constraint(rel, rel == lp::Relation::GreaterEqual ? 0.0 : capacity);
        c.coefficients[s0] = 1.0;
        for (std::size_t k = 0; k < upto; ++k) c.coefficients[k] = -flow_sign(instance[k].direction);
        for (std::size_t k = 0; k < i; ++k) {
          c.coefficients[to_left[k]] = 1.0;
          c.coefficients[to_right[k]] = -1.0;
        }
      }
    }
  }
  return prob;
}

struct CyclicSolution {
  double capacity = 0.0;
  std::vector<double> y;
  std::vector<double> shift_to_left;   // moved right -> left before step i
  std::vector<double> shift_to_right;  // moved left -> right before step i
  std::vector<double> left_trace;      // S_L,0..t after each step
  double shift_cost = 0.0;
  double objective = 0.0;

  /// The acceptance amounts as a plain fractional solution (traces rebuilt
  /// without shifts).
  FractionalSolution as_fractional(const Instance& instance) const {
    return make_fractional(instance, capacity, y, left_trace.empty() ? 0.0 : left_trace[0]);
  }
};

inline CyclicSolution solve_cyclic_lp(const Instance& instance, double capacity, const CyclicParams& params) {
  const auto prob = build_cyclic_lp(instance, capacity, params);
  const auto t = instance.size();
  const auto res = lp::solve(prob, lexicographic_acceptance(t, prob.variable_count()));
  if (res.status != lp::Status::Optimal) throw InvariantError("cyclic LP reported infeasible although zero is feasible");
  CyclicSolution sol;
  sol.capacity = capacity;
  const auto snap = [](double v, double hi) {
    v = std::clamp(v, 0.0, hi);
    if (v <= kTolerance) v = 0.0;
    if (hi - v <= kTolerance) v = hi;
    return v;
  };
  for (std::size_t i = 0; i < t; ++i) sol.y.push_back(snap(res.x[i], instance[i].weight));
  for (std::size_t i = 0; i < t; ++i) {
    sol.shift_to_left.push_back(snap(res.x[t + 1 + 2 * i], capacity));
    sol.shift_to_right.push_back(snap(res.x[t + 2 + 2 * i], capacity));
  }
  double left = std::clamp(res.x[t], 0.0, capacity);
  sol.left_trace.push_back(left);
  for (std::size_t i = 0; i < t; ++i) {
    left += sol.shift_to_left[i] - sol.shift_to_right[i] - flow_sign(instance[i].direction) * sol.y[i];
    sol.left_trace.push_back(left);
    sol.shift_cost += prob.objective[t + 1 + 2 * i] * (sol.shift_to_left[i] + sol.shift_to_right[i]);
  }
  sol.objective = fractional_cost(instance, sol.y) + sol.shift_cost;
  return sol;
}

/// Outcome of the epoch rounding. It is a heuristic: no ratio is claimed.
struct EpochResult {
  DecisionSolution solution;
  bool heuristic = true;
  ApproxRun run;
  double buffer_capacity = 0.0;          // extra capacity added on top of the approx reserves
  std::size_t redistributions = 0;
  double redistribution_cost = 0.0;
  std::vector<std::size_t> epoch_boundaries;  // 0-based steps closing an epoch

  double total() const { return solution.cost.total + redistribution_cost; }
};

/// Rounds a cyclic LP solution. Decisions come from the approx rounding of
/// the acceptance amounts. When any shift is used, each end gets an extra
/// buffer of M/(1+sqrt 3); shifted volume accumulates per epoch, and each time
/// it passes M/(1+sqrt 3) one redistribution of cost C(f M + m) is charged and
/// a new epoch starts.
inline EpochResult epoch_heuristic(const Instance& instance, double capacity, const CyclicSolution& cyclic,
                                   const CyclicParams& params, const Constants& k = {}) {
  validate(params);
  const auto t = instance.size();
  if (cyclic.y.size() != t || cyclic.shift_to_left.size() != t || cyclic.shift_to_right.size() != t)
    throw std::invalid_argument("cyclic solution does not match instance");
  EpochResult out;
  out.run = run_approx(instance, capacity, cyclic.as_fractional(instance), 0.0, k);
  out.solution = out.run.solution;

  const double epoch_limit = capacity / k.arat;
  bool shifted = false;
  double epoch_sum = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    const double moved = cyclic.shift_to_left[i] + cyclic.shift_to_right[i];
    if (moved > kTolerance) shifted = true;
    epoch_sum += moved;
    if (epoch_sum > epoch_limit + kTolerance) {
      ++out.redistributions;
      out.epoch_boundaries.push_back(i);
      epoch_sum = 0.0;
    }
  }
  out.redistribution_cost =
      static_cast<double>(out.redistributions) * params.c * (instance.f() * capacity + instance.m());
  if (shifted) {
    out.buffer_capacity = 2.0 * epoch_limit;
    out.solution.capacity += out.buffer_capacity;
    out.solution.initial_left += epoch_limit;
    out.solution.cost = CostBreakdown::of(out.solution.capacity, out.solution.cost.rejection_cost);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Networks

struct Hop {
  std::string link;
  Direction direction = Direction::LeftToRight;  // fwd
};

struct NetworkPacket {
  double weight = 0.0;
  std::vector<Hop> path;

  bool is_long() const noexcept { return path.size() > 1; }
};

struct NetworkInstance {
  double f = 0.0;
  double m = 0.0;
  std::vector<std::string> links;  // declaration order
  std::vector<NetworkPacket> packets;

  std::vector<std::size_t> long_packets() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < packets.size(); ++i)
      if (packets[i].is_long()) out.push_back(i);
    return out;
  }

  /// Packets crossing a link, in global order.
  std::vector<std::size_t> packets_on(const std::string& link) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < packets.size(); ++i)
      for (const auto& h : packets[i].path)
        if (h.link == link) out.push_back(i);
    return out;
  }

  Direction direction_on(std::size_t packet, const std::string& link) const {
    for (const auto& h : packets[packet].path)
      if (h.link == link) return h.direction;
    throw std::invalid_argument("packet does not cross link " + link);
  }
};

/// Parses the `wpsnet v1` format: header, f, m, `link <id>` lines, then
/// `packet <weight> <id:fwd|rev>[,<id:fwd|rev>...]` lines.
inline NetworkInstance parse_network(std::string_view text) {
  const auto lines = detail::significant_lines(text);
  if (lines.empty()) throw ParseError("malformed header", 1);
  {
    const auto tok = detail::tokens(lines[0].text);
    if (tok.size() != 2 || tok[0] != "wpsnet" || tok[1] != "v1")
      throw ParseError("malformed header", lines[0].number);
  }
  NetworkInstance net;
  net.f = detail::parse_cost_line(lines, 1, "f");
  net.m = detail::parse_cost_line(lines, 2, "m");
  std::set<std::string, std::less<>> known;
  for (std::size_t k = 3; k < lines.size(); ++k) {
    const auto& line = lines[k];
    const auto tok = detail::tokens(line.text);
    if (tok[0] == "link") {
      if (tok.size() != 2) throw ParseError("malformed link line", line.number);
      if (!net.packets.empty()) throw ParseError("link declared after packets", line.number);
      std::string id(tok[1]);
      if (!known.insert(id).second) throw ParseError("duplicate link '" + id + "'", line.number);
      net.links.push_back(std::move(id));
    } else if (tok[0] == "packet") {
      if (tok.size() != 3) throw ParseError("malformed packet line", line.number);
      NetworkPacket p;
      if (!tok[1].empty() && tok[1][0] == '-') throw ParseError("non-positive weight", line.number);
      if (!detail::parse_decimal(tok[1], p.weight)) throw ParseError("malformed weight", line.number);
      if (!(p.weight > 0.0)) throw ParseError("non-positive weight", line.number);
      std::string_view rest = tok[2];
      std::set<std::string, std::less<>> seen;
      for (;;) {
        const auto comma = rest.find(',');
        const auto hop = rest.substr(0, comma);
        const auto colon = hop.rfind(':');
        if (colon == std::string_view::npos || colon == 0) throw ParseError("malformed hop", line.number);
        Hop h;
        h.link = std::string(hop.substr(0, colon));
        const auto dir = hop.substr(colon + 1);
        if (dir == "fwd")
          h.direction = Direction::LeftToRight;
        else if (dir == "rev")
          h.direction = Direction::RightToLeft;
        else
          throw ParseError("unknown hop direction '" + std::string(dir) + "'", line.number);
        if (!known.count(h.link)) throw ParseError("unknown link '" + h.link + "'", line.number);
        if (!seen.insert(h.link).second) throw ParseError("path repeats link '" + h.link + "'", line.number);
        p.path.push_back(std::move(h));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
      net.packets.push_back(std::move(p));
    } else {
      throw ParseError("unknown line '" + std::string(tok[0]) + "'", line.number);
    }
  }
  return net;
}

inline NetworkInstance parse_network(std::istream& in) {
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

inline std::string format_network(const NetworkInstance& net) {
  std::string out = "wpsnet v1\n";
  out += "f " + detail::format_decimal(net.f) + "\n";
  out += "m " + detail::format_decimal(net.m) + "\n";
  for (const auto& l : net.links) out += "link " + l + "\n";
  for (const auto& p : net.packets) {
    out += "packet " + detail::format_decimal(p.weight) + " ";
    for (std::size_t h = 0; h < p.path.size(); ++h) {
      if (h) out += ",";
      out += p.path[h].link + (p.path[h].direction == Direction::LeftToRight ? ":fwd" : ":rev");
    }
    out += "\n";
  }
  return out;
}

inline constexpr std::size_t kDefaultLongLimit = 16;

struct LinkReport {
  std::string link;
  std::vector<std::size_t> packets;  // global packet indices, in order
  Instance instance{0.0, 0.0};       // the link's single-link instance
  DecisionSolution solution;         // decisions over `instance`
};

struct NetworkResult {
  std::vector<LinkReport> per_link;  // link declaration order
  std::vector<std::size_t> accepted_long;
  double long_rejection_cost = 0.0;  // rejected long packets, charged once each
  double total = 0.0;
  std::size_t subsets_evaluated = 0;
};

namespace detail {

inline NetworkResult evaluate_long_subset(const NetworkInstance& net, const std::vector<std::size_t>& longs,
                                          std::uint64_t mask, double epsilon) {
  std::vector<int> state(net.packets.size(), 0);  // 0 short, 1 accepted long, -1 rejected long
  NetworkResult out;
  for (std::size_t b = 0; b < longs.size(); ++b) {
    if (mask >> b & 1U) {
      state[longs[b]] = 1;
      out.accepted_long.push_back(longs[b]);
    } else {
      state[longs[b]] = -1;
      out.long_rejection_cost += rejection_cost(net.f, net.m, net.packets[longs[b]].weight);
    }
  }
  out.total = out.long_rejection_cost;
  for (const auto& link : net.links) {
    LinkReport rep;
    rep.link = link;
    rep.packets = net.packets_on(link);
    rep.instance = Instance(net.f, net.m);
    Instance carried(net.f, net.m);
    std::vector<std::size_t> carried_pos;
    PinnedSet pinned;
    bool any_pinned = false;
    for (std::size_t k = 0; k < rep.packets.size(); ++k) {
      const auto g = rep.packets[k];
      const auto dir = net.direction_on(g, link);
      rep.instance.add(dir, net.packets[g].weight);
      if (state[g] == -1) continue;
      carried.add(dir, net.packets[g].weight);
      carried_pos.push_back(k);
      pinned.push_back(state[g] == 1);
      any_pinned = any_pinned || state[g] == 1;
    }
    SolveOptions opts;
    opts.epsilon = epsilon;
    if (any_pinned) opts.pinned = pinned;
    const auto res = solve(carried, opts);
    rep.solution = res.best;
    rep.solution.decisions.assign(rep.packets.size(), Decision::Reject);
    for (std::size_t c = 0; c < carried_pos.size(); ++c) rep.solution.decisions[carried_pos[c]] = res.best.decisions[c];
    out.total += rep.solution.cost.total;
    out.per_link.push_back(std::move(rep));
  }
  return out;
}

}  // namespace detail

/// Tries every subset of long packets: accepted ones are pinned in full on
/// each link they cross, rejected ones are removed and charged once. Each
/// link is then solved on its own. The cheapest subset wins; ties go to the
/// lower subset index (bit b = b-th long packet accepted).
inline NetworkResult solve_network_few_long(const NetworkInstance& net, double epsilon,
                                            std::size_t long_limit = kDefaultLongLimit, std::size_t threads = 1) {
  const auto longs = net.long_packets();
  if (longs.size() > long_limit || longs.size() >= 63)
    throw SizeLimitError("network: " + std::to_string(longs.size()) + " long packets exceed the limit of " +
                         std::to_string(long_limit));
  const auto subsets = std::size_t{1} << longs.size();
  std::vector<NetworkResult> results(subsets);
  parallel_for(subsets, threads, [&](std::size_t s) {
    results[s] = detail::evaluate_long_subset(net, longs, static_cast<std::uint64_t>(s), epsilon);
  });
  std::size_t best = 0;
  for (std::size_t s = 1; s < subsets; ++s)
    if (results[s].total < results[best].total - kTolerance) best = s;
  auto out = std::move(results[best]);
  out.subsets_evaluated = subsets;
  return out;
}

}  // namespace linkselect
