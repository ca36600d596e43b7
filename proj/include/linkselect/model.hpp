#pragma once

// Domain types for weighted packet selection on a rechargeable link, the
// instance text format, and the prefix-sum capacity computation.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace linkselect {

/// Feasibility tolerance shared by every comparison on accumulated sums.
inline constexpr double kTolerance = 1e-9;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based physical line number.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + ", line " + std::to_string(line)), line_(line) {}
  ParseError(const std::string& what) : Error(what), line_(0) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class SizeLimitError : public Error {
public:
  using Error::Error;
};

/// An internal guarantee of an algorithm did not hold.
class InvariantError : public Error {
public:
  using Error::Error;
};

enum class Direction { LeftToRight, RightToLeft };
enum class Decision { Accept, Reject };

inline Direction flip(Direction d) noexcept {
  return d == Direction::LeftToRight ? Direction::RightToLeft : Direction::LeftToRight;
}

/// +1 for packets draining the left end, -1 for packets draining the right end.
inline double flow_sign(Direction d) noexcept {
  return d == Direction::LeftToRight ? 1.0 : -1.0;
}

inline const char* to_string(Direction d) noexcept {
  return d == Direction::LeftToRight ? "->" : "<-";
}

inline char to_char(Decision d) noexcept { return d == Decision::Accept ? 'A' : 'R'; }

struct Packet {
  double weight = 0.0;
  Direction direction = Direction::LeftToRight;
  std::size_t index = 0;  // 1-based position in the owning instance

  friend bool operator==(const Packet&, const Packet&) = default;
};

/// Ordered packet sequence together with the rejection cost constants.
class Instance {
public:
  Instance() = default;

  Instance(double f, double m) : f_(f), m_(m) { check_costs(); }

  Instance(double f, double m, const std::vector<std::pair<Direction, double>>& packets)
      : Instance(f, m) {
    for (const auto& [dir, w] : packets) add(dir, w);
  }

  /// Appends a packet. Weights must be strictly positive.
  void add(Direction direction, double weight) {
    if (!(weight > 0.0) || !std::isfinite(weight))
      throw std::invalid_argument("packet weight must be positive and finite");
    packets_.push_back(Packet{weight, direction, packets_.size() + 1});
  }

  double f() const noexcept { return f_; }
  double m() const noexcept { return m_; }
  std::size_t size() const noexcept { return packets_.size(); }
  bool empty() const noexcept { return packets_.empty(); }
  const std::vector<Packet>& packets() const noexcept { return packets_; }
  const Packet& operator[](std::size_t i) const { return packets_[i]; }

  friend bool operator==(const Instance&, const Instance&) = default;

private:
  void check_costs() const {
    if (!(f_ >= 0.0) || !(m_ >= 0.0) || !std::isfinite(f_) || !std::isfinite(m_))
      throw std::invalid_argument("cost constants f and m must be non-negative");
  }

  double f_ = 0.0;
  double m_ = 0.0;
  std::vector<Packet> packets_;
};

struct CostBreakdown {
  double capacity_cost = 0.0;
  double rejection_cost = 0.0;
  double total = 0.0;

  static CostBreakdown of(double capacity, double rejection) {
    return CostBreakdown{capacity, rejection, capacity + rejection};
  }
};

/// Integral accept/reject decisions on a link of fixed total capacity.
struct DecisionSolution {
  double capacity = 0.0;
  double initial_left = 0.0;
  std::vector<Decision> decisions;
  CostBreakdown cost;

  std::string decision_string() const {
    std::string s;
    s.reserve(decisions.size());
    for (Decision d : decisions) s.push_back(to_char(d));
    return s;
  }
};

/// Cost f*x + m of declining a packet of weight x.
inline double rejection_cost(double f, double m, double weight) noexcept {
  return f * weight + m;
}

inline double rejection_cost(const Instance& instance, const Packet& packet) noexcept {
  return rejection_cost(instance.f(), instance.m(), packet.weight);
}

/// Sum of rejection costs over the rejected packets.
inline double total_rejection_cost(const Instance& instance, const std::vector<Decision>& decisions) {
  if (decisions.size() != instance.size())
    throw std::invalid_argument("decision vector length does not match instance");
  double sum = 0.0;
  for (std::size_t i = 0; i < decisions.size(); ++i)
    if (decisions[i] == Decision::Reject) sum += rejection_cost(instance, instance[i]);
  return sum;
}

struct CapacityRequirement {
  double capacity = 0.0;      // smallest total capacity that admits the decisions
  double initial_left = 0.0;  // the unique left-end start that achieves it
};

/// Smallest link capacity under which the accepted packets can all be forwarded.
///
/// With P_i the signed prefix flow of accepted packets (left-to-right positive),
/// the left end holds initial_left - P_i after step i. Feasibility on [0, M] for
/// every i gives M >= max P - min P, attained with initial_left = max P.
inline CapacityRequirement min_capacity_for_decisions(const Instance& instance,
                                                      const std::vector<Decision>& decisions) {
  if (decisions.size() != instance.size())
    throw std::invalid_argument("decision vector length does not match instance");
  double prefix = 0.0, hi = 0.0, lo = 0.0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i] != Decision::Accept) continue;
    prefix += flow_sign(instance[i].direction) * instance[i].weight;
    hi = std::max(hi, prefix);
    lo = std::min(lo, prefix);
  }
  return CapacityRequirement{hi - lo, hi};
}

/// Replays decisions from a starting split; true iff neither end ever goes
/// negative (within kTolerance).
inline bool replay_feasible(const Instance& instance, const std::vector<Decision>& decisions,
                            double capacity, double initial_left, double tol = kTolerance) {
  if (decisions.size() != instance.size()) return false;
  if (initial_left < -tol || initial_left > capacity + tol) return false;
  double left = initial_left;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i] != Decision::Accept) continue;
    left -= flow_sign(instance[i].direction) * instance[i].weight;
    if (left < -tol || capacity - left < -tol) return false;
  }
  return true;
}

/// Capacity needed to accept every packet.
inline double m_max(const Instance& instance) {
  return min_capacity_for_decisions(instance, std::vector<Decision>(instance.size(), Decision::Accept))
      .capacity;
}

inline double x_min(const Instance& instance) {
  if (instance.empty()) throw std::invalid_argument("x_min of an empty instance");
  double w = instance[0].weight;
  for (const auto& p : instance.packets()) w = std::min(w, p.weight);
  return w;
}

// ---------------------------------------------------------------------------
// Text formats

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::string_view strip_comment(std::string_view s) {
  const auto hash = s.find('#');
  return trim(hash == std::string_view::npos ? s : s.substr(0, hash));
}

/// Splits on runs of spaces/tabs.
inline std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const auto start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline bool is_unsigned_decimal(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  if (i == 0) return false;
  if (i == s.size()) return true;
  if (s[i] != '.') return false;
  const auto frac = ++i;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  return i == s.size() && i > frac;
}

/// Parses an unsigned decimal literal (digits with optional fraction).
/// Returns false on anything else.
inline bool parse_decimal(std::string_view s, double& out) {
  if (!is_unsigned_decimal(s)) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

/// Shortest fixed-notation decimal that parses back to the same double.
inline std::string format_decimal(double v) {
  char buf[512];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  if (ec != std::errc()) throw std::runtime_error("cannot format decimal");
  return std::string(buf, ptr);
}

/// Fixed 9-decimal rendering used by every report.
inline std::string fixed9(double v) {
  if (v == 0.0) v = 0.0;  // no "-0.000000000"
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

struct Line {
  std::size_t number;
  std::string_view text;  // comment-stripped, trimmed, non-empty
};

inline std::vector<Line> significant_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0, pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++number;
    auto body = strip_comment(text.substr(pos, nl - pos));
    if (!body.empty()) out.push_back(Line{number, body});
    pos = nl + 1;
  }
  return out;
}

inline double parse_cost_line(const std::vector<Line>& lines, std::size_t k, std::string_view key) {
  const std::string name(key);
  if (k >= lines.size()) throw ParseError("missing " + name + " line");
  const auto tok = tokens(lines[k].text);
  if (tok.empty() || tok[0] != key) throw ParseError("missing " + name + " line", lines[k].number);
  double v = 0.0;
  if (tok.size() != 2 || !parse_decimal(tok[1], v))
    throw ParseError("malformed " + name + " line", lines[k].number);
  return v;
}

}  // namespace detail

/// Parses the `wps v1` instance format.
inline Instance parse_instance(std::string_view text) {
  const auto lines = detail::significant_lines(text);
  if (lines.empty()) throw ParseError("malformed header", 1);
  {
    const auto tok = detail::tokens(lines[0].text);
    if (tok.size() != 2 || tok[0] != "wps" || tok[1] != "v1")
      throw ParseError("malformed header", lines[0].number);
  }
  const double f = detail::parse_cost_line(lines, 1, "f");
  const double m = detail::parse_cost_line(lines, 2, "m");
  Instance instance(f, m);
  for (std::size_t k = 3; k < lines.size(); ++k) {
    const auto& line = lines[k];
    const auto tok = detail::tokens(line.text);
    Direction dir;
    if (tok[0] == "->")
      dir = Direction::LeftToRight;
    else if (tok[0] == "<-")
      dir = Direction::RightToLeft;
    else
      throw ParseError("unknown direction token '" + std::string(tok[0]) + "'", line.number);
    if (tok.size() != 2) throw ParseError("malformed packet line", line.number);
    double w = 0.0;
    if (!tok[1].empty() && tok[1][0] == '-') throw ParseError("non-positive weight", line.number);
    if (!detail::parse_decimal(tok[1], w)) throw ParseError("malformed weight", line.number);
    if (!(w > 0.0)) throw ParseError("non-positive weight", line.number);
    instance.add(dir, w);
  }
  return instance;
}

inline Instance parse_instance(std::istream& in) {
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

inline std::string format_instance(const Instance& instance) {
  std::string out = "wps v1\n";
  out += "f " + detail::format_decimal(instance.f()) + "\n";
  out += "m " + detail::format_decimal(instance.m()) + "\n";
  for (const auto& p : instance.packets())
    out += std::string(to_string(p.direction)) + " " + detail::format_decimal(p.weight) + "\n";
  return out;
}

}  // namespace linkselect
