#pragma once

// Instance generators and the empirical approximation-ratio experiment.
//
// Randomness comes from SplitMix64 (Steele, Lea & Flood 2014): the state is a
// 64-bit counter advanced by 0x9E3779B97F4A7C15 and each output is a fixed
// avalanche mix of the counter. Seeding is "state = seed". Uniform integers
// use rejection on the top of the 64-bit range, uniform reals use the top 53
// bits. None of this touches <random> distributions, whose outputs differ
// between standard libraries, so a seed yields the same instance everywhere.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "linkselect/model.hpp"
#include "linkselect/oracle.hpp"
#include "linkselect/parallel.hpp"
#include "linkselect/search.hpp"

namespace linkselect {

class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Independent stream derived from this one's next output.
  SplitMix64 split() noexcept { return SplitMix64(next()); }

  /// Uniform in [0, 1).
  double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t v;
    do v = next();
    while (v >= limit);
    return lo + static_cast<std::int64_t>(v % span);
  }

  double uniform_real(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

private:
  std::uint64_t state_;
};

struct UniformInt {
  std::int64_t lo = 1, hi = 20;
};
struct UniformReal {
  double lo = 0.5, hi = 10.0;
};
/// Bounded Pareto density proportional to w^-(alpha+1) on [lo, hi].
struct PowerLaw {
  double alpha = 1.5, lo = 1.0, hi = 100.0;
};

using WeightDistribution = std::variant<UniformInt, UniformReal, PowerLaw>;

struct GeneratorConfig {
  std::size_t t = 10;
  WeightDistribution weights = UniformInt{};
  double p_right = 0.5;  // probability that a packet travels left to right
  double f = 1.0;
  double m = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline void validate(const GeneratorConfig& c) {
  if (!(c.p_right >= 0.0 && c.p_right <= 1.0)) throw std::invalid_argument("p_right must lie in [0, 1]");
  std::visit(
      [](const auto& d) {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, UniformInt>) {
          if (d.lo < 1 || d.hi < d.lo) throw std::invalid_argument("integer weights need 1 <= lo <= hi");
        } else if constexpr (std::is_same_v<D, UniformReal>) {
          if (!(d.lo > 0.0) || d.hi < d.lo) throw std::invalid_argument("real weights need 0 < lo <= hi");
        } else {
          if (!(d.lo > 0.0) || d.hi < d.lo || !(d.alpha > 0.0))
            throw std::invalid_argument("power law needs alpha > 0 and 0 < lo <= hi");
        }
      },
      c.weights);
}

inline double draw_weight(SplitMix64& rng, const WeightDistribution& dist) {
  return std::visit(
      [&](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, UniformInt>) {
          return static_cast<double>(rng.uniform_int(d.lo, d.hi));
        } else if constexpr (std::is_same_v<D, UniformReal>) {
          const double w = rng.uniform_real(d.lo, d.hi);
          return w > 0.0 ? w : d.lo;
        } else {
          if (d.hi == d.lo) return d.lo;
          // inverse CDF of the bounded Pareto distribution
          const double u = rng.uniform01();
          const double la = std::pow(d.lo, d.alpha), ha = std::pow(d.hi, d.alpha);
          const double w = std::pow(-(u * ha - u * la - ha) / (ha * la), -1.0 / d.alpha);
          return std::clamp(w, d.lo, d.hi);
        }
      },
      dist);
}

}  // namespace detail

/// Deterministic random instance for a configuration.
inline Instance generate(const GeneratorConfig& config) {
  detail::validate(config);
  SplitMix64 rng(config.seed);
  Instance instance(config.f, config.m);
  for (std::size_t i = 0; i < config.t; ++i) {
    const double w = detail::draw_weight(rng, config.weights);
    const auto dir = rng.uniform01() < config.p_right ? Direction::LeftToRight : Direction::RightToLeft;
    instance.add(dir, w);
  }
  return instance;
}

enum class AdversarialKind { Alternating, Drain, SubsetSumLike };

/// Structured instances. Alternating and Drain use weight `scale`;
/// SubsetSumLike draws t-1 integer items in [1, scale] (or uses `items`
/// when given) and closes with a reverse packet of half their sum.
inline Instance adversarial(AdversarialKind kind, std::size_t t, double scale, double f = 1.0, double m = 0.0,
                            std::uint64_t seed = 0, const std::vector<double>& items = {}) {
  if (t == 0 && items.empty()) throw std::invalid_argument("adversarial instances need t >= 1");
  Instance instance(f, m);
  switch (kind) {
    case AdversarialKind::Alternating:
      for (std::size_t i = 0; i < t; ++i)
        instance.add(i % 2 == 0 ? Direction::LeftToRight : Direction::RightToLeft, scale);
      break;
    case AdversarialKind::Drain:
      for (std::size_t i = 0; i < t; ++i) instance.add(Direction::LeftToRight, scale);
      break;
    case AdversarialKind::SubsetSumLike: {
      std::vector<double> chosen = items;
      if (chosen.empty()) {
        SplitMix64 rng(seed);
        const auto hi = std::max<std::int64_t>(1, static_cast<std::int64_t>(scale));
        for (std::size_t i = 0; i + 1 < t; ++i) chosen.push_back(static_cast<double>(rng.uniform_int(1, hi)));
        if (chosen.empty()) chosen.push_back(1.0);
      }
      double sum = 0.0;
      for (double w : chosen) {
        instance.add(Direction::LeftToRight, w);
        sum += w;
      }
      instance.add(Direction::RightToLeft, sum / 2.0);
      break;
    }
  }
  return instance;
}

struct RatioRecord {
  std::uint64_t seed = 0;
  std::size_t t = 0;
  double f = 0.0;
  double m = 0.0;
  std::optional<double> opt_total;  // empty when t exceeds the oracle limit
  double lp_best_bound = 0.0;
  double alg_total = 0.0;
  std::optional<double> ratio_vs_opt;
  double ratio_vs_lb = 1.0;
};

inline double safe_ratio(double num, double den) { return den > kTolerance ? num / den : 1.0; }

inline RatioRecord ratio_record(const GeneratorConfig& config, double epsilon, std::size_t oracle_limit) {
  const auto instance = generate(config);
  RatioRecord rec;
  rec.seed = config.seed;
  rec.t = config.t;
  rec.f = config.f;
  rec.m = config.m;
  const auto sol = solve(instance, epsilon);
  rec.alg_total = sol.best.cost.total;
  rec.lp_best_bound = sol.lower_bound();
  rec.ratio_vs_lb = safe_ratio(rec.alg_total, rec.lp_best_bound);
  if (instance.size() <= oracle_limit) {
    rec.opt_total = exact_opt(instance, oracle_limit).total;
    rec.ratio_vs_opt = safe_ratio(rec.alg_total, *rec.opt_total);
  }
  return rec;
}

/// One record per configuration, in configuration order.
inline std::vector<RatioRecord> ratio_experiment(const std::vector<GeneratorConfig>& configs, double epsilon,
                                                 std::size_t oracle_limit = kDefaultOracleLimit,
                                                 std::size_t threads = 1) {
  std::vector<RatioRecord> out(configs.size());
  parallel_for(configs.size(), threads,
               [&](std::size_t i) { out[i] = ratio_record(configs[i], epsilon, oracle_limit); });
  return out;
}

inline constexpr const char* kRatioCsvVersion = "# linkselect-ratios v1";
inline constexpr const char* kRatioCsvColumns = "seed,t,f,m,opt_total,lp_best_bound,alg_total,ratio_vs_opt,ratio_vs_lb";

inline std::string ratio_csv(const std::vector<RatioRecord>& records) {
  std::ostringstream out;
  out << kRatioCsvVersion << '\n' << kRatioCsvColumns << '\n';
  const auto opt = [](const std::optional<double>& v) { return v ? detail::fixed9(*v) : std::string(); };
  for (const auto& r : records) {
    out << r.seed << ',' << r.t << ',' << detail::fixed9(r.f) << ',' << detail::fixed9(r.m) << ',' << opt(r.opt_total)
        << ',' << detail::fixed9(r.lp_best_bound) << ',' << detail::fixed9(r.alg_total) << ','
        << opt(r.ratio_vs_opt) << ',' << detail::fixed9(r.ratio_vs_lb) << '\n';
  }
  return out.str();
}

/// Companion gnuplot script plotting ratio_vs_opt and ratio_vs_lb per row.
inline std::string ratio_gnuplot_script(const std::string& csv_path, double bound) {
  std::ostringstream out;
  out << "set datafile separator ','\n"
      << "set key top left\n"
      << "set xlabel 'record'\n"
      << "set ylabel 'ratio'\n"
      << "bound = " << detail::fixed9(bound) << "\n"
      << "plot '" << csv_path << "' every ::2 using 0:8 title 'ALG/OPT' with points, \\\n"
      << "     '' every ::2 using 0:9 title 'ALG/LB' with points, \\\n"
      << "     bound title 'guarantee' with lines\n";
  return out.str();
}

}  // namespace linkselect
