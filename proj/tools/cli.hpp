#pragma once

// The `linkselect` command line. Kept in a header so the test suite can run
// subcommands in-process against string streams.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "linkselect/linkselect.hpp"

namespace linkselect::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kSizeLimit = 3, kInvariant = 4 };

class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error("cannot write " + path);
}

inline std::string f9(double v) { return detail::fixed9(v); }

inline void check_epsilon(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw UsageError("--epsilon must be positive");
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string instance;
  double epsilon = kDefaultEpsilon;
  bool json = false;
  std::string trace;
  bool with_exact = false;
  std::size_t exact_limit = kDefaultOracleLimit;
  std::size_t threads = 0;
};

inline nlohmann::json solution_json(const DecisionSolution& s) {
  return {{"capacity", s.capacity},
          {"initial_left", s.initial_left},
          {"capacity_cost", s.cost.capacity_cost},
          {"rejection_cost", s.cost.rejection_cost},
          {"total", s.cost.total},
          {"decisions", s.decision_string()}};
}

inline int cmd_solve(const SolveArgs& a, std::ostream& out) {
  check_epsilon(a.epsilon);
  const auto instance = parse_instance(read_file(a.instance));
  SolveOptions opts;
  opts.epsilon = a.epsilon;
  opts.threads = a.threads;
  const auto res = solve(instance, opts);
  const auto& point = res.points[res.best_index];
  std::optional<ExactResult> exact;
  if (a.with_exact && instance.size() <= a.exact_limit) exact = exact_opt(instance, a.exact_limit);

  if (!a.trace.empty()) write_file(a.trace, approx_trace_csv(point.run, &point.kept));

  if (a.json) {
    nlohmann::json doc;
    doc["packets"] = instance.size();
    doc["epsilon"] = a.epsilon;
    doc["grid_capacity"] = point.capacity;
    doc["solution"] = solution_json(res.best);
    doc["lower_bound"] = res.lower_bound();
    auto grid = nlohmann::json::array();
    for (const auto& p : res.points) {
      nlohmann::json g{{"capacity", p.capacity}, {"feasible", p.feasible}};
      if (p.feasible) {
        g["lp_objective"] = p.lp_objective;
        g["forced_cost"] = p.forced_cost;
        g["lower_bound_term"] = p.lower_bound_term;
        g["alg_total"] = p.alg_solution.cost.total;
        g["windows"] = p.run.windows.size();
        g["guard_events"] = p.run.guard_events;
      }
      grid.push_back(std::move(g));
    }
    doc["grid"] = std::move(grid);
    if (exact) {
      doc["exact"] = {{"total", exact->total},
                      {"capacity_cost", exact->capacity_cost},
                      {"rejection_cost", exact->rejection_cost},
                      {"decisions", DecisionSolution{0, 0, exact->decisions, {}}.decision_string()},
                      {"ratio", safe_ratio(res.best.cost.total, exact->total)}};
    }
    out << doc.dump(2) << '\n';
    return kOk;
  }

  out << "packets " << instance.size() << '\n'
      << "epsilon " << f9(a.epsilon) << '\n'
      << "grid_capacity " << f9(point.capacity) << '\n'
      << "link_capacity " << f9(res.best.capacity) << '\n'
      << "initial_left " << f9(res.best.initial_left) << '\n'
      << "capacity_cost " << f9(res.best.cost.capacity_cost) << '\n'
      << "rejection_cost " << f9(res.best.cost.rejection_cost) << '\n'
      << "total " << f9(res.best.cost.total) << '\n'
      << "lower_bound " << f9(res.lower_bound()) << '\n'
      << "decisions " << res.best.decision_string() << '\n';
  if (exact)
    out << "opt " << f9(exact->total) << '\n' << "ratio " << f9(safe_ratio(res.best.cost.total, exact->total)) << '\n';
  return kOk;
}

inline int cmd_lp(const std::string& path, double capacity, std::ostream& out) {
  if (!(capacity >= 0.0) || !std::isfinite(capacity)) throw UsageError("--capacity must be non-negative");
  const auto instance = parse_instance(read_file(path));
  const auto pre = preprocess_oversized(instance, capacity);
  const auto sol = solve_lp(pre.instance, capacity);
  out << "capacity " << f9(capacity) << '\n'
      << "lp_objective " << f9(sol.objective) << '\n'
      << "forced_cost " << f9(pre.forced_cost) << '\n'
      << "initial_left " << f9(sol.left_trace.empty() ? 0.0 : sol.left_trace[0]) << '\n'
      << "index,direction,weight,y,fraction\n";
  for (std::size_t k = 0; k < pre.kept.size(); ++k) {
    const auto& p = pre.instance[k];
    out << pre.kept[k] + 1 << ',' << to_string(p.direction) << ',' << f9(p.weight) << ',' << f9(sol.y[k]) << ','
        << f9(sol.y[k] / p.weight) << '\n';
  }
  return kOk;
}

inline int cmd_exact(const std::string& path, std::size_t limit, std::ostream& out, std::ostream& err) {
  if (limit > kDefaultOracleLimit)
    err << "warning: --limit " << limit << " allows 2^" << limit << " decision vectors\n";
  const auto instance = parse_instance(read_file(path));
  const auto r = exact_opt(instance, limit);
  out << "packets " << instance.size() << '\n'
      << "capacity_cost " << f9(r.capacity_cost) << '\n'
      << "rejection_cost " << f9(r.rejection_cost) << '\n'
      << "total " << f9(r.total) << '\n'
      << "initial_left " << f9(r.initial_left) << '\n'
      << "decisions " << DecisionSolution{0, 0, r.decisions, {}}.decision_string() << '\n';
  return kOk;
}

inline int cmd_reduce(std::int64_t target, const std::vector<std::int64_t>& items, const std::string& output,
                      std::ostream& out) {
  SubsetSumInstance ss{items, target};
  try {
    validate(ss);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto red = reduce(ss);
  if (output.empty())
    out << format_instance(red.wps);
  else
    write_file(output, format_instance(red.wps));
  out << "threshold " << f9(red.threshold) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchGroup {
  GeneratorConfig base;
  std::size_t count = 1;
};

inline WeightDistribution parse_weight_arg(const std::string& arg) {
  std::vector<std::string> parts;
  std::stringstream ss(arg);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  const auto num = [&](std::size_t k) {
    double v = 0.0;
    if (k >= parts.size() || !detail::parse_decimal(parts[k], v)) throw UsageError("bad --weights value '" + arg + "'");
    return v;
  };
  if (parts.size() == 3 && parts[0] == "uniform-int")
    return UniformInt{static_cast<std::int64_t>(num(1)), static_cast<std::int64_t>(num(2))};
  if (parts.size() == 3 && parts[0] == "uniform-real") return UniformReal{num(1), num(2)};
  if (parts.size() == 4 && parts[0] == "power") return PowerLaw{num(1), num(2), num(3)};
  throw UsageError("bad --weights value '" + arg + "' (uniform-int:lo:hi, uniform-real:lo:hi, power:alpha:lo:hi)");
}

inline WeightDistribution weights_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "uniform_int") return UniformInt{j.at("lo").get<std::int64_t>(), j.at("hi").get<std::int64_t>()};
  if (kind == "uniform_real") return UniformReal{j.at("lo").get<double>(), j.at("hi").get<double>()};
  if (kind == "power") return PowerLaw{j.at("alpha").get<double>(), j.at("lo").get<double>(), j.at("hi").get<double>()};
  throw UsageError("unknown weight kind '" + kind + "'");
}

struct BenchConfig {
  std::vector<BenchGroup> groups;
  double epsilon = kDefaultEpsilon;
  std::size_t oracle_limit = kDefaultOracleLimit;
};

/// Reads a bench configuration document:
/// {"epsilon": 0.1, "oracle_limit": 20, "groups": [{"t": 10, "count": 50,
///   "seed": 1, "f": 1, "m": 0, "p_right": 0.5,
///   "weights": {"kind": "uniform_int", "lo": 1, "hi": 20}}]}
inline BenchConfig bench_config_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("bench config: ") + e.what());
  }
  try {
    BenchConfig cfg;
    cfg.epsilon = doc.value("epsilon", kDefaultEpsilon);
    cfg.oracle_limit = doc.value("oracle_limit", kDefaultOracleLimit);
    for (const auto& g : doc.at("groups")) {
      BenchGroup group;
      group.base.t = g.at("t").get<std::size_t>();
      group.count = g.value("count", std::size_t{1});
      group.base.seed = g.value("seed", std::uint64_t{0});
      group.base.f = g.value("f", 1.0);
      group.base.m = g.value("m", 0.0);
      group.base.p_right = g.value("p_right", 0.5);
      if (g.contains("weights")) group.base.weights = weights_from_json(g.at("weights"));
      cfg.groups.push_back(group);
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bench config: ") + e.what());
  }
}

/// Expands groups into one generator configuration per record; record k of
/// a group uses seed base_seed + k.
inline std::vector<GeneratorConfig> expand(const BenchConfig& cfg) {
  std::vector<GeneratorConfig> out;
  for (const auto& g : cfg.groups)
    for (std::size_t k = 0; k < g.count; ++k) {
      auto c = g.base;
      c.seed = g.base.seed + k;
      out.push_back(c);
    }
  return out;
}

struct BenchArgs {
  std::string config;
  std::size_t count = 10;
  std::size_t t = 10;
  std::string weights = "uniform-int:1:20";
  double p_right = 0.5;
  double f = 1.0;
  double m = 0.0;
  std::uint64_t seed = 1;
  double epsilon = kDefaultEpsilon;
  std::size_t oracle_limit = kDefaultOracleLimit;
  std::size_t threads = 0;
  std::string output;
  std::string gnuplot;
};

inline int cmd_bench(const BenchArgs& a, bool epsilon_given, std::ostream& out) {
  BenchConfig cfg;
  if (!a.config.empty()) {
    cfg = bench_config_from_json(read_file(a.config));
    if (epsilon_given) cfg.epsilon = a.epsilon;
  } else {
    BenchGroup g;
    g.base.t = a.t;
    g.base.weights = parse_weight_arg(a.weights);
    g.base.p_right = a.p_right;
    g.base.f = a.f;
    g.base.m = a.m;
    g.base.seed = a.seed;
    g.count = a.count;
    cfg.groups.push_back(g);
    cfg.epsilon = a.epsilon;
    cfg.oracle_limit = a.oracle_limit;
  }
  check_epsilon(cfg.epsilon);
  const auto configs = expand(cfg);
  for (const auto& c : configs) {
    try {
      detail::validate(c);
      Instance(c.f, c.m);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  const auto records = ratio_experiment(configs, cfg.epsilon, cfg.oracle_limit, a.threads);
  const auto csv = ratio_csv(records);
  if (a.output.empty())
    out << csv;
  else
    write_file(a.output, csv);
  if (!a.gnuplot.empty()) {
    const Constants k;
    write_file(a.gnuplot, ratio_gnuplot_script(a.output.empty() ? "ratios.csv" : a.output,
                                               (1.0 + cfg.epsilon) * k.arat));
  }
  return kOk;
}

inline int cmd_network(const std::string& path, double epsilon, std::size_t long_limit, std::size_t threads,
                       std::ostream& out) {
  check_epsilon(epsilon);
  const auto net = parse_network(read_file(path));
  const auto r = solve_network_few_long(net, epsilon, long_limit, threads);
  out << "links " << net.links.size() << '\n'
      << "packets " << net.packets.size() << '\n'
      << "long_packets " << net.long_packets().size() << '\n'
      << "subsets " << r.subsets_evaluated << '\n';
  out << "accepted_long";
  for (auto i : r.accepted_long) out << ' ' << i + 1;
  out << '\n';
  out << "long_rejection_cost " << f9(r.long_rejection_cost) << '\n';
  for (const auto& l : r.per_link) {
    out << "link " << l.link << " capacity " << f9(l.solution.capacity) << " capacity_cost "
        << f9(l.solution.cost.capacity_cost) << " rejection_cost " << f9(l.solution.cost.rejection_cost) << " total "
        << f9(l.solution.cost.total) << " decisions " << l.solution.decision_string() << '\n';
  }
  out << "total " << f9(r.total) << '\n';
  return kOk;
}

inline int cmd_cyclic(const std::string& path, double capacity, double c, std::ostream& out) {
  if (!(capacity > 0.0) || !std::isfinite(capacity)) throw UsageError("--capacity must be positive");
  if (!(c >= 1.0)) throw UsageError("--cost-multiplier must be >= 1");
  const auto instance = parse_instance(read_file(path));
  const auto pre = preprocess_oversized(instance, capacity);
  const CyclicParams params{c};
  const auto base = solve_lp(pre.instance, capacity);
  const auto cyc = solve_cyclic_lp(pre.instance, capacity, params);
  const auto ep = epoch_heuristic(pre.instance, capacity, cyc, params);
  double shifted = 0.0;
  for (std::size_t i = 0; i < cyc.y.size(); ++i) shifted += cyc.shift_to_left[i] + cyc.shift_to_right[i];
  out << "capacity " << f9(capacity) << '\n'
      << "forced_cost " << f9(pre.forced_cost) << '\n'
      << "lp_objective " << f9(base.objective) << '\n'
      << "cyclic_lp_objective " << f9(cyc.objective) << '\n'
      << "shifted " << f9(shifted) << '\n'
      << "heuristic true\n"
      << "redistributions " << ep.redistributions << '\n'
      << "redistribution_cost " << f9(ep.redistribution_cost) << '\n'
      << "link_capacity " << f9(ep.solution.capacity) << '\n'
      << "rejection_cost " << f9(ep.solution.cost.rejection_cost + pre.forced_cost) << '\n'
      << "total " << f9(ep.total() + pre.forced_cost) << '\n'
      << "decisions " << DecisionSolution{0, 0, expand_decisions(pre, instance.size(), ep.solution.decisions), {}}
                             .decision_string()
      << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted packet selection on a rechargeable link", "linkselect"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "capacity search with LP rounding");
  solve_cmd->add_option("instance", solve_args.instance, "instance file (wps v1)")->required();
  solve_cmd->add_option("--epsilon", solve_args.epsilon, "capacity grid ratio")->envname("LINKSELECT_EPSILON");
  solve_cmd->add_flag("--json", solve_args.json, "machine-readable report");
  solve_cmd->add_option("--trace", solve_args.trace, "write the step trace CSV here");
  solve_cmd->add_flag("--with-exact", solve_args.with_exact, "also run the exact oracle when small enough");
  solve_cmd->add_option("--exact-limit", solve_args.exact_limit, "largest instance for --with-exact");
  solve_cmd->add_option("--threads", solve_args.threads, "worker threads (0 = all cores)");

  std::string lp_path;
  double lp_capacity = 0.0;
  auto* lp_cmd = app.add_subcommand("lp", "fractional lower bound at one capacity");
  lp_cmd->add_option("instance", lp_path)->required();
  lp_cmd->add_option("--capacity", lp_capacity, "link capacity M")->required();

  std::string exact_path;
  std::size_t exact_limit = kDefaultOracleLimit;
  auto* exact_cmd = app.add_subcommand("exact", "exhaustive optimum");
  exact_cmd->add_option("instance", exact_path)->required();
  exact_cmd->add_option("--limit", exact_limit, "refuse instances with more packets");

  std::int64_t target = 0;
  std::vector<std::int64_t> items;
  std::string reduce_output;
  auto* reduce_cmd = app.add_subcommand("reduce-subset-sum", "write the packet instance for a subset-sum query");
  reduce_cmd->add_option("--target", target, "target S")->required();
  reduce_cmd->add_option("items", items, "item values");
  reduce_cmd->add_option("-o,--output", reduce_output, "instance file to write (default: stdout)");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "approximation-ratio experiment");
  bench_cmd->add_option("--config", bench_args.config, "JSON configuration file");
  bench_cmd->add_option("--count", bench_args.count, "instances");
  bench_cmd->add_option("--t", bench_args.t, "packets per instance");
  bench_cmd->add_option("--weights", bench_args.weights, "uniform-int:lo:hi | uniform-real:lo:hi | power:alpha:lo:hi");
  bench_cmd->add_option("--p-right", bench_args.p_right, "probability of a left-to-right packet");
  bench_cmd->add_option("--f", bench_args.f, "per-unit rejection cost");
  bench_cmd->add_option("--m", bench_args.m, "per-packet rejection cost");
  bench_cmd->add_option("--seed", bench_args.seed, "first seed");
  auto* bench_eps = bench_cmd->add_option("--epsilon", bench_args.epsilon, "capacity grid ratio")
                        ->envname("LINKSELECT_EPSILON");
  bench_cmd->add_option("--oracle-limit", bench_args.oracle_limit, "largest instance for the exact oracle");
  bench_cmd->add_option("--threads", bench_args.threads, "worker threads (0 = all cores)");
  bench_cmd->add_option("--output", bench_args.output, "CSV file (default: stdout)");
  bench_cmd->add_option("--gnuplot", bench_args.gnuplot, "also write a gnuplot script");

  std::string net_path;
  double net_epsilon = kDefaultEpsilon;
  std::size_t long_limit = kDefaultLongLimit, net_threads = 0;
  auto* net_cmd = app.add_subcommand("network", "links joined by a few long packets");
  net_cmd->add_option("network", net_path, "network file (wpsnet v1)")->required();
  net_cmd->add_option("--epsilon", net_epsilon)->envname("LINKSELECT_EPSILON");
  net_cmd->add_option("--long-limit", long_limit);
  net_cmd->add_option("--threads", net_threads);

  std::string cyc_path;
  double cyc_capacity = 0.0, cyc_c = 1.0;
  auto* cyc_cmd = app.add_subcommand("cyclic", "LP with cyclic redistribution and the epoch heuristic");
  cyc_cmd->add_option("instance", cyc_path)->required();
  cyc_cmd->add_option("--capacity", cyc_capacity)->required();
  cyc_cmd->add_option("--cost-multiplier", cyc_c, "C >= 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_args, out);
    if (*lp_cmd) return cmd_lp(lp_path, lp_capacity, out);
    if (*exact_cmd) return cmd_exact(exact_path, exact_limit, out, err);
    if (*reduce_cmd) return cmd_reduce(target, items, reduce_output, out);
    if (*bench_cmd) return cmd_bench(bench_args, bench_eps->count() > 0, out);
    if (*net_cmd) return cmd_network(net_path, net_epsilon, long_limit, net_threads, out);
    if (*cyc_cmd) return cmd_cyclic(cyc_path, cyc_capacity, cyc_c, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  } catch (const SizeLimitError& e) {
    err << "error: " << e.what() << '\n';
    return kSizeLimit;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << '\n';
    return kInvariant;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInvariant;
  }
  return kUsage;
}

}  // namespace linkselect::cli
