#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace linkselect;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "linkselect");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("linkselect_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& text) {
    const auto p = (dir_ / name).string();
    std::ofstream(p) << text;
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::string field(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  for (std::string line; std::getline(in, line);)
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
  return "<missing>";
}

const char* kSmall = "wps v1\nf 1\nm 0.5\n-> 2\n<- 1\n-> 3\n-> 1\n";

}  // namespace

TEST_F(CliTest, EmptyInstance) {
  const auto r = run({"solve", file("empty.wps", "wps v1\nf 1\nm 0\n")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "total"), "0.000000000");
  EXPECT_EQ(field(r.out, "packets"), "0");
}

TEST_F(CliTest, SolveReport) {
  const auto r = run({"solve", file("a.wps", kSmall), "--with-exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto inst = parse_instance(kSmall);
  const auto res = solve(inst, 0.1);
  EXPECT_EQ(field(r.out, "total"), detail::fixed9(res.best.cost.total));
  EXPECT_EQ(field(r.out, "decisions"), res.best.decision_string());
  EXPECT_EQ(field(r.out, "opt"), detail::fixed9(exact_opt(inst).total));
}

TEST_F(CliTest, SolveJsonMatchesText) {
  const auto p = file("a.wps", kSmall);
  const auto text = run({"solve", p});
  const auto json = run({"solve", p, "--json"});
  ASSERT_EQ(json.code, 0);
  const auto doc = nlohmann::json::parse(json.out);
  EXPECT_EQ(detail::fixed9(doc["solution"]["total"].get<double>()), field(text.out, "total"));
  EXPECT_EQ(doc["solution"]["decisions"].get<std::string>(), field(text.out, "decisions"));
  EXPECT_EQ(doc["packets"].get<int>(), 4);
  EXPECT_GT(doc["grid"].size(), 1u);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  const auto p = file("a.wps", kSmall);
  EXPECT_EQ(run({"solve", p, "--json", "--threads", "1"}).out, run({"solve", p, "--json", "--threads", "3"}).out);
  run({"solve", p, "--trace", path("t1.csv")});
  run({"solve", p, "--trace", path("t2.csv")});
  std::ifstream a(path("t1.csv")), b(path("t2.csv"));
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_FALSE(sa.str().empty());
  EXPECT_EQ(sa.str(), sb.str());
}

TEST_F(CliTest, MissingFile) {
  const auto r = run({"solve", path("nope.wps")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nope.wps"), std::string::npos);
}

TEST_F(CliTest, ParseErrorExitCode) {
  const auto r = run({"solve", file("bad.wps", "wps v1\nf 1\nm 0\n=> 2\n")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
}

TEST_F(CliTest, ExactSizeLimit) {
  std::string text = "wps v1\nf 1\nm 0\n";
  for (int i = 0; i < 25; ++i) text += "-> 1\n";
  const auto p = file("big.wps", text);
  EXPECT_EQ(run({"exact", p}).code, 3);
  EXPECT_EQ(run({"solve", p}).code, 0);
}

TEST_F(CliTest, ExactWarnsAboveDefaultLimit) {
  const auto r = run({"exact", file("a.wps", kSmall), "--limit", "22"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(run({"exact", file("b.wps", kSmall)}).err, "");
}

TEST_F(CliTest, LpUsage) {
  const auto p = file("a.wps", kSmall);
  EXPECT_EQ(run({"lp", p, "--capacity", "-1"}).code, 1);
  EXPECT_EQ(run({"lp", p}).code, 1);
  const auto r = run({"lp", p, "--capacity", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  // the weight-3 packet does not fit and is charged up front: 1*3 + 0.5
  EXPECT_EQ(field(r.out, "forced_cost"), "3.500000000");
  EXPECT_NE(r.out.find("index,direction,weight,y,fraction\n1,->,2.000000000,"), std::string::npos) << r.out;
}

TEST_F(CliTest, ReduceSubsetSum) {
  const auto r = run({"reduce-subset-sum", "--target", "3", "1", "2", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "threshold"), "5.250000000");
  EXPECT_EQ(r.out.substr(0, r.out.find("threshold")), format_instance(reduce({{1, 2, 3}, 3}).wps));

  const auto w = run({"reduce-subset-sum", "--target", "3", "1", "2", "3", "-o", path("r.wps")});
  EXPECT_EQ(w.out, "threshold 5.250000000\n");
  EXPECT_EQ(run({"exact", path("r.wps")}).code, 0);
  EXPECT_EQ(run({"reduce-subset-sum", "--target", "0", "1"}).code, 1);
}

TEST_F(CliTest, EpsilonFromEnvironment) {
  const auto p = file("a.wps", kSmall);
  ::setenv("LINKSELECT_EPSILON", "0.5", 1);
  const auto from_env = run({"solve", p});
  const auto flag_wins = run({"solve", p, "--epsilon", "0.25"});
  ::unsetenv("LINKSELECT_EPSILON");
  EXPECT_EQ(field(from_env.out, "epsilon"), "0.500000000");
  EXPECT_EQ(field(flag_wins.out, "epsilon"), "0.250000000");
  EXPECT_EQ(field(run({"solve", p}).out, "epsilon"), "0.100000000");
  EXPECT_EQ(run({"solve", p, "--epsilon", "0"}).code, 1);
}

TEST_F(CliTest, UnknownSubcommand) {
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, BenchCsv) {
  const auto a = run({"bench", "--count", "3", "--t", "5", "--seed", "10", "--threads", "1"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out.rfind("# linkselect-ratios v1\nseed,t,", 0), 0u);
  EXPECT_NE(a.out.find("\n12,5,"), std::string::npos);
  EXPECT_EQ(a.out, run({"bench", "--count", "3", "--t", "5", "--seed", "10", "--threads", "2"}).out);

  const auto cfg = file("bench.json", R"({"epsilon": 0.5, "groups": [
    {"t": 4, "count": 2, "seed": 1, "f": 0.25, "m": 1, "weights": {"kind": "uniform_int", "lo": 1, "hi": 5}},
    {"t": 3, "count": 1, "seed": 7, "weights": {"kind": "power", "alpha": 1.2, "lo": 1, "hi": 50}}]})");
  const auto b = run({"bench", "--config", cfg, "--output", path("r.csv"), "--gnuplot", path("r.gp")});
  ASSERT_EQ(b.code, 0) << b.err;
  std::ifstream csv(path("r.csv"));
  std::string line;
  int rows = -2;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 3);
  EXPECT_TRUE(fs::exists(path("r.gp")));
  EXPECT_EQ(run({"bench", "--weights", "gauss:1:2"}).code, 1);
}

TEST_F(CliTest, Network) {
  const auto p = file("n.wpsnet", "wpsnet v1\nf 100\nm 0\nlink a\nlink b\npacket 2 a:fwd\npacket 10 a:fwd,b:fwd\n"
                                  "packet 1 b:rev\n");
  const auto r = run({"network", p});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "subsets"), "2");
  EXPECT_EQ(field(r.out, "accepted_long"), "2");
  EXPECT_EQ(field(r.out, "total"), detail::fixed9(solve_network_few_long(parse_network(cli::read_file(p)), 0.1).total));
  EXPECT_EQ(run({"network", p, "--long-limit", "0"}).code, 3);
}

TEST_F(CliTest, Cyclic) {
  const auto p = file("c.wps", "wps v1\nf 1\nm 1\n-> 1\n-> 1\n-> 1\n");
  const auto r = run({"cyclic", p, "--capacity", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "heuristic"), "true");
  EXPECT_EQ(field(r.out, "lp_objective"), "2.000000000");
  EXPECT_EQ(field(r.out, "cyclic_lp_objective"), "1.500000000");
  EXPECT_EQ(run({"cyclic", p, "--capacity", "2", "--cost-multiplier", "0.5"}).code, 1);
}

TEST(Samples, AllRun) {
  const std::string dir = LINKSELECT_SAMPLES_DIR;
  int seen = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto p = e.path().string(), ext = e.path().extension().string();
    Outcome r{-1, "", ""};
    if (ext == ".wps") r = run({"solve", p, "--with-exact"});
    else if (ext == ".wpsnet") r = run({"network", p});
    else if (ext == ".json") r = run({"bench", "--config", p, "--threads", "1"});
    else continue;
    ++seen;
    EXPECT_EQ(r.code, 0) << p << ": " << r.err;
  }
  EXPECT_GE(seen, 5);
}
