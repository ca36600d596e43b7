#include <gtest/gtest.h>

#include <cmath>

#include "linkselect/approx.hpp"
#include "linkselect/search.hpp"
#include "support.hpp"

using namespace linkselect;

namespace {

constexpr auto A = Decision::Accept;
constexpr auto R = Decision::Reject;
constexpr auto L2R = Direction::LeftToRight;
constexpr auto R2L = Direction::RightToLeft;

const double kSqrt3 = std::sqrt(3.0);

}  // namespace

TEST(Constants, Identities) {
  const Constants k;
  EXPECT_NEAR(k.arat * k.hibu / 2.0, 1.0, 1e-12);
  EXPECT_NEAR(k.arat + 1.0 / k.arat, (1.0 + 3.0 * kSqrt3) / 2.0, 1e-12);
  EXPECT_NEAR(1.0 + k.hibu, kSqrt3, 1e-12);
  EXPECT_NEAR(k.little_threshold(), (3.0 - kSqrt3) / 2.0, 1e-12);
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(1, 1), PacketClass::Full);
  EXPECT_EQ(classify(0, 1), PacketClass::Little);
  EXPECT_EQ(classify(0.634, 1), PacketClass::Almost);
  EXPECT_EQ(classify(0.633, 1), PacketClass::Little);
}

TEST(Phase, Boundaries) {
  const double line = (kSqrt3 - 1) / 2;
  EXPECT_EQ(phase_of(line, line, 1), Phase::Balanced);
  EXPECT_EQ(phase_of(line - 1e-6, 1, 1), Phase::Left);
  EXPECT_EQ(phase_of(1, line - 1e-6, 1), Phase::Right);
}

TEST(Divide, StopsImmediatelyAboveLine) {
  Instance inst(1, 0, {{L2R, 1}, {R2L, 1}});
  const auto frac = make_fractional(inst, 1, {0.9, 0.0}, 1.0);
  const auto w = divide(inst, 1, frac, 0.8, 0);
  EXPECT_EQ(w.undecided, (std::vector<std::size_t>{0}));
  EXPECT_TRUE(w.accept_set.empty());
  EXPECT_TRUE(w.reject_set.empty());
  EXPECT_EQ(w.end, 0u);
  EXPECT_NEAR(w.reserve_after, 0.7, 1e-12);
}

TEST(Divide, StopsAtLastPacket) {
  Instance inst(1, 0, {{L2R, 1}});
  const auto frac = make_fractional(inst, 1, {0.7}, 1.0);
  const auto w = divide(inst, 1, frac, 0.4, 0);
  EXPECT_EQ(w.end, 0u);
  EXPECT_NEAR(w.reserve_after, 0.1, 1e-12);
}

TEST(Divide, OppositePacketRestoresReserve) {
  Instance inst(1, 0, {{L2R, 1}, {R2L, 0.8}});
  const auto frac = make_fractional(inst, 1, {0.7, 0.5}, 1.0);
  const auto w = divide(inst, 1, frac, 0.4, 0);
  EXPECT_EQ(w.undecided, (std::vector<std::size_t>{0}));
  EXPECT_EQ(w.accept_set, (std::vector<std::size_t>{1}));
  EXPECT_TRUE(w.reject_set.empty());
  EXPECT_EQ(w.end, 1u);
  EXPECT_NEAR(w.reserve_after, 0.4, 1e-12);
}

TEST(Divide, ClassifiesSameDirectionPackets) {
  // r: 0.3 - 0.1 = 0.2, little (→1, y=0.2) gives 0.4 >= 0.366: stop
  Instance inst(1, 0, {{L2R, 1}, {L2R, 1}, {L2R, 1}});
  const auto frac = make_fractional(inst, 3, {0.9, 0.2, 1.0}, 3.0);
  const auto w = divide(inst, 1, frac, 0.3, 0);
  EXPECT_EQ(w.reject_set, (std::vector<std::size_t>{1}));
  EXPECT_EQ(w.end, 1u);
  EXPECT_THROW(divide(inst, 1, frac, 0.3, 1), std::invalid_argument);
}

TEST(RejectBig, SingleRemoval) {
  Instance inst(1, 0, {{L2R, 0.9}});
  const auto frac = make_fractional(inst, 1, {0.8}, 1.0);
  const auto r = reject_big(inst, frac, {0}, -0.2, 1);
  EXPECT_EQ(r.rejected, (std::vector<std::size_t>{0}));
  EXPECT_NEAR(r.reserve, 0.7, 1e-12);
}

TEST(RejectBig, RemovesHeaviestFirst) {
  Instance inst(1, 0, {{L2R, 0.4}, {L2R, 0.5}});
  const auto frac = make_fractional(inst, 1, {0.3, 0.4}, 1.0);
  const auto r = reject_big(inst, frac, {0, 1}, -0.3, 1);
  EXPECT_EQ(r.rejected, (std::vector<std::size_t>{1, 0}));
  EXPECT_NEAR(r.reserve, 0.6, 1e-12);
  // removed weight stays within twice the deficit D = line - r
  const double deficit = (kSqrt3 - 1) / 2 + 0.3;
  EXPECT_LE(0.9, 2 * deficit);
}

TEST(RejectBig, TieGoesToLowerIndex) {
  Instance inst(1, 0, {{L2R, 0.6}, {L2R, 0.6}});
  const auto frac = make_fractional(inst, 1.2, {0.5, 0.5}, 1.2);
  const auto r = reject_big(inst, frac, {0, 1}, -0.1, 1);
  ASSERT_FALSE(r.rejected.empty());
  EXPECT_EQ(r.rejected[0], 0u);
}

TEST(RejectBig, NeverPicksFullPackets) {
  Instance inst(1, 0, {{L2R, 0.9}, {L2R, 0.2}});
  const auto frac = make_fractional(inst, 1.1, {0.9, 0.15}, 1.1);
  EXPECT_THROW(reject_big(inst, frac, {0, 1}, -0.2, 1), InvariantError);
}

TEST(RunApprox, AllFull) {
  Instance inst(1, 1, {{L2R, 2}, {R2L, 3}, {L2R, 1}});
  const double cap = m_max(inst);
  const auto run = run_approx(inst, cap, solve_lp(inst, cap));
  EXPECT_EQ(run.solution.decisions, (std::vector<Decision>{A, A, A}));
  EXPECT_EQ(run.solution.cost.rejection_cost, 0.0);
  EXPECT_NEAR(run.solution.cost.capacity_cost, (1 + kSqrt3) * cap, 1e-12);
}

TEST(RunApprox, Empty) {
  const Instance inst(1, 0);
  const auto run = run_approx(inst, 2, solve_lp(inst, 2));
  EXPECT_NEAR(run.solution.cost.total, 2 * (1 + kSqrt3), 1e-12);
}

TEST(RunApprox, TwoPackets) {
  Instance inst(1, 0, {{L2R, 1}, {L2R, 1}});
  const auto frac = solve_lp(inst, 1);
  const auto run = run_approx(inst, 1, frac);
  EXPECT_EQ(run.solution.decisions, (std::vector<Decision>{A, R}));
  EXPECT_NEAR(run.solution.cost.rejection_cost, 1.0, 1e-12);
  EXPECT_NEAR(run.solution.cost.total, 2 + kSqrt3, 1e-12);
  EXPECT_LE(run.solution.cost.rejection_cost, (1 + kSqrt3) * frac.objective + 1e-9);
  ASSERT_EQ(run.trace.size(), 2u);
  EXPECT_EQ(run.trace[0].packet_class, PacketClass::Full);
  EXPECT_EQ(run.trace[1].packet_class, PacketClass::Little);
  EXPECT_NEAR(run.trace[1].reserve_left, kSqrt3 / 2, 1e-12);
}

// Properties over random instances and every grid capacity: Full packets
// accepted, reserves conserved and non-negative, Little steps keep Balanced,
// the whole-run bound, and the committed decisions replay.
TEST(RunApprox, Invariants) {
  const Constants k;
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    const auto inst = support::random_instance(seed, 1 + seed % 14);
    for (double cap : capacity_grid(inst, 0.25).values) {
      const auto pre = preprocess_oversized(inst, cap);
      const auto frac = solve_lp(pre.instance, cap);
      const auto run = run_approx(pre.instance, cap, frac, pre.forced_cost);
      const auto& sub = pre.instance;
      const std::string label = "seed " + std::to_string(seed) + " M " + std::to_string(cap);
      for (std::size_t i = 0; i < sub.size(); ++i)
        if (frac.y[i] >= sub[i].weight) {
          EXPECT_EQ(run.solution.decisions[i], A) << label;
        }
      for (const auto& row : run.trace) {
        EXPECT_GE(row.reserve_left, -1e-9) << label;
        EXPECT_GE(row.reserve_right, -1e-9) << label;
        EXPECT_NEAR(row.reserve_left + row.reserve_right, kSqrt3 * cap, 1e-7) << label;
        if (row.packet_class == PacketClass::Little && row.phase_before == Phase::Balanced) {
          EXPECT_EQ(row.phase, Phase::Balanced) << label << " step " << row.step;
        }
      }
      double lp_cost = frac.objective;
      EXPECT_LE(run.solution.cost.rejection_cost - pre.forced_cost, k.arat * lp_cost + 1e-7) << label;
      EXPECT_TRUE(replay_feasible(sub, run.solution.decisions, run.solution.capacity, run.solution.initial_left,
                                  1e-7))
          << label;
      EXPECT_EQ(run.guard_events, 0u) << label;
    }
  }
}

TEST(RunApprox, TraceCsv) {
  Instance inst(1, 0, {{L2R, 1}, {L2R, 1}});
  const auto run = run_approx(inst, 1, solve_lp(inst, 1));
  const auto csv = approx_trace_csv(run);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,dir,weight,y,class,phase,decision,RL,RR,window_id");
  EXPECT_NE(csv.find("\n2,->,1.000000000,0.000000000,little,"), std::string::npos) << csv;
}
