#include <gtest/gtest.h>

#include "linkselect/simplex.hpp"
#include "support.hpp"

using namespace linkselect;
using lp::Relation;

TEST(Simplex, SmallMinimisation) {
  // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6, 0 <= x, y <= 10  -> x = 1.6, y = 1.2
  lp::Problem p;
  p.add_variable(0, 10, -1);
  p.add_variable(0, 10, -1);
  auto& a = p.add_constraint(Relation::LessEqual, 4);
  a.coefficients = {1, 2};
  auto& b = p.add_constraint(Relation::LessEqual, 6);
  b.coefficients = {3, 1};
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_NEAR(r.x[0], 1.6, 1e-9);
  EXPECT_NEAR(r.x[1], 1.2, 1e-9);
  EXPECT_NEAR(r.objective, -2.8, 1e-9);
}

TEST(Simplex, EqualityAndGreaterRows) {
  // min x + 2y + 3z  s.t. x + y + z = 3, y + z >= 2, bounds [0, 5]
  lp::Problem p;
  for (double c : {1.0, 2.0, 3.0}) p.add_variable(0, 5, c);
  p.add_constraint(Relation::Equal, 3).coefficients = {1, 1, 1};
  p.add_constraint(Relation::GreaterEqual, 2).coefficients = {0, 1, 1};
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_NEAR(r.objective, 5.0, 1e-9);
  EXPECT_NEAR(r.x[1], 2.0, 1e-9);
}

TEST(Simplex, Infeasible) {
  lp::Problem p;
  p.add_variable(0, 1, 1);
  p.add_constraint(Relation::GreaterEqual, 2).coefficients = {1};
  EXPECT_EQ(lp::solve(p).status, lp::Status::Infeasible);
}

TEST(Simplex, NegativeLowerBoundsAndOffset) {
  lp::Problem p;
  p.objective_offset = 10;
  p.add_variable(-3, 2, 1);
  p.add_variable(-1, 1, -1);
  p.add_constraint(Relation::LessEqual, 0).coefficients = {-1, 1};
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::Optimal);
  // x1 <= x0 makes x0 - x1 >= 0
  EXPECT_NEAR(r.objective, 10.0, 1e-9);
}

TEST(Simplex, TieBreakPicksLexicographicFace) {
  // every split of 1 between x and y is optimal; the tie-break prefers x
  lp::Problem p;
  p.add_variable(0, 1, -1);
  p.add_variable(0, 1, -1);
  p.add_constraint(Relation::LessEqual, 1).coefficients = {1, 1};
  const auto r = lp::solve(p, {{-1, 0}, {0, -1}});
  EXPECT_NEAR(r.x[0], 1.0, 1e-12);
  EXPECT_NEAR(r.x[1], 0.0, 1e-12);
  const auto q = lp::solve(p, {{0, -1}, {-1, 0}});
  EXPECT_NEAR(q.x[0], 0.0, 1e-12);
  EXPECT_NEAR(q.x[1], 1.0, 1e-12);
}

TEST(Simplex, RejectsMalformedProblems) {
  lp::Problem p;
  p.add_variable(1, 0, 0);
  EXPECT_THROW(lp::solve(p), std::invalid_argument);
}

// Property: on random bounded LPs with up to four variables the optimum
// equals the best vertex found by exhaustive enumeration.
TEST(Simplex, MatchesVertexEnumeration) {
  SplitMix64 rng(42);
  int optimal = 0;
  for (int trial = 0; trial < 300; ++trial) {
    lp::Problem p;
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 4));
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = static_cast<double>(rng.uniform_int(-3, 1));
      p.add_variable(lo, lo + static_cast<double>(rng.uniform_int(0, 5)),
                     static_cast<double>(rng.uniform_int(-4, 4)));
    }
    const auto rows = rng.uniform_int(0, 4);
    for (std::int64_t k = 0; k < rows; ++k) {
      const auto rel = static_cast<Relation>(rng.uniform_int(0, 2));
      auto& c = p.add_constraint(rel, static_cast<double>(rng.uniform_int(-4, 6)));
      for (auto& v : c.coefficients) v = static_cast<double>(rng.uniform_int(-3, 3));
    }
    const auto r = lp::solve(p);
    const auto ref = support::vertex_enumeration_min(p);
    ASSERT_EQ(r.status == lp::Status::Optimal, ref.has_value()) << "trial " << trial;
    if (ref) {
      ++optimal;
      EXPECT_NEAR(r.objective, *ref, 1e-7) << "trial " << trial;
      EXPECT_NEAR(p.evaluate(r.x), r.objective, 1e-9);
    }
  }
  // the corpus mixes solvable and infeasible problems
  EXPECT_GT(optimal, 100);
  EXPECT_LT(optimal, 300);
}
