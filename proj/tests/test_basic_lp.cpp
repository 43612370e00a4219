#include <gtest/gtest.h>

#include <random>

#include "cspgap/basic_lp.hpp"
#include "cspgap/dichotomy.hpp"
#include "cspgap/enumerate.hpp"
#include "cspgap/families.hpp"
#include "cspgap/lp_oracle.hpp"

using namespace cspgap;

namespace {

Instance edge() { return Instance(families::cut(), 2, {{0, {0, 1}, 1}}); }

// Expands integer weights into repeated unit constraints.
Instance unweighted(const Instance& inst) {
  std::vector<Constraint> cs;
  for (const auto& c : inst.constraints())
    for (std::int64_t r = 0; r < c.weight; ++r) cs.push_back({c.predicate, c.vars, 1});
  return Instance(inst.family_ptr(), inst.n(), cs);
}

}  // namespace

TEST(BasicLp, Shape) {
  auto c5 = builders::cycle(families::cut(), 5);
  auto lp = build_basic_lp(c5);
  EXPECT_EQ(lp.num_vars(), 5u * 2u + 5u * 4u);
  EXPECT_EQ(lp.num_rows(), 5u + 5u * 2u * 2u);
  EXPECT_TRUE(lp.find("x_1_0").has_value());
  EXPECT_TRUE(lp.find("y_5_11").has_value());
}

TEST(BasicLp, ConcreteValues) {
  auto cut = families::cut();
  EXPECT_EQ(solve_basic_lp(builders::cycle(cut, 5)).value, 1);
  EXPECT_EQ(solve_basic_lp(builders::cycle(cut, 3)).value, 1);
  EXPECT_EQ(solve_basic_lp(edge()).value, 1);
  auto r = gap_report(builders::cycle(cut, 5));
  EXPECT_EQ(r.lp_value, 1);
  EXPECT_EQ(r.csp_value, Rational(4, 5));
  EXPECT_TRUE(r.is_gap(1, Rational(4, 5)));
  EXPECT_FALSE(r.is_gap(1, Rational(1, 2)));
}

TEST(BasicLp, SolverMatchesVertexEnumerationOnTinyInstances) {
  auto fam = families::dicut();
  InstanceStream s({fam, 2, 3, 3, StreamMode::exhaustive, 0, false});
  int checked = 0;
  while (auto inst = s.next()) {
    if (inst->n() == 3 && inst->m() > 2) continue;  // keep the oracle's basis count small
    auto lp = build_basic_lp(*inst);
    auto o = vertex_enum_oracle(lp);
    ASSERT_EQ(o.status, LpStatus::optimal);
    EXPECT_EQ(solve_basic_lp(*inst).value, o.value);
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

TEST(BasicLp, TriangleMatchesVertexEnumeration) {
  auto tri = builders::cycle(families::cut(), 3);
  auto o = vertex_enum_oracle(build_basic_lp(tri), 50'000'000);
  EXPECT_EQ(o.value, 1);
}

TEST(BasicLp, DominatesCspOptimum) {
  for (auto fam : {families::cut(), families::dicut()}) {
    InstanceStream s({fam, 2, 6, 10, StreamMode::random, 17, false});
    for (int t = 0; t < 60; ++t) {
      auto inst = *s.next();
      auto r = gap_report(inst);
      EXPECT_GE(r.lp_value, r.csp_value);
    }
  }
}

TEST(BasicLp, ObjectiveIsWeightedAverage) {
  auto cut = families::cut();
  Instance inst(cut, 3, {{0, {0, 1}, 3}, {0, {1, 2}, 1}});
  auto sol = point_mass_solution(inst, {{0, 1, 1}});
  // Constraint 1 satisfied (weight 3), constraint 2 not: 3/4.
  EXPECT_EQ(sol.value, Rational(3, 4));
  EXPECT_EQ(sol.value, csp_value(inst, {{0, 1, 1}}));
}

TEST(BasicLp, WeightsEqualRepetition) {
  auto dicut = families::dicut();
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<Constraint> cs;
    const int n = 4;
    for (int c = 0; c < 5; ++c) {
      int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % (n - 1));
      if (b >= a) ++b;
      cs.push_back({0, {a, b}, static_cast<std::int64_t>(1 + rng() % 3)});
    }
    Instance w(dicut, n, cs);
    EXPECT_EQ(solve_basic_lp(w).value, solve_basic_lp(unweighted(w)).value);
  }
}

TEST(BasicLp, PointMassEmbedsAssignments) {
  auto c5 = builders::cycle(families::cut(), 5);
  for (int idx = 0; idx < 32; ++idx) {
    Assignment a{std::vector<int>(5)};
    for (int i = 0; i < 5; ++i) a.values[static_cast<std::size_t>(i)] = idx >> i & 1;
    auto sol = point_mass_solution(c5, a);
    EXPECT_EQ(sol.value, csp_value(c5, a));
    EXPECT_FALSE(check_local_solution(c5, sol).has_value());
  }
}

TEST(BasicLp, EncodeDecodeRoundTrip) {
  auto c5 = builders::cycle(families::cut(), 5);
  auto sol = solve_basic_lp(c5);
  auto x = encode_basic_lp(c5, sol);
  EXPECT_TRUE(is_primal_feasible(build_basic_lp(c5), x));
  auto back = decode_basic_lp(c5, x);
  EXPECT_EQ(back.local, sol.local);
  EXPECT_EQ(back.marginals, sol.marginals);
  EXPECT_EQ(back.value, sol.value);
}

TEST(BasicLp, PerturbationBreaksConsistency) {
  auto c5 = builders::cycle(families::cut(), 5);
  auto sol = solve_basic_lp(c5);
  auto bad = sol;
  bad.local[0][1] += Rational(1, 1000);
  bad.local[0][2] -= Rational(1, 1000);
  EXPECT_TRUE(check_local_solution(c5, bad).has_value());
  bad = sol;
  bad.value = Rational(999, 1000);
  EXPECT_TRUE(check_local_solution(c5, bad).has_value());
  bad = sol;
  bad.local[0][0] = Rational(-1, 2);
  EXPECT_TRUE(check_local_solution(c5, bad).has_value());
}

TEST(OnewiseLp, CutInstancesReachOne) {
  auto cut = families::cut();
  auto w = onewise_support((*cut)[0], 2, 2);
  ASSERT_TRUE(w.witness);
  InstanceStream s({cut, 2, 8, 12, StreamMode::random, 5, false});
  for (int t = 0; t < 30; ++t) {
    auto inst = *s.next();
    auto sol = lp_from_onewise(inst, {{"cut", *w.witness}});
    EXPECT_EQ(sol.value, 1);
    EXPECT_FALSE(check_local_solution(inst, sol).has_value());
  }
  EXPECT_THROW(lp_from_onewise(edge(), {}), ValidationError);
}

TEST(WidthLp, DicutReachesHalf) {
  auto dicut = families::dicut();
  InstanceStream s({dicut, 2, 7, 12, StreamMode::random, 8, false});
  for (int t = 0; t < 30; ++t) {
    auto inst = *s.next();
    auto sol = lp_from_width(inst);
    EXPECT_EQ(sol.value, Rational(1, 2));
    EXPECT_FALSE(check_local_solution(inst, sol).has_value());
    EXPECT_GE(solve_basic_lp(inst).value, Rational(1, 2));
  }
}

TEST(WidthLp, WideFamilyGivesOne) {
  auto cut = families::cut();
  auto sol = lp_from_width(builders::cycle(cut, 7));
  EXPECT_EQ(sol.value, 1);
}
