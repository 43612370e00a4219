#include <gtest/gtest.h>

#include "cspgap/dichotomy.hpp"
#include "cspgap/families.hpp"

using namespace cspgap;

namespace {

PairDistribution uniform_over(const FamilyPtr& fam, const std::vector<std::pair<std::size_t, std::string>>& atoms) {
  PairDistribution d(fam);
  for (const auto& [f, t] : atoms)
    d.at(f, encode_tuple(parse_tuple_string(t, fam->q()), fam->q())) += Rational(Integer(1), Integer(atoms.size()));
  return d;
}

PairDistribution uniform_all(const FamilyPtr& fam) {
  PairDistribution d(fam);
  for (auto& v : d.mass) v = Rational(Integer(1), Integer(d.mass.size()));
  return d;
}

SymbolKernel binary_kernel(Rational p0, Rational p1) {
  SymbolKernel k;
  k.rows = {{1 - p0, p0}, {1 - p1, p1}};
  return k;
}

FamilyPtr family_of(std::vector<Predicate> preds, int q = 2, int k = 2) {
  return std::make_shared<const PredicateFamily>(q, k, std::move(preds));
}

Predicate table(std::string name, std::vector<std::uint8_t> t) { return Predicate{std::move(name), std::move(t)}; }

// Random distribution with small integer weights.
PairDistribution random_distribution(const FamilyPtr& fam, std::mt19937_64& rng) {
  PairDistribution d(fam);
  std::int64_t total = 0;
  std::vector<std::int64_t> w(d.mass.size());
  for (auto& x : w) total += (x = static_cast<std::int64_t>(rng() % 4));
  if (total == 0) w[0] = total = 1;
  for (std::size_t i = 0; i < w.size(); ++i) d.mass[i] = Rational(Integer(w[i]), Integer(total));
  return d;
}

}  // namespace

TEST(Marginals, Examples) {
  auto cut = families::cut();
  auto point = uniform_over(cut, {{0, "01"}});
  auto mu = marginal_vector(point);
  EXPECT_EQ(mu.at(0, 0, 0), 1);
  EXPECT_EQ(mu.at(0, 1, 1), 1);
  EXPECT_EQ(mu.at(0, 0, 1), 0);
  EXPECT_EQ(mu.at(0, 1, 0), 0);

  auto half = marginal_vector(uniform_over(cut, {{0, "01"}, {0, "10"}}));
  for (const auto& v : half.entries) EXPECT_EQ(v, Rational(1, 2));
  for (const auto& v : marginal_vector(uniform_all(cut)).entries) EXPECT_EQ(v, Rational(1, 2));
}

TEST(Marginals, SlicesSumToPredicateMass) {
  auto fam = family_of({table("a", {0, 1, 1, 0}), table("b", {0, 0, 1, 0})});
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    auto d = random_distribution(fam, rng);
    auto mu = marginal_vector(d);
    for (std::size_t f = 0; f < 2; ++f) {
      Rational pf = 0;
      for (std::size_t a = 0; a < 4; ++a) pf += d.at(f, a);
      for (std::size_t l = 0; l < 2; ++l) EXPECT_EQ(mu.at(f, l, 0) + mu.at(f, l, 1), pf);
    }
    for (const auto& v : mu.entries) {
      EXPECT_GE(v, 0);
      EXPECT_LE(v, 1);
    }
  }
}

TEST(YesValue, Examples) {
  auto cut = families::cut();
  EXPECT_EQ(yes_value(uniform_over(cut, {{0, "01"}, {0, "10"}})), 1);
  EXPECT_EQ(yes_value(uniform_all(cut)), Rational(1, 2));
  EXPECT_EQ(yes_value(uniform_over(cut, {{0, "11"}})), 0);
}

TEST(NoValue, IdentityKernelGivesYesValue) {
  auto fam = family_of({table("a", {0, 1, 1, 1}), table("b", {1, 0, 0, 0})});
  std::mt19937_64 rng(8);
  for (int t = 0; t < 40; ++t) {
    auto d = random_distribution(fam, rng);
    EXPECT_EQ(no_value(d, SymbolKernel::identity(2)), yes_value(d));
  }
}

TEST(NoValue, UniformCutFormula) {
  // Expanding Pr[b1 != b2] over the four equally likely (a1, a2): 2 pbar (1 - pbar).
  auto d = uniform_all(families::cut());
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 4; ++j) {
      Rational p0(i, 4), p1(j, 4);
      Rational pbar = (p0 + p1) / 2;
      EXPECT_EQ(no_value(d, binary_kernel(p0, p1)), 2 * pbar * (1 - pbar));
    }
}

TEST(NoValue, UniformKernelForgetsTuples) {
  auto fam = family_of({table("a", {0, 1, 1, 1}), table("b", {1, 0, 0, 0})});
  std::mt19937_64 rng(9);
  for (int t = 0; t < 40; ++t) {
    auto d = random_distribution(fam, rng);
    Rational expected = 0;
    for (std::size_t f = 0; f < 2; ++f) {
      Rational pf = 0;
      for (std::size_t a = 0; a < 4; ++a) pf += d.at(f, a);
      expected += pf * Rational(Integer((*fam)[f].support_size()), Integer(4));
    }
    EXPECT_EQ(no_value(d, SymbolKernel::uniform(2)), expected);
  }
}

TEST(NoValue, RejectsInvalidKernel) {
  auto d = uniform_all(families::cut());
  EXPECT_THROW(no_value(d, binary_kernel(Rational(3, 2), 0)), ValidationError);
}

TEST(NoSup, Examples) {
  auto cut = families::cut();
  EXPECT_EQ(no_sup_search(uniform_all(cut), 2000, 0).bound, Rational(1, 2));
  EXPECT_EQ(no_sup_search(uniform_over(cut, {{0, "01"}}), 500, 0).bound, 1);
}

TEST(NoSup, LowerBoundProperties) {
  auto fam = family_of({table("a", {0, 1, 1, 0}), table("b", {0, 0, 1, 0})});
  std::mt19937_64 rng(10);
  for (int t = 0; t < 15; ++t) {
    auto d = random_distribution(fam, rng);
    auto r = no_sup_search(d, 1500, static_cast<std::uint64_t>(t));
    EXPECT_GE(r.bound, yes_value(d));
    EXPECT_EQ(r.bound, no_value(d, r.kernel));
    EXPECT_FALSE(check_kernel(r.kernel, 2).has_value());
    EXPECT_LE(r.evaluations, 1500u);
    auto again = no_sup_search(d, 1500, static_cast<std::uint64_t>(t));
    EXPECT_EQ(again.bound, r.bound);
    EXPECT_EQ(again.kernel, r.kernel);
  }
}

TEST(NoSup, FindsInteriorMaximum) {
  // f(b) = [b = (0,1)] on a point mass at (0,0): sup over P_0 of P_0(0) P_0(1) is 1/4 at P_0 = (1/2, 1/2).
  auto fam = family_of({table("e", {0, 1, 0, 0})});
  auto d = uniform_over(fam, {{0, "00"}});
  EXPECT_EQ(no_sup_search(d, 3000, 1).bound, Rational(1, 4));
}

TEST(Construct, C5WithOnewiseSolution) {
  auto cut = families::cut();
  auto c5 = builders::cycle(cut, 5);
  auto w = onewise_support((*cut)[0], 2, 2);
  auto sol = lp_from_onewise(c5, {{"cut", *w.witness}});
  auto yn = construct_yes_no(c5, sol);
  EXPECT_EQ(yn.yes, uniform_over(cut, {{0, "01"}, {0, "10"}}));
  EXPECT_EQ(yn.no, uniform_all(cut));
  for (const auto& v : yn.marginals.entries) EXPECT_EQ(v, Rational(1, 2));
  EXPECT_EQ(yes_value(yn.yes), 1);
  EXPECT_EQ(yn.falsifier.bound, Rational(1, 2));
}

TEST(Construct, TriangleWithOnewiseSolution) {
  auto cut = families::cut();
  auto tri = builders::cycle(cut, 3);
  auto w = onewise_support((*cut)[0], 2, 2);
  auto yn = construct_yes_no(tri, lp_from_onewise(tri, {{"cut", *w.witness}}));
  EXPECT_EQ(yn.no, uniform_all(cut));
  EXPECT_EQ(yn.falsifier.bound, Rational(1, 2));
  EXPECT_LE(yn.falsifier.bound, Rational(2, 3));
}

TEST(Construct, PointMassSolutionGivesEqualDistributions) {
  auto dicut = families::dicut();
  Instance inst(dicut, 4, {{0, {0, 1}, 2}, {0, {1, 2}, 1}, {0, {3, 2}, 1}});
  auto yn = construct_yes_no(inst, point_mass_solution(inst, {{1, 0, 1, 0}}));
  EXPECT_EQ(yn.yes, yn.no);
}

TEST(Construct, RejectsInvalidSolution) {
  auto c5 = builders::cycle(families::cut(), 5);
  auto sol = solve_basic_lp(c5);
  sol.local[0][1] += Rational(1, 1000);
  EXPECT_THROW(construct_yes_no(c5, sol), ValidationError);
}

TEST(Construct, FalsificationAcrossInstancesAndSeeds) {
  auto tern = std::make_shared<const PredicateFamily>(
      3, 2, std::vector{families::tabulate("neq", 3, 2, [](const std::vector<int>& a) { return a[0] != a[1]; }),
                        families::tabulate("lt", 3, 2, [](const std::vector<int>& a) { return a[0] < a[1]; })});
  for (auto fam : {families::cut(), families::dicut(), FamilyPtr(tern)}) {
    InstanceStream s({fam, 2, 5, 8, StreamMode::random, 21, false});
    for (int t = 0; t < 12; ++t) {
      auto inst = *s.next();
      auto sol = solve_basic_lp(inst);
      ConstructOptions opt;
      opt.seeds = {0, 1, 2, 3};
      opt.no_sup_budget = 800;
      auto yn = construct_yes_no(inst, sol, opt);
      EXPECT_EQ(marginal_vector(yn.yes), marginal_vector(yn.no));
      EXPECT_EQ(yes_value(yn.yes), sol.value);
      EXPECT_LE(yn.falsifier.bound, brute_force_opt(inst).value);
    }
  }
}

TEST(InstanceRoute, MatchesDistributionRoute) {
  auto dicut = families::dicut();
  InstanceStream s({dicut, 3, 5, 7, StreamMode::random, 2, false});
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    auto inst = *s.next();
    auto sol = solve_basic_lp(inst);
    auto yn = construct_yes_no(inst, sol, {std::nullopt, {0}, 200});
    auto k = binary_kernel(Rational(static_cast<std::int64_t>(rng() % 7), 6), Rational(static_cast<std::int64_t>(rng() % 7), 6));
    EXPECT_EQ(no_value(yn.no, k), instance_route_no_value(inst, sol.marginals, k));
  }
}

TEST(Onewise, Examples) {
  auto cut = families::cut();
  auto w = onewise_support((*cut)[0], 2, 2);
  ASSERT_TRUE(w.witness);
  EXPECT_EQ(*w.witness, (std::vector<Rational>{0, Rational(1, 2), Rational(1, 2), 0}));

  auto dicut = families::dicut();
  auto r = onewise_support((*dicut)[0], 2, 2);
  EXPECT_FALSE(r.witness);
  EXPECT_TRUE(is_farkas_certificate(r.system, r.farkas));

  auto one = families::constant_one(3, 2);
  auto u = onewise_support((*one)[0], 3, 2);
  ASSERT_TRUE(u.witness);
  for (const auto& v : *u.witness) EXPECT_EQ(v, Rational(1, 9));
}

TEST(Onewise, LpWitnessWhenUniformSupportFails) {
  // OR: uniform on {01, 10, 11} has first marginal (1/3, 2/3); the LP finds 01/10.
  Predicate orp = table("or", {0, 1, 1, 1});
  auto w = onewise_support(orp, 2, 2);
  ASSERT_TRUE(w.witness);
  EXPECT_TRUE(is_onewise_witness(orp, 2, 2, *w.witness));
}

TEST(Onewise, DecisionsMatchDirectCheckOnAllBinaryPredicates) {
  // Over q = k = 2 a witness exists iff some mixture of satisfying tuples has
  // both marginals 1/2: {01,10} or {00,11} inside the support suffices and is necessary.
  for (int bits = 0; bits < 16; ++bits) {
    Predicate f{"p", {static_cast<std::uint8_t>(bits >> 3 & 1), static_cast<std::uint8_t>(bits >> 2 & 1),
                      static_cast<std::uint8_t>(bits >> 1 & 1), static_cast<std::uint8_t>(bits & 1)}};
    const bool expected = (f.table[1] && f.table[2]) || (f.table[0] && f.table[3]);
    auto r = onewise_support(f, 2, 2);
    EXPECT_EQ(r.witness.has_value(), expected) << bits;
    if (r.witness) EXPECT_TRUE(is_onewise_witness(f, 2, 2, *r.witness));
    else EXPECT_TRUE(is_farkas_certificate(r.system, r.farkas));
  }
}

TEST(Classification, Examples) {
  const Rational eps(1, 1024);
  EXPECT_EQ(support_classification(families::cut(), eps).kind, SupportKind::strong);
  EXPECT_EQ(support_classification(families::dicut(), eps).kind, SupportKind::none);
  EXPECT_EQ(support_classification(families::constant_one(), eps).kind, SupportKind::strong);
}

TEST(Classification, WeakUnknownAndProvenNone) {
  const Rational eps(1, 1024);
  ClassificationOptions opt;
  opt.n_max = 4;
  opt.rho_budget = 300;
  // EQ supports one-wise independence, [a1 = 0] does not; all-zeros satisfies both.
  auto weak = family_of({table("eq", {1, 0, 0, 1}), table("first0", {1, 1, 0, 0})});
  auto w = support_classification(weak, eps, opt);
  EXPECT_EQ(w.kind, SupportKind::weak);
  EXPECT_EQ(w.subfamily, (std::vector<std::size_t>{0}));

  // rho({cut, first1}) = 1/2 = rho({cut}), but no finite Cut instance certifies 1/2 from above.
  auto open = family_of({table("cut", {0, 1, 1, 0}), table("first1", {0, 0, 1, 1})});
  EXPECT_EQ(support_classification(open, eps, opt).kind, SupportKind::unknown);

  // {cut, dicut}: rho({cut}) >= 1/2 exceeds the DiCut-only upper bound.
  auto none = family_of({table("cut", {0, 1, 1, 0}), table("dicut", {0, 0, 1, 0})});
  EXPECT_EQ(support_classification(none, eps, opt).kind, SupportKind::none);
}
