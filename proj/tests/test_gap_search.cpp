#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>

#include "cspgap/gap_search.hpp"
#include "cspgap/families.hpp"
#include "cspgap/io.hpp"

using namespace cspgap;

namespace {

SearchConfig cut_config(Rational beta, int n_max = 5, std::size_t m_max = 5) {
  SearchConfig cfg;
  cfg.family = families::cut();
  cfg.n_min = 2;
  cfg.n_max = n_max;
  cfg.max_constraints = m_max;
  cfg.gamma = 1;
  cfg.beta = beta;
  cfg.falsifier_seeds = 4;
  cfg.no_sup_budget = 1000;
  return cfg;
}

}  // namespace

TEST(SearchConfig, Validation) {
  auto cfg = cut_config(Rational(4, 5));
  EXPECT_NO_THROW(cfg.validate());
  cfg.beta = 1;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = cut_config(Rational(-1, 5));
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = cut_config(0);
  cfg.n_min = 1;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = cut_config(0);
  cfg.budget = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(Search, FindsFiveCycleGap) {
  auto r = search_gap(cut_config(Rational(4, 5)));
  ASSERT_TRUE(r.certificate);
  EXPECT_EQ(r.certificate->lp_value, 1);
  EXPECT_LE(r.certificate->csp_value, Rational(4, 5));
  EXPECT_EQ(verify_certificate(*r.certificate).outcome, VerifyOutcome::pass);
}

TEST(Search, NoInstanceBelowOneHalf) {
  auto r = search_gap(cut_config(0, 4, 4));
  EXPECT_FALSE(r.certificate);
  EXPECT_TRUE(r.stream_exhausted);
  EXPECT_GT(r.stats.evaluated, 0u);
}

TEST(Search, SingleConstraintIsNeverAGap) {
  auto cfg = cut_config(Rational(99, 100), 4, 1);
  cfg.family = families::dicut();
  EXPECT_FALSE(search_gap(cfg).certificate);
}

TEST(Search, BudgetExhaustionIsReported) {
  auto cfg = cut_config(Rational(4, 5));
  cfg.budget = 10;
  auto r = search_gap(cfg);
  EXPECT_FALSE(r.certificate);
  EXPECT_FALSE(r.stream_exhausted);
  EXPECT_EQ(r.stats.evaluated, 10u);
}

TEST(Search, FirstHitIsEarliestInStreamOrder) {
  auto cfg = cut_config(Rational(4, 5));
  auto r = search_gap(cfg);
  ASSERT_TRUE(r.certificate);
  auto stream = enumerate_instances(cfg);
  while (auto inst = stream.next()) {
    auto g = gap_report(*inst);
    if (g.is_gap(cfg.gamma, cfg.beta)) {
      EXPECT_EQ(*inst, r.certificate->instance);
      break;
    }
  }
}

TEST(Search, MaximizeGapKeepsLargestEarliest) {
  auto cfg = cut_config(Rational(4, 5), 5, 6);
  cfg.maximize_gap = true;
  cfg.up_to_renaming = true;
  auto r = search_gap(cfg);
  ASSERT_TRUE(r.certificate);
  std::optional<Rational> best;
  std::optional<Instance> first;
  auto stream = enumerate_instances(cfg);
  while (auto inst = stream.next()) {
    auto g = gap_report(*inst);
    if (!g.is_gap(cfg.gamma, cfg.beta)) continue;
    if (!best || g.lp_value - g.csp_value > *best) {
      best = g.lp_value - g.csp_value;
      first = *inst;
    }
  }
  ASSERT_TRUE(best);
  EXPECT_EQ(r.certificate->lp_value - r.certificate->csp_value, *best);
  EXPECT_EQ(r.certificate->instance, *first);
}

TEST(Search, ThreadCountDoesNotChangeCertificate) {
  auto cfg = cut_config(Rational(4, 5), 5, 6);
  cfg.maximize_gap = true;
  cfg.up_to_renaming = true;
  setenv("CSPGAP_THREADS", "1", 1);
  auto a = io::dump(io::certificate_to_json(*search_gap(cfg).certificate));
  setenv("CSPGAP_THREADS", "5", 1);
  auto b = io::dump(io::certificate_to_json(*search_gap(cfg).certificate));
  unsetenv("CSPGAP_THREADS");
  EXPECT_EQ(a, b);
}

TEST(Search, RandomModeIsDeterministic) {
  auto cfg = cut_config(Rational(4, 5), 5, 7);
  cfg.mode = StreamMode::random;
  cfg.seed = 12;
  auto a = search_gap(cfg);
  auto b = search_gap(cfg);
  ASSERT_EQ(a.certificate.has_value(), b.certificate.has_value());
  EXPECT_EQ(a.stats.evaluated, b.stats.evaluated);
  if (a.certificate) EXPECT_EQ(io::dump(io::certificate_to_json(*a.certificate)), io::dump(io::certificate_to_json(*b.certificate)));
}

TEST(Verify, DetectsTampering) {
  auto r = search_gap(cut_config(Rational(4, 5)));
  ASSERT_TRUE(r.certificate);
  const auto& good = *r.certificate;

  auto c = good;
  c.solution.local[0][1] += Rational(1, 1000);
  EXPECT_EQ(verify_certificate(c).outcome, VerifyOutcome::fail);

  c = good;
  c.marginals.at(0, 0, 0) += Rational(1, 1000);
  auto rep = verify_certificate(c);
  EXPECT_EQ(rep.outcome, VerifyOutcome::fail);
  EXPECT_EQ(rep.clause, "marginal mismatch at (cut,1,0)");

  c = good;
  c.csp_value = Rational(3, 5);
  EXPECT_EQ(verify_certificate(c).outcome, VerifyOutcome::fail);

  c = good;
  c.no_sup_bound = Rational(1, 3);
  EXPECT_EQ(verify_certificate(c).outcome, VerifyOutcome::fail);

  c = good;
  std::fill(c.csp_witness.values.begin(), c.csp_witness.values.end(), 0);
  EXPECT_EQ(verify_certificate(c).outcome, VerifyOutcome::fail);
}

TEST(Verify, BruteForceOverBudgetIsPartialPass) {
  auto r = search_gap(cut_config(Rational(4, 5)));
  ASSERT_TRUE(r.certificate);
  auto c = *r.certificate;
  c.brute_force_budget = 4;
  auto rep = verify_certificate(c);
  EXPECT_EQ(rep.outcome, VerifyOutcome::pass_except_csp_bound);
  EXPECT_TRUE(rep.ok());
}

TEST(Enumerated, StrongFamilyAlwaysReachesOne) {
  auto cfg = cut_config(0, 4, 4);
  auto s = enumerate_instances(cfg);
  while (auto inst = s.next()) EXPECT_EQ(solve_basic_lp(*inst).value, 1);
}

TEST(Enumerated, LpValueAtLeastWidth) {
  auto cfg = cut_config(0, 4, 3);
  cfg.family = std::make_shared<const PredicateFamily>(
      3, 2, std::vector{families::tabulate("lt", 3, 2, [](const std::vector<int>& a) { return a[0] < a[1]; }),
                        families::tabulate("sum1", 3, 2, [](const std::vector<int>& a) { return (a[0] + a[1]) % 3 == 1; })});
  const auto w = width(*cfg.family).value;
  auto s = enumerate_instances(cfg);
  int count = 0;
  while (auto inst = s.next()) {
    EXPECT_GE(solve_basic_lp(*inst).value, w);
    ++count;
  }
  EXPECT_GT(count, 100);
}
