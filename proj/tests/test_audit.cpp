#include <gtest/gtest.h>

#include <random>

#include "doobkit/audit.hpp"
#include "doobkit/conditional.hpp"
#include "doobkit/error.hpp"
#include "doobkit/generators.hpp"
#include "fixtures.hpp"

namespace doobkit {
namespace {

AuditInstance fixture_b_instance() {
  return {testing::fixture_b_space(), testing::fixture_b_family(), testing::fixture_b_xi(), std::nullopt};
}

// Largest E^{P_j}{Phi_1|F_0} - Phi_0 with Phi the envelope, by direct summation.
double brute_force_tmars5_m1(const AuditInstance& in) {
  const FilteredSpace& s = in.space;
  std::vector<double> phi1(s.n_atoms(), -1e300);
  double phi0 = -1e300;
  for (const Measure& p : in.family) {
    phi0 = std::max(phi0, p.expectation(in.xi));
    for (std::size_t a = 0; a < s.n_atoms(); ++a) {
      const Cell& cell = s.cell(1, s.cell_of(1, a));
      double num = 0.0, den = 0.0;
      for (std::size_t b : cell) {
        num += p[b] * in.xi[b];
        den += p[b];
      }
      phi1[a] = std::max(phi1[a], num / den);
    }
  }
  double worst = 0.0;
  for (const Measure& p : in.family) {
    double e = 0.0;
    for (std::size_t a = 0; a < s.n_atoms(); ++a) e += p[a] * phi1[a];
    worst = std::max(worst, e - phi0);
  }
  return worst;
}

TEST(Audit, ParseClaim) {
  for (ClaimId id : kAllClaims) EXPECT_EQ(parse_claim(to_string(id)), id);
  try {
    parse_claim("lemma-zz");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownClaim);
  }
}

TEST(Audit, FixtureBCounterexamples) {
  const AuditInstance in = fixture_b_instance();
  const AuditResult t = audit(ClaimId::lemma_tmars5, in);
  EXPECT_EQ(t.verdict, Verdict::counterexample);
  EXPECT_NEAR(t.violation, 0.06, 1e-10);
  EXPECT_NEAR(brute_force_tmars5_m1(in), 0.06, 1e-12);

  const AuditResult f = audit(ClaimId::thm_fmars5, in);
  EXPECT_EQ(f.verdict, Verdict::counterexample);
  EXPECT_NEAR(f.violation, 0.12, 1e-10);

  EXPECT_EQ(audit(ClaimId::lemma_q5, in).verdict, Verdict::counterexample);
  EXPECT_NEAR(replay(t), 0.0, 1e-10);
  EXPECT_NEAR(replay(f), 0.0, 1e-10);
}

TEST(Audit, PreconditionsAreReported) {
  AuditInstance in = fixture_b_instance();
  in.xi = RandomVariable({2, 0, 0, 0});
  try {
    audit(ClaimId::thm_fmars5, in);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ClaimPreconditionUnmet);
  }
  in.xi = RandomVariable({-1, 1, 1, 1});
  EXPECT_THROW(audit(ClaimId::lemma_tmars5, in), Error);
}

TEST(Audit, Q5PassesOnSingletonFamilies) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 200; ++t) {
    const FilteredSpace s = gen::random_space(rng, {2, 8, 3, true});
    const MeasureFamily fam = gen::random_family(rng, s.n_atoms(), 1);
    const AuditInstance in{s, fam, gen::random_variable(rng, s.n_atoms()), std::nullopt};
    const AuditResult r = audit(ClaimId::lemma_q5, in);
    EXPECT_EQ(r.verdict, Verdict::pass) << "trial " << t << ": " << r.detail;
    EXPECT_LE(r.violation, 1e-9);
  }
}

TEST(Audit, Q5PassesOnPastingStableFamilies) {
  std::mt19937_64 rng(18);
  for (int t = 0; t < 100; ++t) {
    const FilteredSpace s = gen::random_space(rng, {2, 8, 3, true});
    const MeasureFamily fam = gen::product_family(s, rng);
    const AuditInstance in{s, fam, gen::random_variable(rng, s.n_atoms()), std::nullopt};
    EXPECT_EQ(audit(ClaimId::lemma_q5, in).verdict, Verdict::pass) << "trial " << t;
    EXPECT_EQ(audit(ClaimId::lemma_tmars5, in).verdict, Verdict::pass) << "trial " << t;
  }
}

TEST(Search, BudgetZeroIsAnError) {
  try {
    search_counterexample(ClaimId::lemma_q5, 0, 1);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadBudget);
  }
}

TEST(Search, FindsTmars5Counterexample) {
  const AuditResult r = search_counterexample(ClaimId::lemma_tmars5, 1000, 7);
  ASSERT_EQ(r.verdict, Verdict::counterexample);
  ASSERT_TRUE(r.instance);
  EXPECT_LE(r.trials, 1000u);
  EXPECT_NEAR(replay(r), 0.0, 1e-10);
  // The shrunk witness still violates the claim.
  EXPECT_GT(audit(r.claim, *r.instance).violation, 1e-9);
}

TEST(Search, SingletonQ5NeverFails) {
  const AuditResult r = search_counterexample(ClaimId::lemma_q5, 300, 3, {8, 3, 1, 1});
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_EQ(r.trials, 300u);
}

TEST(Search, Deterministic) {
  const AuditResult a = search_counterexample(ClaimId::thm_fmars5, 200, 99);
  const AuditResult b = search_counterexample(ClaimId::thm_fmars5, 200, 99);
  EXPECT_EQ(a.verdict, b.verdict);
  EXPECT_EQ(a.violation, b.violation);
  EXPECT_EQ(a.trials, b.trials);
}

TEST(SearchProperty, WitnessesReplay) {
  for (ClaimId id : kAllClaims) {
    const AuditResult r = search_counterexample(id, 300, 5);
    if (r.verdict == Verdict::counterexample) {
      ASSERT_TRUE(r.instance);
      EXPECT_NEAR(replay(r), 0.0, 1e-10) << to_string(id);
      EXPECT_GT(audit(id, *r.instance).violation, 1e-9) << to_string(id);
    }
  }
}

TEST(DropAtom, RenormalizesAndKeepsStructure) {
  const AuditInstance in = fixture_b_instance();
  const AuditInstance out = drop_atom(in, 0);
  EXPECT_EQ(out.space.n_atoms(), 3u);
  EXPECT_EQ(out.xi.values, (std::vector<double>{0.8, 1.2, 0.8}));
  double total = 0.0;
  for (double p : out.family[1].probs()) total += p;
  EXPECT_NEAR(total, 1.0, 1e-15);
}

}  // namespace
}  // namespace doobkit
