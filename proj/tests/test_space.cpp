#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "doobkit/conditional.hpp"
#include "doobkit/error.hpp"
#include "doobkit/generators.hpp"
#include "fixtures.hpp"

namespace doobkit {
namespace {

using testing::fixture_b_family;
using testing::fixture_b_space;
using testing::max_abs_diff;

const RandomVariable kXi({1, 3, 2, 6});

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

// Brute-force E^P{xi|F_m}: scan every atom pair.
std::vector<double> oracle_cond_exp(const FilteredSpace& s, const RandomVariable& xi, std::span<const double> p, int m) {
  std::vector<double> out(s.n_atoms());
  for (std::size_t a = 0; a < s.n_atoms(); ++a) {
    double num = 0.0, den = 0.0;
    for (std::size_t b = 0; b < s.n_atoms(); ++b)
      if (s.cell_of(m, a) == s.cell_of(m, b)) {
        num += p[b] * xi[b];
        den += p[b];
      }
    out[a] = num / den;
  }
  return out;
}

TEST(FilteredSpace, FixturesBuild) {
  const FilteredSpace b = fixture_b_space();
  EXPECT_EQ(b.horizon(), 2);
  EXPECT_EQ(b.cell_count(1), 2u);
  EXPECT_TRUE(b.atom_fine(2));
  const FilteredSpace a = testing::fixture_a_space();
  EXPECT_EQ(a.horizon(), 1);
  EXPECT_EQ(a.cell_count(1), 3u);
}

TEST(FilteredSpace, StructuralErrors) {
  EXPECT_EQ(code_of([] { FilteredSpace::build(3, {{{0, 1}}, {{0}, {1}, {2}}}); }), ErrorCode::BadCover);
  EXPECT_EQ(code_of([] { FilteredSpace::build(3, {{{0}, {1, 2}}, {{0}, {1}, {2}}}); }),
            ErrorCode::TrivialRootMissing);
  EXPECT_EQ(code_of([] { FilteredSpace::build(3, {{{0, 1, 2}}, {{0, 1}, {2}}, {{0, 2}, {1}}}); }),
            ErrorCode::NonRefining);
  EXPECT_EQ(code_of([] { FilteredSpace::build(3, {{{0, 1, 2}}, {{0, 1}, {1, 2}}}); }), ErrorCode::BadCover);
}

TEST(FilteredSpace, CanonicalCellOrder) {
  const FilteredSpace s = FilteredSpace::build(4, {{{3, 2, 1, 0}}, {{3, 1}, {2, 0}}, {{3}, {2}, {1}, {0}}});
  EXPECT_EQ(s.cell(1, 0), (Cell{0, 2}));
  EXPECT_EQ(s.cell(1, 1), (Cell{1, 3}));
  EXPECT_EQ(s.predecessor(2, 3), 1u);
}

TEST(Measure, Validation) {
  EXPECT_EQ(code_of([] { Measure({0.5, 0.5, 0.0}); }), ErrorCode::BadMeasure);
  EXPECT_EQ(code_of([] { Measure({0.5, 0.6}); }), ErrorCode::BadMeasure);
  EXPECT_EQ(code_of([] { MeasureFamily({Measure({0.5, 0.5}), Measure({0.5, 0.5})}); }),
            ErrorCode::DuplicateExtreme);
  EXPECT_EQ(code_of([] { MeasureFamily({Measure({0.5, 0.5}), Measure({0.2, 0.3, 0.5})}); }),
            ErrorCode::ShapeMismatch);
}

TEST(AdaptedProcess, MeasurabilityAndShape) {
  const FilteredSpace s = fixture_b_space();
  EXPECT_EQ(code_of([&] { AdaptedProcess(s, {{1}, {1, 2, 3}, {1, 2, 3, 4}}); }), ErrorCode::ShapeMismatch);
  const std::vector<RandomVariable> bad{RandomVariable::constant(4, 1), RandomVariable({1, 2, 3, 3}),
                                        RandomVariable({1, 2, 3, 4})};
  EXPECT_EQ(code_of([&] { AdaptedProcess::from_atoms(s, bad); }), ErrorCode::NotMeasurable);
  EXPECT_FALSE(is_measurable(s, RandomVariable({1, 2, 3, 3}), 1));
  EXPECT_TRUE(is_measurable(s, RandomVariable({1, 1, 3, 3}), 1));
}

TEST(CondExp, FixtureValues) {
  const FilteredSpace s = fixture_b_space();
  const MeasureFamily fam = fixture_b_family();
  EXPECT_LT(max_abs_diff(cond_exp(s, kXi, fam[0], 1).values, {2, 2, 4, 4}), 1e-12);
  EXPECT_LT(max_abs_diff(cond_exp(s, kXi, fam[1], 1).values, {1.4, 1.4, 5.2, 5.2}), 1e-12);
  EXPECT_LT(max_abs_diff(cond_exp(s, kXi, fam[1], 2).values, kXi.values), 1e-15);
  EXPECT_NEAR(cond_exp(s, kXi, fam[0], 0)[0], 3.0, 1e-12);
}

TEST(CondExp, MixtureFixtureValues) {
  const FilteredSpace s = fixture_b_space();
  const MeasureFamily fam = fixture_b_family();
  const std::vector<double> half{0.5, 0.5};
  EXPECT_NEAR(cond_exp_mixture(s, kXi, fam, half, 1)[0], 1.7, 1e-12);
  const std::vector<double> first{1.0, 0.0};
  EXPECT_LT(max_abs_diff(cond_exp_mixture(s, kXi, fam, first, 1).values, {2, 2, 4, 4}), 1e-12);
  const Measure q = mixture(fam, half);
  EXPECT_LT(max_abs_diff({q.probs().begin(), q.probs().end()}, {.325, .175, .175, .325}), 1e-15);
  const std::vector<double> w37{0.3, 0.7};
  const Measure q37 = mixture(fam, w37);
  double total = 0.0;
  for (double p : q37.probs()) total += p;
  EXPECT_NEAR(total, 1.0, 1e-15);
  const std::vector<double> bad{0.7, 0.7};
  EXPECT_EQ(code_of([&] { mixture(fam, bad); }), ErrorCode::BadWeights);
}

TEST(CondExp, ChangeOfMeasureAndEssSup) {
  const FilteredSpace s = fixture_b_space();
  const MeasureFamily fam = fixture_b_family();
  EXPECT_LT(max_abs_diff(cond_exp_change_of_measure(s, kXi, fam[0], fam[1], 1).values, {2, 2, 4, 4}), 1e-12);
  EXPECT_NEAR(cond_exp_change_of_measure(s, kXi, fam[1], fam[0], 0)[2], fam[1].expectation(kXi), 1e-12);
  EXPECT_LT(max_abs_diff(ess_sup_cond_exp(s, kXi, fam, 1).values, {2, 2, 5.2, 5.2}), 1e-12);
  const MeasureFamily single({fam[1]});
  EXPECT_LT(max_abs_diff(ess_sup_cond_exp(s, kXi, single, 1).values, cond_exp(s, kXi, fam[1], 1).values), 1e-15);
}

TEST(CondExp, StepCondExp) {
  const FilteredSpace s = fixture_b_space();
  const std::vector<double> x{1.2, 0.8, 1.2, 0.8};
  EXPECT_LT(max_abs_diff(step_cond_exp(s, x, fixture_b_family()[1], 2), {1.12, 0.88}), 1e-12);
  const std::vector<double> wrong{1.0};
  EXPECT_EQ(code_of([&] { step_cond_exp(s, wrong, fixture_b_family()[1], 2); }), ErrorCode::ShapeMismatch);
}

TEST(RnBounds, Fixture) {
  const RnBounds b = rn_bounds(fixture_b_family());
  EXPECT_NEAR(b.lower, 0.4, 1e-12);
  EXPECT_NEAR(b.upper, 2.5, 1e-12);
  const RnBounds one = rn_bounds(MeasureFamily({Measure({0.3, 0.7})}));
  EXPECT_EQ(one.lower, 1.0);
  EXPECT_EQ(one.upper, 1.0);
}

TEST(Contract, FixtureAndRho) {
  const FilteredSpace s = fixture_b_space();
  const MeasureFamily fam = fixture_b_family();
  EXPECT_LT(max_abs_diff(contract(s, fam[1], 1), {0.5, 0.5}), 1e-15);
  EXPECT_LT(max_abs_diff(contract(s, fam[1], 0), {1.0}), 1e-15);
  EXPECT_LT(max_abs_diff(contract(s, fam[1], 2), {0.4, 0.1, 0.1, 0.4}), 1e-15);
  EXPECT_NEAR(rho_metric(contract(s, fam[0], 1), contract(s, fam[1], 1)), 0.0, 1e-15);
  EXPECT_NEAR(rho_metric(contract(s, fam[0], 2), contract(s, fam[1], 2)), 0.6, 1e-12);
  const std::vector<double> a{0.5, 0.5}, b{1.0};
  EXPECT_EQ(code_of([&] { rho_metric(a, b); }), ErrorCode::LengthMismatch);
}

// ---------------------------------------------------------------------------
// Properties over random instances

struct Draw {
  FilteredSpace space;
  MeasureFamily family;
  RandomVariable xi;
};

Draw draw(std::mt19937_64& rng) {
  FilteredSpace s = gen::random_space(rng);
  std::uniform_int_distribution<std::size_t> k(1, 3);
  MeasureFamily fam = gen::random_family(rng, s.n_atoms(), k(rng));
  RandomVariable xi = gen::random_variable(rng, s.n_atoms(), -2.0, 3.0);
  return {std::move(s), std::move(fam), std::move(xi)};
}

TEST(CondExpProperty, MatchesBruteForce) {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 100; ++t) {
    const Draw d = draw(rng);
    for (int m = 0; m <= d.space.horizon(); ++m)
      EXPECT_LT(max_abs_diff(cond_exp(d.space, d.xi, d.family[0], m).values,
                             oracle_cond_exp(d.space, d.xi, d.family[0].probs(), m)),
                1e-12);
  }
}

TEST(CondExpProperty, Tower) {
  std::mt19937_64 rng(102);
  for (int t = 0; t < 100; ++t) {
    const Draw d = draw(rng);
    const Measure& p = d.family[d.family.size() - 1];
    for (int n = 0; n <= d.space.horizon(); ++n)
      for (int m = 0; m <= n; ++m)
        EXPECT_LT(max_abs_diff(cond_exp(d.space, cond_exp(d.space, d.xi, p, n), p, m).values,
                               cond_exp(d.space, d.xi, p, m).values),
                  1e-12);
  }
}

TEST(CondExpProperty, MixtureFormulaMatchesMixedMeasure) {
  std::mt19937_64 rng(103);
  for (int t = 0; t < 100; ++t) {
    const Draw d = draw(rng);
    const std::vector<double> w = sample_simplex(d.family.size(), rng);
    const Measure q = mixture(d.family, w);
    for (int m = 0; m <= d.space.horizon(); ++m)
      EXPECT_LT(max_abs_diff(cond_exp_mixture(d.space, d.xi, d.family, w, m).values,
                             oracle_cond_exp(d.space, d.xi, q.probs(), m)),
                1e-12);
  }
}

TEST(CondExpProperty, ChangeOfMeasureMatchesDirect) {
  std::mt19937_64 rng(104);
  for (int t = 0; t < 100; ++t) {
    const Draw d = draw(rng);
    const Measure& target = d.family[0];
    const Measure& base = d.family[d.family.size() - 1];
    for (int m = 0; m <= d.space.horizon(); ++m)
      EXPECT_LT(max_abs_diff(cond_exp_change_of_measure(d.space, d.xi, target, base, m).values,
                             cond_exp(d.space, d.xi, target, m).values),
                1e-12);
  }
}

TEST(CondExpProperty, EssSupDominatesMixturesAndIsAttained) {
  std::mt19937_64 rng(105);
  for (int t = 0; t < 100; ++t) {
    const Draw d = draw(rng);
    for (int m = 0; m <= d.space.horizon(); ++m) {
      const RandomVariable sup = ess_sup_cond_exp(d.space, d.xi, d.family, m);
      for (int s = 0; s < 50; ++s) {
        const Measure q = mixture(d.family, sample_simplex(d.family.size(), rng));
        const RandomVariable e = cond_exp(d.space, d.xi, q, m);
        for (std::size_t a = 0; a < e.size(); ++a) EXPECT_GE(sup[a] - e[a], -1e-12);
      }
      for (std::size_t a = 0; a < sup.size(); ++a) {
        double best = 1e300;
        for (const Measure& p : d.family) best = std::min(best, std::abs(cond_exp(d.space, d.xi, p, m)[a] - sup[a]));
        EXPECT_LT(best, 1e-12);
      }
    }
  }
}

TEST(CondExpProperty, MaxCommutesAsInequality) {
  std::mt19937_64 rng(106);
  for (int t = 0; t < 100; ++t) {
    const Draw d = draw(rng);
    std::vector<RandomVariable> fs;
    for (int i = 0; i < 3; ++i) fs.push_back(gen::random_variable(rng, d.space.n_atoms(), -1.0, 1.0));
    RandomVariable top = fs[0];
    for (const auto& f : fs)
      for (std::size_t a = 0; a < top.size(); ++a) top[a] = std::max(top[a], f[a]);
    for (int m = 0; m <= d.space.horizon(); ++m) {
      const RandomVariable lhs = cond_exp(d.space, top, d.family[0], m);
      for (const auto& f : fs) {
        const RandomVariable rhs = cond_exp(d.space, f, d.family[0], m);
        for (std::size_t a = 0; a < lhs.size(); ++a) EXPECT_GE(lhs[a] - rhs[a], -1e-12);
      }
    }
  }
}

TEST(RhoProperty, Pseudometric) {
  std::mt19937_64 rng(107);
  for (int t = 0; t < 100; ++t) {
    const Draw d = draw(rng);
    const MeasureFamily fam = gen::random_family(rng, d.space.n_atoms(), 3);
    for (int m = 0; m <= d.space.horizon(); ++m) {
      const auto c = contract(d.space, fam, m);
      EXPECT_EQ(rho_metric(c[0], c[0]), 0.0);
      EXPECT_NEAR(rho_metric(c[0], c[1]), rho_metric(c[1], c[0]), 1e-15);
      EXPECT_LE(rho_metric(c[0], c[2]), rho_metric(c[0], c[1]) + rho_metric(c[1], c[2]) + 1e-15);
    }
  }
}

TEST(RnBoundsProperty, BracketMixtureRatios) {
  std::mt19937_64 rng(108);
  for (int t = 0; t < 50; ++t) {
    const Draw d = draw(rng);
    const RnBounds b = rn_bounds(d.family);
    const Measure q1 = mixture(d.family, sample_simplex(d.family.size(), rng));
    const Measure q2 = mixture(d.family, sample_simplex(d.family.size(), rng));
    for (std::size_t a = 0; a < q1.size(); ++a) {
      EXPECT_GE(q1[a] / q2[a], b.lower - 1e-12);
      EXPECT_LE(q1[a] / q2[a], b.upper + 1e-12);
    }
  }
}

}  // namespace
}  // namespace doobkit
