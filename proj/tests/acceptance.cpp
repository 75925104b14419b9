// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "doobkit/audit.hpp"
#include "doobkit/conditional.hpp"
#include "doobkit/generators.hpp"
#include "doobkit/pricing.hpp"
#include "doobkit/regularity.hpp"
#include "doobkit/scenario.hpp"
#include "oracles.hpp"

namespace {

using namespace doobkit;
using Clock = std::chrono::steady_clock;

const std::filesystem::path kFixtures = DOOBKIT_FIXTURE_DIR;

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct FixtureA {
  Scenario sc = load_scenario(kFixtures / "fixture-a.json");
  const AdaptedProcess& s = sc.require_process("S");
  const MeasureFamily& family = sc.require_family();
  const RandomVariable& call = sc.require_claim("call90").atoms;
  const RandomVariable& put = sc.require_claim("put80").atoms;
};

void closed_form_call(Outcome& o) {
  const auto t0 = Clock::now();
  const FixtureA fa;
  const double closed = doobkit::closed_form_call(100, 90, 120);
  const auto gens = asset_generators(fa.sc.space, fa.s);
  const double lp = fair_price_generators(fa.sc.space, fa.call, gens, fa.family).fair_price;
  const double t = seconds_since(t0);
  o.note << "closed form " << closed << ", generator LP " << lp << ", " << t << " s";
  o.require(closed == 25.0, "closed form");
  o.require(std::abs(lp - 25.0) <= 1e-9, "generator LP");
  o.require(t < 1.0, "runtime");
}

void closed_form_put(Outcome& o) {
  const FixtureA fa;
  const double closed = doobkit::closed_form_put(80, 70);
  const auto gens = asset_generators(fa.sc.space, fa.s);
  const double lp = fair_price_generators(fa.sc.space, fa.put, gens, fa.family).fair_price;
  o.note << "closed form " << closed << ", generator LP " << lp;
  o.require(closed == 10.0, "closed form");
  o.require(std::abs(lp - 10.0) <= 1e-9, "generator LP");
}

void a0_price(Outcome& o) {
  const FixtureA fa;
  const PricingResult r = fair_price_a0(fa.sc.space, fa.call, fa.family);
  const double oracle = testing::dual_grid_oracle(fa.family, fa.call);
  const auto gens = asset_generators(fa.sc.space, fa.s);
  const double gen = fair_price_generators(fa.sc.space, fa.call, gens, fa.family).fair_price;
  o.note << "a0 " << r.fair_price << ", oracle " << oracle << ", lower " << r.lower_bound << ", generators " << gen;
  o.require(std::abs(r.fair_price - 18.0) <= 1e-6, "a0 price");
  o.require(std::abs(oracle - r.fair_price) <= 1e-6, "oracle agreement");
  o.require(std::abs(r.lower_bound - 17.6) <= 1e-9, "lower bound value");
  o.require(r.lower_bound <= r.fair_price + 1e-9 && r.fair_price <= gen + 1e-9, "ordering");
}

void decomposition_round_trip(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::size_t ok = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const FilteredSpace s = gen::random_space(rng, {2, 8, 3, false});
    const MeasureFamily fam = gen::random_family(rng, s.n_atoms(), 1 + static_cast<std::size_t>(t % 3));
    const auto sample = gen::random_supermartingale(s, fam, rng);
    try {
      const OptionalDecomposition d = optional_decompose(s, sample.f, fam);
      const VerificationReport v = verify_decomposition(s, sample.f, d, fam, 1e-9, static_cast<std::uint64_t>(t));
      for (const Check& c : v.checks) worst = std::max(worst, c.max_violation);
      if (v.ok && d.steps.size() == static_cast<std::size_t>(s.horizon())) ++ok;
    } catch (const Error&) {
    }
  }
  const double t = seconds_since(t0);
  o.note << ok << "/100 verified, max violation " << worst << ", " << t << " s";
  o.require(ok == 100, "all instances");
  o.require(worst <= 1e-9, "violation");
  o.require(t < 30.0, "runtime");
}

void claims_audit(Outcome& o) {
  const Scenario sc = load_scenario(kFixtures / "fixture-b.json");
  const AuditInstance in = instance_from_scenario(sc);
  const AuditResult t = audit(ClaimId::lemma_tmars5, in);
  const AuditResult f = audit(ClaimId::thm_fmars5, in);
  std::mt19937_64 rng(5);
  std::size_t q5 = 0;
  for (int k = 0; k < 200; ++k) {
    const FilteredSpace s = gen::random_space(rng, {2, 8, 3, true});
    const AuditInstance single{s, gen::random_family(rng, s.n_atoms(), 1), gen::random_variable(rng, s.n_atoms()),
                               std::nullopt};
    if (audit(ClaimId::lemma_q5, single).verdict == Verdict::pass) ++q5;
  }
  o.note << "tmars5 " << t.violation << ", fmars5 " << f.violation << ", q5 singleton passes " << q5 << "/200";
  o.require(t.verdict == Verdict::counterexample && std::abs(t.violation - 0.06) <= 1e-10, "tmars5");
  o.require(f.verdict == Verdict::counterexample && std::abs(f.violation - 0.12) <= 1e-10, "fmars5");
  o.require(q5 == 200, "q5");
}

void ess_sup_property(Outcome& o) {
  std::mt19937_64 rng(77);
  double min_slack = 1e300;
  double worst_attain = 0.0;
  for (int t = 0; t < 100; ++t) {
    const FilteredSpace s = gen::random_space(rng);
    const MeasureFamily fam = gen::random_family(rng, s.n_atoms(), 1 + static_cast<std::size_t>(t % 3));
    const RandomVariable xi = gen::random_variable(rng, s.n_atoms(), -2.0, 3.0);
    for (int m = 0; m <= s.horizon(); ++m) {
      const RandomVariable sup = ess_sup_cond_exp(s, xi, fam, m);
      for (int k = 0; k < 50; ++k) {
        const RandomVariable e = cond_exp(s, xi, mixture(fam, sample_simplex(fam.size(), rng)), m);
        for (std::size_t a = 0; a < e.size(); ++a) min_slack = std::min(min_slack, sup[a] - e[a]);
      }
      for (std::size_t c = 0; c < s.cell_count(m); ++c) {
        const std::size_t a = s.cell(m, c).front();
        double gap = 1e300;
        for (const Measure& p : fam) gap = std::min(gap, std::abs(cond_exp(s, xi, p, m)[a] - sup[a]));
        worst_attain = std::max(worst_attain, gap);
      }
    }
  }
  o.note << "min slack " << min_slack << ", attainment gap " << worst_attain;
  o.require(min_slack >= -1e-12, "domination");
  o.require(worst_attain <= 1e-12, "attainment");
}

void superhedge(Outcome& o) {
  const FixtureA fa;
  const MarketModel market(fa.s);
  const TradingStrategy st = superhedge_strategy(fa.sc.space, fa.call, market, fa.family);
  const double sf = self_financing_residual(fa.sc.space, st, fa.s);
  const PredictableProcess h = martingale_representation(fa.sc.space, st.martingale, market);
  const double rep = representation_residual(fa.sc.space, st.martingale, h, market);
  const auto& x1 = st.capital.at(1);
  const std::vector<double> expected{30, 25, 17.5};
  double dev = 0.0;
  bool dominates = true;
  for (std::size_t c = 0; c < x1.size(); ++c) {
    dev = std::max(dev, std::abs(x1[c] - expected[c]));
    dominates = dominates && x1[c] >= fa.call[c] - 1e-9;
  }
  o.note << "X_0 " << st.capital.value(0, 0) << ", X_1 (" << x1[0] << ", " << x1[1] << ", " << x1[2]
         << "), self-financing " << sf << ", representation " << rep;
  o.require(st.capital.value(0, 0) == 25.0, "X_0");
  o.require(sf <= 1e-12, "self-financing");
  o.require(dev <= 1e-12 && dominates, "X_1");
  o.require(rep <= 1e-10, "representation");
}

void emm_search(Outcome& o) {
  const FixtureA fa;
  const MarketModel market(fa.s);
  const EmmResult r = find_emm(fa.sc.space, market);
  bool positive = r.measure.has_value();
  double residual = 1e300;
  if (r.measure) {
    for (double q : r.measure->probs()) positive = positive && q > 0.0;
    residual = verify_emm(fa.sc.space, *r.measure, market).max_residual;
  }
  const Scenario arb = load_scenario(kFixtures / "arbitrage.json");
  const EmmResult none = find_emm(arb.space, MarketModel(arb.require_process("S")));
  o.note << "min slack " << r.min_slack << ", residual " << residual << ", arbitrage fixture "
         << (none.measure ? "has an EMM" : "none");
  o.require(positive, "strictly positive");
  o.require(residual <= 1e-12, "residual");
  o.require(!none.measure, "arbitrage");
}

void lp_kernel(Outcome& o) {
  std::mt19937_64 rng(99);
  std::size_t agree = 0;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const testing::RandomLp r = testing::random_lp(rng);
    const auto oracle = testing::enumerate_vertices(r);
    const lp::LpOutcome out = lp::solve(r.lp);
    if (!oracle) {
      if (out.status == lp::Status::infeasible) ++agree;
      continue;
    }
    if (out.status != lp::Status::optimal) continue;
    worst = std::max(worst, std::abs(out.value - *oracle));
    if (std::abs(out.value - *oracle) <= 1e-8) ++agree;
  }
  const FixtureA fa;
  const auto gens = asset_generators(fa.sc.space, fa.s);
  double gap = 0.0;
  bool optimal = true;
  for (const RandomVariable* claim : {&fa.call, &fa.put}) {
    for (const PricingResult& p : {fair_price_a0(fa.sc.space, *claim, fa.family),
                                   fair_price_generators(fa.sc.space, *claim, gens, fa.family)}) {
      optimal = optimal && p.certificate.status == lp::Status::optimal;
      gap = std::max(gap, std::abs(p.certificate.duality_gap()));
    }
  }
  o.note << agree << "/200 agree (max diff " << worst << "), pricing duality gap " << gap;
  o.require(agree == 200, "oracle");
  o.require(optimal && gap <= 1e-7, "pricing LPs");
}

}  // namespace

int main() {
  const struct {
    const char* name;
    void (*run)(Outcome&);
  } criteria[] = {
      {"1 closed-form call", closed_form_call},
      {"2 closed-form put", closed_form_put},
      {"3 a0-mode price", a0_price},
      {"4 decomposition round trip", decomposition_round_trip},
      {"5 claims audit", claims_audit},
      {"6 ess-sup dominates mixtures", ess_sup_property},
      {"7 superhedge soundness", superhedge},
      {"8 EMM search", emm_search},
      {"9 LP kernel", lp_kernel},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.note << " [exception: " << e.what() << "]";
    }
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.note.str().c_str());
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
