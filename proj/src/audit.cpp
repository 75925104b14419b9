#include "doobkit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doobkit/conditional.hpp"
#include "doobkit/error.hpp"
#include "doobkit/generators.hpp"
#include "doobkit/regularity.hpp"

namespace doobkit {

std::string_view to_string(ClaimId id) {
  switch (id) {
    case ClaimId::lemma_q5: return "lemma-q5";
    case ClaimId::lemma_lkq4: return "lemma-lkq4";
    case ClaimId::lemma_tmars5: return "lemma-tmars5";
    case ClaimId::lemma_1q5: return "lemma-1q5";
    case ClaimId::thm_fmars5: return "thm-fmars5";
    case ClaimId::thm_mars12: return "thm-mars12";
    case ClaimId::thm_mmars1: return "thm-mmars1";
  }
  return "unknown";
}

ClaimId parse_claim(std::string_view text) {
  for (ClaimId id : kAllClaims)
    if (to_string(id) == text) return id;
  throw Error(ErrorCode::UnknownClaim, std::string(text));
}

std::string_view to_string(Verdict verdict) { return verdict == Verdict::pass ? "pass" : "counterexample"; }

namespace {

[[noreturn]] void unmet(const std::string& why) { throw Error(ErrorCode::ClaimPreconditionUnmet, why); }

void require_nonnegative(const RandomVariable& xi) {
  for (double v : xi.values)
    if (v < 0.0) unmet("xi must be nonnegative");
}

AdaptedProcess envelope(const AuditInstance& in) {
  std::vector<std::vector<double>> values;
  for (int m = 0; m <= in.space.horizon(); ++m) values.push_back(ess_sup_cond_exp_cells(in.space, in.xi, in.family, m));
  return AdaptedProcess(in.space, std::move(values));
}

struct Defect {
  double size = 0.0;
  std::string where;

  void offer(double value, const std::string& location) {
    if (value > size) {
      size = value;
      where = location;
    }
  }
};

std::string at(int m, std::size_t cell, std::size_t extreme) {
  std::ostringstream os;
  os << "time " << m << ", cell " << cell << ", extreme " << extreme;
  return os.str();
}

// E^{P_j}{Phi_n|F_m} <= Phi_m for every m < n, with Phi the envelope.
Defect envelope_pairs(const AuditInstance& in) {
  const AdaptedProcess env = envelope(in);
  Defect d;
  for (int n = 1; n <= in.space.horizon(); ++n) {
    const RandomVariable phi_n = env.expand(in.space, n);
    for (int m = 0; m < n; ++m)
      for (std::size_t j = 0; j < in.family.size(); ++j) {
        const auto lhs = cond_exp_cells(in.space, phi_n, in.family[j], m);
        for (std::size_t c = 0; c < lhs.size(); ++c)
          d.offer(lhs[c] - env.value(m, c), at(m, c, j) + ", n " + std::to_string(n));
      }
  }
  return d;
}

// Same inequality with every conditional expectation routed through a change of measure to Q.
Defect change_of_measure_pairs(const AuditInstance& in) {
  const auto sup_under = [&](const Measure& q, int m) {
    RandomVariable out = cond_exp_change_of_measure(in.space, in.xi, in.family[0], q, m);
    for (std::size_t i = 1; i < in.family.size(); ++i) {
      const RandomVariable e = cond_exp_change_of_measure(in.space, in.xi, in.family[i], q, m);
      for (std::size_t a = 0; a < out.size(); ++a) out[a] = std::max(out[a], e[a]);
    }
    return out;
  };
  Defect d;
  for (std::size_t j = 0; j < in.family.size(); ++j) {
    const Measure& q = in.family[j];
    for (int n = 1; n <= in.space.horizon(); ++n) {
      const RandomVariable phi_n = sup_under(q, n);
      for (int m = 0; m < n; ++m) {
        const RandomVariable lhs = cond_exp(in.space, phi_n, q, m);
        const RandomVariable rhs = sup_under(q, m);
        for (std::size_t c = 0; c < in.space.cell_count(m); ++c) {
          const std::size_t a = in.space.cell(m, c).front();
          d.offer(lhs[a] - rhs[a], at(m, c, j) + ", n " + std::to_string(n));
        }
      }
    }
  }
  return d;
}

// Local regularity of a nonnegative process: supermartingale defect if any, else the first
// phase-one infeasibility of the xi0 LP.
Defect regularity_defect(const FilteredSpace& space, const AdaptedProcess& f, const MeasureFamily& family,
                         double tol) {
  Defect d;
  const Classification cls = classify(space, f, family, tol);
  if (cls.kind == ProcessKind::not_supermartingale) {
    const Violation& v = cls.worst_violation;
    d.offer(v.magnitude, "supermartingale fails at " + at(v.time, v.cell, v.extreme));
    return d;
  }
  for (int m = 1; m <= space.horizon(); ++m) {
    const StepResult r = xi0_step_lp(space, f, family, m, tol);
    if (const auto* fail = std::get_if<StepFailure>(&r)) {
      d.offer(std::max(fail->magnitude, 2.0 * tol),
              "no xi0 certificate at time " + std::to_string(m) + ", node " +
                  std::to_string(fail->node.value_or(0)));
      return d;
    }
  }
  return d;
}

std::vector<double> expectations(const AuditInstance& in) {
  std::vector<double> e;
  for (const Measure& p : in.family) e.push_back(p.expectation(in.xi));
  return e;
}

}  // namespace

AuditResult audit(ClaimId claim, const AuditInstance& in, double tol) {
  if (in.xi.size() != in.space.n_atoms() || in.family.n_atoms() != in.space.n_atoms())
    throw Error(ErrorCode::ShapeMismatch, "audit instance does not fit its space");

  Defect d;
  switch (claim) {
    case ClaimId::lemma_q5:
      d = envelope_pairs(in);
      break;
    case ClaimId::lemma_lkq4:
      require_nonnegative(in.xi);
      d = change_of_measure_pairs(in);
      break;
    case ClaimId::lemma_tmars5: {
      require_nonnegative(in.xi);
      const Classification cls = classify(in.space, envelope(in), in.family, tol);
      const Violation& v = cls.worst_violation;
      d.offer(v.magnitude, at(v.time, v.cell, v.extreme));
      break;
    }
    case ClaimId::lemma_1q5: {
      require_nonnegative(in.xi);
      const auto e = expectations(in);
      const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
      if (*hi - *lo > tol) unmet("E^{P_i} xi differ across extremes");
      d.offer(classify(in.space, envelope(in), in.family, tol).martingale_defect, "martingale defect of the envelope");
      break;
    }
    case ClaimId::thm_fmars5: {
      if (!a0_membership(in.xi, in.family, tol)) unmet("xi is not in A_0");
      for (int m = 0; m <= in.space.horizon(); ++m) {
        std::vector<std::vector<double>> ce;
        for (const Measure& p : in.family) ce.push_back(cond_exp_cells(in.space, in.xi, p, m));
        for (std::size_t i = 0; i < ce.size(); ++i)
          for (std::size_t j = i + 1; j < ce.size(); ++j)
            for (std::size_t c = 0; c < ce[i].size(); ++c)
              d.offer(std::abs(ce[i][c] - ce[j][c]), at(m, c, i) + " vs extreme " + std::to_string(j));
      }
      break;
    }
    case ClaimId::thm_mars12: {
      require_nonnegative(in.xi);
      const AdaptedProcess env = envelope(in);
      double spread = 0.0;
      for (double e : expectations(in)) spread = std::max(spread, std::abs(e - env.value(0, 0)));
      const bool condition = spread <= tol;
      const Defect reg = regularity_defect(in.space, env, in.family, tol);
      const bool regular = reg.size <= tol;
      if (condition && !regular) d.offer(reg.size, "E^{P_i} xi all equal f_0 but envelope not local regular: " + reg.where);
      if (!condition && regular) d.offer(spread, "envelope local regular but E^{P_i} xi differ from f_0");
      break;
    }
    case ClaimId::thm_mmars1: {
      if (!a0_membership(in.xi, in.family, tol)) unmet("xi is not in A_0");
      const FilteredSpace& sp = in.space;
      std::vector<std::vector<double>> fv;
      if (in.f) {
        in.f->check_shape(sp);
        fv = in.f->per_time();
      } else {
        for (int m = 0; m <= sp.horizon(); ++m) fv.emplace_back(sp.cell_count(m), 1.0);
      }
      for (int m = 0; m <= sp.horizon(); ++m)
        for (std::size_t c = 0; c < fv[static_cast<std::size_t>(m)].size(); ++c) {
          const double v = fv[static_cast<std::size_t>(m)][c];
          if (v < 0.0) unmet("f must be nonnegative");
          if (m > 0 && v > fv[static_cast<std::size_t>(m) - 1][sp.predecessor(m, c)] + tol) unmet("f must be non-increasing");
        }
      std::vector<std::vector<double>> h = fv;
      for (int m = 0; m <= sp.horizon(); ++m) {
        const auto ce = cond_exp_cells(sp, in.xi, in.family[0], m);
        for (std::size_t c = 0; c < ce.size(); ++c) h[static_cast<std::size_t>(m)][c] *= ce[c];
      }
      d = regularity_defect(sp, AdaptedProcess(sp, std::move(h)), in.family, tol);
      break;
    }
  }

  AuditResult out;
  out.claim = claim;
  out.violation = std::max(0.0, d.size);
  out.verdict = out.violation > tol ? Verdict::counterexample : Verdict::pass;
  out.detail = out.verdict == Verdict::pass ? "holds on this instance" : d.where;
  out.instance = in;
  return out;
}

double replay(const AuditResult& result, double tol) {
  if (!result.instance) return 0.0;
  return std::abs(audit(result.claim, *result.instance, tol).violation - result.violation);
}

AuditInstance drop_atom(const AuditInstance& in, std::size_t atom) {
  const std::size_t n = in.space.n_atoms();
  if (n < 2 || atom >= n) throw Error(ErrorCode::ShapeMismatch, "cannot drop this atom");
  const auto renumber = [atom](std::size_t a) { return a < atom ? a : a - 1; };

  std::vector<Partition> parts;
  for (int m = 0; m <= in.space.horizon(); ++m) {
    Partition p;
    for (const Cell& cell : in.space.partition(m)) {
      Cell kept;
      for (std::size_t a : cell)
        if (a != atom) kept.push_back(renumber(a));
      if (!kept.empty()) p.push_back(std::move(kept));
    }
    parts.push_back(std::move(p));
  }
  FilteredSpace space = FilteredSpace::build(n - 1, std::move(parts));

  const auto dropped = [atom](std::span<const double> v) {
    std::vector<double> out;
    for (std::size_t a = 0; a < v.size(); ++a)
      if (a != atom) out.push_back(v[a]);
    return out;
  };
  std::vector<Measure> extremes;
  for (const Measure& p : in.family) {
    auto probs = dropped(p.probs());
    double total = 0.0;
    for (double v : probs) total += v;
    for (double& v : probs) v /= total;
    extremes.emplace_back(std::move(probs));
  }
  MeasureFamily family(std::move(extremes));
  RandomVariable xi(dropped(in.xi.view()));

  std::optional<AdaptedProcess> f;
  if (in.f) {
    std::vector<RandomVariable> slices;
    for (int m = 0; m <= in.space.horizon(); ++m) slices.emplace_back(dropped(in.f->expand(in.space, m).view()));
    f = AdaptedProcess::from_atoms(space, slices);
  }
  return AuditInstance{std::move(space), std::move(family), std::move(xi), std::move(f)};
}

namespace {

std::optional<AuditResult> try_audit(ClaimId claim, const AuditInstance& in, double tol) {
  try {
    AuditResult r = audit(claim, in, tol);
    if (r.verdict == Verdict::counterexample) return r;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ClaimPreconditionUnmet) throw;
  }
  return std::nullopt;
}

AuditResult shrink(ClaimId claim, AuditResult best, double tol) {
  bool changed = true;
  while (changed) {
    changed = false;
    const AuditInstance cur = *best.instance;
    for (std::size_t i = 0; i < cur.family.size() && cur.family.size() > 1 && !changed; ++i) {
      std::vector<Measure> rest;
      for (std::size_t j = 0; j < cur.family.size(); ++j)
        if (j != i) rest.push_back(cur.family[j]);
      AuditInstance cand{cur.space, MeasureFamily(std::move(rest)), cur.xi, cur.f};
      if (auto r = try_audit(claim, cand, tol)) {
        best = std::move(*r);
        changed = true;
      }
    }
    for (std::size_t a = 0; a < cur.space.n_atoms() && cur.space.n_atoms() > 2 && !changed; ++a) {
      std::optional<AuditInstance> cand;
      try {
        cand = drop_atom(cur, a);
      } catch (const Error&) {
        continue;  // e.g. two extremes collapse onto each other
      }
      if (auto r = try_audit(claim, *cand, tol)) {
        best = std::move(*r);
        changed = true;
      }
    }
  }
  return best;
}

AuditInstance draw_instance(ClaimId claim, std::mt19937_64& rng, const SearchLimits& limits) {
  gen::SpaceLimits sl;
  sl.max_atoms = std::max<std::size_t>(2, limits.max_atoms);
  sl.max_periods = limits.max_periods;
  sl.fine_terminal = true;
  FilteredSpace space = gen::random_space(rng, sl);
  const std::size_t k = std::uniform_int_distribution<std::size_t>(std::max<std::size_t>(1, limits.min_extremes),
                                                                    std::max(limits.min_extremes, limits.max_extremes))(rng);
  MeasureFamily family = gen::random_family(rng, space.n_atoms(), k);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto a0 = [&] { return gen::random_a0_element(family, rng).xi(); };
  const auto scaled = [&] {
    RandomVariable xi = a0();
    const double s = 0.5 + 1.5 * unit(rng);
    for (double& v : xi.values) v *= s;
    return xi;
  };

  RandomVariable xi;
  std::optional<AdaptedProcess> f;
  switch (claim) {
    case ClaimId::thm_fmars5:
      xi = a0();
      break;
    case ClaimId::thm_mmars1: {
      xi = a0();
      std::vector<std::vector<double>> fv{{1.0 + unit(rng)}};
      for (int m = 1; m <= space.horizon(); ++m) {
        std::vector<double> now(space.cell_count(m));
        for (std::size_t c = 0; c < now.size(); ++c)
          now[c] = std::max(0.0, fv.back()[space.predecessor(m, c)] - (unit(rng) < 0.5 ? 0.3 * unit(rng) : 0.0));
        fv.push_back(std::move(now));
      }
      f = AdaptedProcess(space, std::move(fv));
      break;
    }
    case ClaimId::lemma_1q5:
      xi = scaled();
      break;
    case ClaimId::thm_mars12:
      xi = unit(rng) < 0.5 ? scaled() : gen::random_variable(rng, space.n_atoms());
      break;
    default:
      xi = gen::random_variable(rng, space.n_atoms());
  }
  return AuditInstance{std::move(space), std::move(family), std::move(xi), std::move(f)};
}

}  // namespace

AuditResult search_counterexample(ClaimId claim, std::size_t budget, std::uint64_t seed, const SearchLimits& limits,
                                  double tol) {
  if (budget == 0) throw Error(ErrorCode::BadBudget, "search budget must be at least 1");
  std::mt19937_64 rng(seed);
  double largest = 0.0;
  for (std::size_t t = 0; t < budget; ++t) {
    const AuditInstance in = draw_instance(claim, rng, limits);
    try {
      AuditResult r = audit(claim, in, tol);
      if (r.verdict == Verdict::counterexample) {
        AuditResult best = shrink(claim, std::move(r), tol);
        best.trials = t + 1;
        return best;
      }
      largest = std::max(largest, r.violation);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ClaimPreconditionUnmet) throw;
    }
  }
  AuditResult out;
  out.claim = claim;
  out.verdict = Verdict::pass;
  out.violation = largest;
  out.detail = "no counterexample in " + std::to_string(budget) + " draws";
  out.trials = budget;
  return out;
}

}  // namespace doobkit
