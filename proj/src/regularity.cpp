#include "doobkit/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "doobkit/conditional.hpp"
#include "doobkit/lp.hpp"

namespace doobkit {

namespace {

void require_time(const FilteredSpace& space, int m, int lowest) {
  if (m < lowest || m > space.horizon())
    throw Error(ErrorCode::ShapeMismatch, "time index " + std::to_string(m) + " out of range");
}

double node_mass(const FilteredSpace& space, const Measure& p, int m, std::size_t node) {
  return p.mass(space.cell(m - 1, node));
}

// P(child) / P(node) for every successor of `node`, in successor order.
std::vector<double> conditional_row(const FilteredSpace& space, const Measure& p, int m, std::size_t node) {
  const double total = node_mass(space, p, m, node);
  std::vector<double> row;
  for (std::size_t c : space.successors(m, node)) row.push_back(p.mass(space.cell(m, c)) / total);
  return row;
}

double max_abs(std::span<const double> v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

}  // namespace

std::string_view to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::martingale: return "martingale";
    case ProcessKind::supermartingale_strict: return "supermartingale-strict";
    case ProcessKind::not_supermartingale: return "not-supermartingale";
  }
  return "unknown";
}

std::string_view to_string(StepMethod method) { return method == StepMethod::alpha ? "alpha" : "lp"; }

Classification classify(const FilteredSpace& space, const AdaptedProcess& f, const MeasureFamily& family,
                        double tol) {
  f.check_shape(space);
  Classification out;
  out.worst_violation.magnitude = -std::numeric_limits<double>::infinity();
  for (int m = 1; m <= space.horizon(); ++m) {
    for (std::size_t i = 0; i < family.size(); ++i) {
      const auto ce = step_cond_exp(space, f.at(m), family[i], m);
      for (std::size_t c = 0; c < ce.size(); ++c) {
        const double defect = ce[c] - f.value(m - 1, c);
        out.martingale_defect = std::max(out.martingale_defect, std::abs(defect));
        if (defect > out.worst_violation.magnitude) out.worst_violation = {m, c, i, defect};
      }
    }
  }
  if (out.worst_violation.magnitude > tol)
    out.kind = ProcessKind::not_supermartingale;
  else if (out.martingale_defect <= tol)
    out.kind = ProcessKind::martingale;
  else
    out.kind = ProcessKind::supermartingale_strict;
  return out;
}

// ---------------------------------------------------------------------------

bool a0_membership(const RandomVariable& xi, const MeasureFamily& family, double tol) {
  if (xi.size() != family.n_atoms()) return false;
  for (double v : xi.values)
    if (v < -tol) return false;
  for (const Measure& p : family)
    if (std::abs(p.expectation(xi) - 1.0) > tol) return false;
  return true;
}

A0Element::A0Element(RandomVariable xi, const MeasureFamily& family, double tol) : xi_(std::move(xi)) {
  if (!a0_membership(xi_, family, tol))
    throw Error(ErrorCode::PreconditionFailed, "random variable is not in A_0 of the family");
}

A0Element find_a0_element(const MeasureFamily& family, const std::optional<RandomVariable>& objective) {
  const std::size_t n = family.n_atoms();
  const bool interior = !objective.has_value();
  if (objective && objective->size() != n)
    throw Error(ErrorCode::ShapeMismatch, "objective length does not match the family");

  lp::LinearProgram prog(n + (interior ? 1 : 0));
  for (const Measure& p : family) {
    std::vector<double> row(prog.n_vars(), 0.0);
    for (std::size_t a = 0; a < n; ++a) row[a] = p[a];
    prog.add_eq(std::move(row), 1.0);
  }
  if (interior) {
    // variable n is t <= xi(w) for all w; maximize t
    prog.objective[n] = -1.0;
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<double> row(n + 1, 0.0);
      row[a] = 1.0;
      row[n] = -1.0;
      prog.add_ge(std::move(row), 0.0);
    }
  } else {
    for (std::size_t a = 0; a < n; ++a) prog.objective[a] = -(*objective)[a];
  }
  const auto out = lp::solve(prog);
  if (out.status != lp::Status::optimal)
    throw Error(ErrorCode::NumericalBreakdown, "A_0 polytope LP did not reach an optimum");
  std::vector<double> xi(out.x.begin(), out.x.begin() + static_cast<std::ptrdiff_t>(n));
  for (double& v : xi) v = std::max(v, 0.0);
  return A0Element(RandomVariable(std::move(xi)), family);
}

// ---------------------------------------------------------------------------

GapBoundReport uniform_gap_bound(const FilteredSpace& space, const AdaptedProcess& f, const MeasureFamily& family,
                                 int m0, const RandomVariable& phi, std::size_t samples, std::uint64_t seed,
                                 double tol) {
  f.check_shape(space);
  require_time(space, m0, 1);
  if (phi.size() != space.n_atoms()) throw Error(ErrorCode::ShapeMismatch, "phi length does not match the space");
  if (!is_measurable(space, phi, m0 - 1, tol))
    throw Error(ErrorCode::PreconditionFailed, "phi is not F_{m0-1}-measurable");
  const auto phi_cells = restrict_to_cells(space, phi, m0 - 1, tol);
  for (double v : phi_cells)
    if (v < -tol) throw Error(ErrorCode::PreconditionFailed, "phi must be nonnegative");
  if (classify(space, f, family, tol).kind == ProcessKind::not_supermartingale)
    throw Error(ErrorCode::PreconditionFailed, "f is not a supermartingale relative to the family");

  const auto gap_under = [&](const Measure& q) {
    auto ce = step_cond_exp(space, f.at(m0), q, m0);
    for (std::size_t c = 0; c < ce.size(); ++c) ce[c] = f.value(m0 - 1, c) - ce[c];
    return ce;
  };
  const auto gap1 = gap_under(family[0]);
  for (std::size_t c = 0; c < gap1.size(); ++c)
    if (gap1[c] < phi_cells[c] - tol)
      throw Error(ErrorCode::PreconditionFailed, "P_1 gap is below phi on cell " + std::to_string(c));

  GapBoundReport rep;
  const RnBounds b = rn_bounds(family);
  rep.lower = b.lower;
  rep.upper = b.upper;
  rep.eps0 = b.upper / (1.0 + b.upper);
  rep.constant = b.lower / (1.0 + b.upper);
  rep.min_slack = std::numeric_limits<double>::infinity();

  const auto probe = [&](double a, std::span<const double> weights) {
    const Measure p2 = mixture(family, weights);
    std::vector<double> q(space.n_atoms());
    for (std::size_t w = 0; w < q.size(); ++w) q[w] = (1.0 - a) * family[0][w] + a * p2[w];
    double total = 0.0;
    for (double v : q) total += v;
    for (double& v : q) v /= total;
    const auto gap = gap_under(Measure(std::move(q)));
    for (std::size_t c = 0; c < gap.size(); ++c)
      rep.min_slack = std::min(rep.min_slack, gap[c] - rep.constant * phi_cells[c]);
    ++rep.samples;
  };

  const std::size_t k = family.size();
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> e(k, 0.0);
    e[i] = 1.0;
    probe(0.0, e);
    probe(rep.eps0, e);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < samples; ++s) probe(rep.eps0 * unit(rng), sample_simplex(k, rng));
  rep.holds = rep.min_slack >= -tol;
  return rep;
}

// ---------------------------------------------------------------------------

MartingaleDelta martingale_increments(const FilteredSpace& space, const A0Element& xi0, const MeasureFamily& family,
                                      std::size_t base_measure_index, int n) {
  require_time(space, n, 1);
  if (base_measure_index >= family.size()) throw Error(ErrorCode::ShapeMismatch, "base measure index out of range");
  const Measure& base = family[base_measure_index];
  const auto now = cond_exp_cells(space, xi0.xi(), base, n);
  const auto before = cond_exp_cells(space, xi0.xi(), base, n - 1);

  MartingaleDelta out;
  out.n = n;
  out.base = base_measure_index;
  out.increments.resize(now.size());
  for (std::size_t c = 0; c < now.size(); ++c) {
    double d = now[c] - before[space.predecessor(n, c)];
    // rounding residue of equal conditional means
    if (std::abs(d) < 1e-13) d = 0.0;
    out.increments[c] = d;
    (d > 0.0 ? out.plus : out.minus).push_back(c);
  }
  return out;
}

double conditional_mean_defect(const FilteredSpace& space, const MartingaleDelta& delta, const MeasureFamily& family) {
  double worst = 0.0;
  for (const Measure& p : family)
    worst = std::max(worst, max_abs(step_cond_exp(space, delta.increments, p, delta.n)));
  return worst;
}

// ---------------------------------------------------------------------------

double AlphaInterval::preferred() const {
  if (std::isfinite(upper)) return upper;
  if (std::isfinite(lower)) return lower;
  return 0.0;
}

AlphaInterval AlphaInterval::intersect(const AlphaInterval& other) const {
  AlphaInterval out;
  out.lower = std::max(lower, other.lower);
  out.upper = std::min(upper, other.upper);
  out.empty = empty || other.empty || out.lower > out.upper + kStrictTol;
  if (!out.empty && out.lower > out.upper) out.lower = out.upper;
  return out;
}

AlphaInterval alpha_interval(std::span<const double> f_normalized, std::span<const double> increments) {
  if (f_normalized.size() != increments.size())
    throw Error(ErrorCode::LengthMismatch, "alpha_interval: value and increment counts differ");
  AlphaInterval out;
  for (std::size_t i = 0; i < increments.size(); ++i) {
    const double f = f_normalized[i];
    const double d = increments[i];
    if (d > 0.0)
      out.lower = std::max(out.lower, (f - 1.0) / d);
    else if (d < 0.0)
      out.upper = std::min(out.upper, (1.0 - f) / (-d));
    else if (f > 1.0 + kStrictTol)
      out.empty = true;
  }
  if (out.lower > out.upper + kStrictTol) out.empty = true;
  if (!out.empty && out.lower > out.upper) out.lower = out.upper;
  return out;
}

std::vector<double> step_ratio(const FilteredSpace& space, const AdaptedProcess& f, int m) {
  require_time(space, m, 1);
  std::vector<double> ratio(space.cell_count(m));
  for (std::size_t c = 0; c < ratio.size(); ++c) {
    const double prev = f.value(m - 1, space.predecessor(m, c));
    ratio[c] = prev == 0.0 ? 1.0 : f.value(m, c) / prev;
  }
  return ratio;
}

namespace {

// Largest |E^{P_i}{x|F_{m-1}} - 1| over extremes and nodes, with the node attaining it.
std::pair<double, std::size_t> unit_defect(const FilteredSpace& space, std::span<const double> x,
                                           const MeasureFamily& family, int m) {
  double worst = 0.0;
  std::size_t where = 0;
  for (const Measure& p : family) {
    const auto ce = step_cond_exp(space, x, p, m);
    for (std::size_t s = 0; s < ce.size(); ++s)
      if (std::abs(ce[s] - 1.0) > worst) {
        worst = std::abs(ce[s] - 1.0);
        where = s;
      }
  }
  return {worst, where};
}

Xi0Step make_step(const FilteredSpace& space, int m, std::vector<double> cells, StepMethod method,
                  std::optional<double> alpha) {
  Xi0Step step;
  step.m = m;
  step.xi0 = expand_cells(space, m, cells);
  step.xi0_cells = std::move(cells);
  step.method = method;
  step.alpha = alpha;
  return step;
}

}  // namespace

StepResult xi0_step_alpha(const FilteredSpace& space, const AdaptedProcess& f, const A0Element& xi0,
                          const MeasureFamily& family, int m, std::size_t base_measure_index, double tol) {
  f.check_shape(space);
  const auto ratio = step_ratio(space, f, m);
  const MartingaleDelta delta = martingale_increments(space, xi0, family, base_measure_index, m);

  std::vector<double> sup(space.cell_count(m - 1), -std::numeric_limits<double>::infinity());
  for (const Measure& p : family) {
    const auto ce = step_cond_exp(space, ratio, p, m);
    for (std::size_t s = 0; s < sup.size(); ++s) sup[s] = std::max(sup[s], ce[s]);
  }

  AlphaInterval feasible;
  for (std::size_t s = 0; s < sup.size(); ++s) {
    std::vector<double> fn;
    std::vector<double> d;
    for (std::size_t c : space.successors(m, s)) {
      fn.push_back(sup[s] > 0.0 ? ratio[c] / sup[s] : 0.0);
      d.push_back(delta.increments[c]);
    }
    feasible = feasible.intersect(alpha_interval(fn, d));
    if (feasible.empty) return StepFailure{m, s, "alpha interval is empty", 0.0};
  }

  const double alpha = feasible.preferred();
  std::vector<double> cells(ratio.size());
  double shortfall = 0.0;
  std::size_t short_node = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    cells[c] = 1.0 + alpha * delta.increments[c];
    if (ratio[c] - cells[c] > shortfall) {
      shortfall = ratio[c] - cells[c];
      short_node = space.predecessor(m, c);
    }
  }
  if (shortfall > tol) return StepFailure{m, short_node, "xi0 does not dominate f_m/f_{m-1}", shortfall};
  const auto [defect, node] = unit_defect(space, cells, family, m);
  if (defect > tol)
    return StepFailure{m, node, "xi0 is not unit-conditional under every extreme", defect};
  return make_step(space, m, std::move(cells), StepMethod::alpha, alpha);
}

StepResult xi0_step_lp(const FilteredSpace& space, const AdaptedProcess& f, const MeasureFamily& family, int m,
                       double tol) {
  f.check_shape(space);
  const auto ratio = step_ratio(space, f, m);
  std::vector<double> cells(ratio.size(), 0.0);
  for (std::size_t s = 0; s < space.cell_count(m - 1); ++s) {
    const auto& kids = space.successors(m, s);
    lp::LinearProgram prog(kids.size());
    prog.lower.resize(kids.size());
    for (std::size_t k = 0; k < kids.size(); ++k) {
      prog.objective[k] = 1.0;
      prog.lower[k] = ratio[kids[k]];
    }
    for (const Measure& p : family) prog.add_eq(conditional_row(space, p, m, s), 1.0);
    const auto out = lp::solve(prog);
    if (out.status != lp::Status::optimal)
      return StepFailure{m, s, "no xi0 satisfies the node constraints", out.infeasibility};

    // Second stage among sum-minimal points: least l1 distance to xi0 = 1.
    const std::size_t n = kids.size();
    lp::LinearProgram near(2 * n);
    near.lower.assign(2 * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      near.lower[k] = ratio[kids[k]];
      near.objective[n + k] = 1.0;
      std::vector<double> up(2 * n, 0.0), down(2 * n, 0.0);
      up[n + k] = 1.0;
      up[k] = -1.0;
      down[n + k] = 1.0;
      down[k] = 1.0;
      near.add_ge(std::move(up), -1.0);
      near.add_ge(std::move(down), 1.0);
    }
    for (const auto& row : prog.eq_rows) {
      std::vector<double> r(2 * n, 0.0);
      std::copy(row.begin(), row.end(), r.begin());
      near.add_eq(std::move(r), 1.0);
    }
    std::vector<double> total(2 * n, 0.0);
    std::fill(total.begin(), total.begin() + static_cast<long>(n), 1.0);
    near.add_le(std::move(total), out.value + 1e-10 * (1.0 + std::abs(out.value)));
    const auto refined = lp::solve(near);
    const auto& x = refined.status == lp::Status::optimal ? refined.x : out.x;
    for (std::size_t k = 0; k < n; ++k) cells[kids[k]] = std::max(x[k], ratio[kids[k]]);
  }
  const auto [defect, node] = unit_defect(space, cells, family, m);
  if (defect > tol) return StepFailure{m, node, "LP certificate lost unit conditional mean", defect};
  return make_step(space, m, std::move(cells), StepMethod::lp, std::nullopt);
}

// ---------------------------------------------------------------------------

OptionalDecomposition optional_decompose(const FilteredSpace& space, const AdaptedProcess& f,
                                         const MeasureFamily& family, Strategy strategy,
                                         const std::optional<A0Element>& xi0, double tol) {
  f.check_shape(space);
  for (const auto& slice : f.per_time())
    for (double v : slice)
      if (v < 0.0) throw Error(ErrorCode::PreconditionFailed, "optional decomposition needs f >= 0");
  const Classification cls = classify(space, f, family, tol);
  if (cls.kind == ProcessKind::not_supermartingale)
    throw Error(ErrorCode::NotSupermartingale,
                "defect " + std::to_string(cls.worst_violation.magnitude) + " at time " +
                    std::to_string(cls.worst_violation.time));

  const A0Element unit(RandomVariable::constant(space.n_atoms(), 1.0), family);
  const A0Element& seed = xi0 ? *xi0 : unit;

  OptionalDecomposition out;
  std::vector<std::vector<double>> mart{f.at(0)};
  std::vector<std::vector<double>> comp{std::vector<double>(1, 0.0)};
  for (int m = 1; m <= space.horizon(); ++m) {
    StepResult r = strategy == Strategy::lp ? xi0_step_lp(space, f, family, m, tol)
                                            : xi0_step_alpha(space, f, seed, family, m, 0, tol);
    if (strategy == Strategy::automatic && std::holds_alternative<StepFailure>(r))
      r = xi0_step_lp(space, f, family, m, tol);
    if (auto* failure = std::get_if<StepFailure>(&r)) throw NotLocallyRegular(*failure);

    Xi0Step step = std::get<Xi0Step>(std::move(r));
    std::vector<double> mm(space.cell_count(m));
    std::vector<double> gm(space.cell_count(m));
    for (std::size_t c = 0; c < mm.size(); ++c) {
      const std::size_t s = space.predecessor(m, c);
      const double prev = f.value(m - 1, s);
      mm[c] = mart.back()[s] + prev * (step.xi0_cells[c] - 1.0);
      gm[c] = comp.back()[s] + prev * step.xi0_cells[c] - f.value(m, c);
    }
    mart.push_back(std::move(mm));
    comp.push_back(std::move(gm));
    out.steps.push_back(std::move(step));
  }
  out.martingale = AdaptedProcess(space, std::move(mart));
  out.compensator = AdaptedProcess(space, std::move(comp));
  return out;
}

bool locally_regular(const FilteredSpace& space, const AdaptedProcess& f, const MeasureFamily& family, double tol) {
  if (classify(space, f, family, tol).kind == ProcessKind::not_supermartingale) return false;
  // Local regularity is shift invariant; move f onto [1, inf) so the ratio form applies.
  double low = 0.0;
  for (const auto& slice : f.per_time())
    for (double v : slice) low = std::min(low, v);
  const AdaptedProcess* target = &f;
  AdaptedProcess shifted;
  if (low < 0.0) {
    auto values = f.per_time();
    for (auto& slice : values)
      for (double& v : slice) v += 1.0 - low;
    shifted = AdaptedProcess(space, std::move(values));
    target = &shifted;
  }
  for (int m = 1; m <= space.horizon(); ++m)
    if (std::holds_alternative<StepFailure>(xi0_step_lp(space, *target, family, m, tol))) return false;
  return true;
}

// ---------------------------------------------------------------------------

const Check* VerificationReport::find(std::string_view name) const {
  for (const Check& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

VerificationReport verify_decomposition(const FilteredSpace& space, const AdaptedProcess& f,
                                        const OptionalDecomposition& decomposition, const MeasureFamily& family,
                                        double tol, std::uint64_t seed, std::size_t mixtures) {
  VerificationReport rep;
  const AdaptedProcess& mart = decomposition.martingale;
  const AdaptedProcess& comp = decomposition.compensator;
  try {
    f.check_shape(space);
    mart.check_shape(space);
    comp.check_shape(space);
    if (family.n_atoms() != space.n_atoms()) throw Error(ErrorCode::ShapeMismatch, "family does not fit the space");
  } catch (const std::exception& e) {
    rep.ok = false;
    rep.failures.emplace_back(std::string("shape: ") + e.what());
    return rep;
  }

  const int horizon = space.horizon();
  const auto add = [&](std::string name, double violation) {
    const bool passed = violation <= tol;
    rep.checks.push_back({std::move(name), violation, passed});
    if (!passed) {
      rep.ok = false;
      rep.failures.push_back(rep.checks.back().name + ": max violation " + std::to_string(violation));
    }
  };

  double recon = 0.0;
  double monotone = 0.0;
  for (int m = 0; m <= horizon; ++m)
    for (std::size_t c = 0; c < space.cell_count(m); ++c) {
      recon = std::max(recon, std::abs(f.value(m, c) - (mart.value(m, c) - comp.value(m, c))));
      if (m > 0) monotone = std::max(monotone, comp.value(m - 1, space.predecessor(m, c)) - comp.value(m, c));
    }
  add("reconstruction", recon);
  add("compensator_start", std::abs(comp.value(0, 0)));
  add("compensator_monotone", std::max(0.0, monotone));

  const auto martingale_defect = [&](const Measure& p) {
    double worst = 0.0;
    for (int m = 1; m <= horizon; ++m) {
      const auto ce = step_cond_exp(space, mart.at(m), p, m);
      for (std::size_t s = 0; s < ce.size(); ++s) worst = std::max(worst, std::abs(ce[s] - mart.value(m - 1, s)));
    }
    return worst;
  };
  double ext = 0.0;
  for (const Measure& p : family) ext = std::max(ext, martingale_defect(p));
  add("martingale_extremes", ext);

  std::mt19937_64 rng(seed);
  double mix = 0.0;
  for (std::size_t k = 0; k < mixtures; ++k) {
    const auto w = sample_simplex(family.size(), rng);
    try {
      mix = std::max(mix, martingale_defect(mixture(family, w)));
    } catch (const Error&) {
      // a sampled weight vector can round outside the simplex; skip it
    }
  }
  add("martingale_mixtures", mix);

  double reww = 0.0;
  double centering = 0.0;
  double kj = 0.0;
  rep.psi.assign(static_cast<std::size_t>(horizon) + 1, {});
  for (int m = 1; m <= horizon; ++m) {
    std::vector<double> dg(space.cell_count(m));
    std::vector<double> df(space.cell_count(m));
    for (std::size_t c = 0; c < dg.size(); ++c) {
      const std::size_t s = space.predecessor(m, c);
      dg[c] = comp.value(m, c) - comp.value(m - 1, s);
      df[c] = f.value(m - 1, s) - f.value(m, c);
    }
    for (const Measure& p : family) {
      const auto e_df = step_cond_exp(space, df, p, m);
      const auto e_dg = step_cond_exp(space, dg, p, m);
      const auto e_fm = step_cond_exp(space, f.at(m), p, m);
      for (std::size_t s = 0; s < e_df.size(); ++s) reww = std::max(reww, std::abs(e_df[s] - e_dg[s]));
      std::vector<double> psi(dg.size());
      for (std::size_t c = 0; c < dg.size(); ++c) {
        const std::size_t s = space.predecessor(m, c);
        psi[c] = dg[c] - e_dg[s];
        kj = std::max(kj, std::abs(dg[c] - (f.value(m - 1, s) - e_fm[s] + psi[c])));
      }
      centering = std::max(centering, max_abs(step_cond_exp(space, psi, p, m)));
      rep.psi[static_cast<std::size_t>(m)].push_back(std::move(psi));
    }
  }
  add("reww2", reww);
  add("psi_centering", centering);
  add("kj2", kj);
  return rep;
}

// ---------------------------------------------------------------------------

double hull_distance(const std::vector<std::vector<double>>& points, std::span<const double> target) {
  if (points.empty()) throw Error(ErrorCode::ShapeMismatch, "hull_distance needs at least one point");
  const std::size_t k = points.size();
  const std::size_t d = target.size();
  for (const auto& p : points)
    if (p.size() != d) throw Error(ErrorCode::LengthMismatch, "hull point dimension differs from target");
  // variables: lambda (k), e_plus (d), e_minus (d)
  lp::LinearProgram prog(k + 2 * d);
  for (std::size_t j = 0; j < 2 * d; ++j) prog.objective[k + j] = 1.0;
  std::vector<double> simplex(prog.n_vars(), 0.0);
  std::fill(simplex.begin(), simplex.begin() + static_cast<std::ptrdiff_t>(k), 1.0);
  prog.add_eq(std::move(simplex), 1.0);
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<double> row(prog.n_vars(), 0.0);
    for (std::size_t i = 0; i < k; ++i) row[i] = points[i][c];
    row[k + c] = -1.0;
    row[k + d + c] = 1.0;
    prog.add_eq(std::move(row), target[c]);
  }
  const auto out = lp::solve(prog);
  if (out.status != lp::Status::optimal)
    throw Error(ErrorCode::NumericalBreakdown, "hull distance LP did not reach an optimum");
  return std::max(0.0, out.value);
}

CompletenessReport completeness_check(const FilteredSpace& space, const MeasureFamily& family,
                                      const MartingaleDelta& delta, double tol) {
  require_time(space, delta.n, 1);
  if (delta.increments.size() != space.cell_count(delta.n))
    throw Error(ErrorCode::ShapeMismatch, "increments do not match F_n");
  CompletenessReport rep;
  rep.n = delta.n;
  const auto hull = contract(space, family, delta.n);
  for (std::size_t i : delta.minus)
    for (std::size_t j : delta.plus) {
      const double di = delta.increments[i];
      const double dj = delta.increments[j];
      PairMembership pm;
      pm.i = i;
      pm.j = j;
      pm.two_point.assign(space.cell_count(delta.n), 0.0);
      pm.two_point[i] = dj / (dj - di);
      pm.two_point[j] = -di / (dj - di);
      pm.distance = hull_distance(hull, pm.two_point);
      pm.inside = pm.distance <= tol;
      ++rep.pairs;
      if (pm.inside) ++rep.inside;
      rep.details.push_back(std::move(pm));
    }
  rep.fraction = rep.pairs == 0 ? 1.0 : static_cast<double>(rep.inside) / static_cast<double>(rep.pairs);
  return rep;
}

}  // namespace doobkit
