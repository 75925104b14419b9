#include "doobkit/pricing.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "doobkit/conditional.hpp"

namespace doobkit {

namespace {

void require_positive(const AdaptedProcess& s) {
  for (const auto& slice : s.per_time())
    for (double v : slice)
      if (!(v > 0.0)) throw Error(ErrorCode::BadMeasure, "asset prices must be strictly positive");
}

std::vector<double> claim_cells(const FilteredSpace& space, const RandomVariable& claim, double tol) {
  if (claim.size() != space.n_atoms()) throw Error(ErrorCode::ShapeMismatch, "claim length does not match the space");
  auto cells = restrict_to_cells(space, claim, space.horizon(), tol);
  for (double v : cells)
    if (v < 0.0) throw Error(ErrorCode::PreconditionFailed, "claims must be nonnegative");
  return cells;
}

double envelope_expectation(const RandomVariable& x, const MeasureFamily& family) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Measure& p : family) best = std::max(best, p.expectation(x));
  return best;
}

// Cell values of every generator's E^{P_i}{xi_j|F_N}: [i][j][cell].
std::vector<std::vector<std::vector<double>>> generator_cells(const FilteredSpace& space,
                                                               std::span<const RandomVariable> generators,
                                                               const MeasureFamily& family) {
  std::vector<std::vector<std::vector<double>>> out(family.size());
  for (std::size_t i = 0; i < family.size(); ++i)
    for (const RandomVariable& g : generators) out[i].push_back(cond_exp_cells(space, g, family[i], space.horizon()));
  return out;
}

}  // namespace

MarketModel::MarketModel(AdaptedProcess s) : assets{std::move(s)} { require_positive(assets.front()); }

MarketModel::MarketModel(std::vector<AdaptedProcess> s) : assets(std::move(s)) {
  if (assets.empty()) throw Error(ErrorCode::ShapeMismatch, "market needs at least one asset");
  for (const auto& a : assets) require_positive(a);
}

void check_bounds(const FilteredSpace& space, const AdaptedProcess& s, const PriceBounds& b) {
  const auto n = static_cast<std::size_t>(space.horizon()) + 1;
  if (b.lower.size() != n || b.upper.size() != n) throw Error(ErrorCode::BadBounds, "one bound pair per time");
  for (std::size_t m = 0; m < n; ++m) {
    if (!(b.lower[m] > 0.0) || b.lower[m] > b.upper[m]) throw Error(ErrorCode::BadBounds, "need 0 < D1 <= D2");
    if (m > 0 && (b.lower[m] > b.lower[m - 1] || b.upper[m] < b.upper[m - 1]))
      throw Error(ErrorCode::BadBounds, "bounds must widen over time");
    for (double v : s.at(static_cast<int>(m)))
      if (v < b.lower[m] || v > b.upper[m]) throw Error(ErrorCode::BadBounds, "price path leaves its bounds");
  }
}

std::string_view to_string(PricingMode mode) { return mode == PricingMode::a0 ? "a0" : "generators"; }

PricingResult fair_price_a0(const FilteredSpace& space, const RandomVariable& claim, const MeasureFamily& family,
                            double tol) {
  const auto fn = claim_cells(space, claim, tol);
  const std::size_t n = space.n_atoms();
  const int horizon = space.horizon();

  // variables: h (atoms), t
  lp::LinearProgram prog(n + 1);
  prog.objective[n] = 1.0;
  for (const Measure& p : family) {
    std::vector<double> row(n + 1, 0.0);
    for (std::size_t a = 0; a < n; ++a) row[a] = p[a];
    row[n] = -1.0;
    prog.add_eq(std::move(row), 0.0);
  }
  for (const Measure& p : family)
    for (std::size_t c = 0; c < space.cell_count(horizon); ++c) {
      const Cell& cell = space.cell(horizon, c);
      const double mass = p.mass(cell);
      std::vector<double> row(n + 1, 0.0);
      for (std::size_t a : cell) row[a] = p[a] / mass;
      prog.add_ge(std::move(row), fn[c]);
    }

  PricingResult out;
  out.mode = PricingMode::a0;
  out.certificate = lp::solve(prog);
  if (out.certificate.status != lp::Status::optimal)
    throw Error(ErrorCode::NumericalBreakdown, "a0 pricing LP did not reach an optimum");
  const double t = std::max(0.0, out.certificate.x[n]);
  std::vector<double> h(out.certificate.x.begin(), out.certificate.x.begin() + static_cast<std::ptrdiff_t>(n));
  for (double& v : h) v = std::max(v, 0.0);
  const RandomVariable hv(std::move(h));

  out.fair_price = t;
  out.dominator = cond_exp(space, hv, family[0], horizon);
  if (t > tol) {
    std::vector<double> xi(hv.values);
    for (double& v : xi) v /= t;
    out.xi = RandomVariable(std::move(xi));
  }
  out.lower_bound = envelope_expectation(claim, family);
  if (out.fair_price < out.lower_bound - 1e-8)
    throw Error(ErrorCode::NumericalBreakdown, "a0 price fell below max_i E^{P_i} f_N");
  return out;
}

PricingResult fair_price_generators(const FilteredSpace& space, const RandomVariable& claim,
                                    std::span<const RandomVariable> generators, const MeasureFamily& family,
                                    double tol) {
  const auto fn = claim_cells(space, claim, tol);
  if (generators.empty()) throw Error(ErrorCode::GeneratorNotInA0, "no generators given");
  for (std::size_t j = 0; j < generators.size(); ++j)
    if (!a0_membership(generators[j], family, tol))
      throw Error(ErrorCode::GeneratorNotInA0, "generator " + std::to_string(j) + " is not in A_0");

  const std::size_t k = generators.size();
  const auto ce = generator_cells(space, generators, family);
  lp::LinearProgram prog(k);
  std::fill(prog.objective.begin(), prog.objective.end(), 1.0);
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t c = 0; c < fn.size(); ++c) {
      std::vector<double> row(k);
      for (std::size_t j = 0; j < k; ++j) row[j] = ce[i][j][c];
      prog.add_ge(std::move(row), fn[c]);
    }

  PricingResult out;
  out.mode = PricingMode::generators;
  out.certificate = lp::solve(prog);
  if (out.certificate.status == lp::Status::infeasible)
    throw Error(ErrorCode::Infeasible, "no nonnegative combination of generators dominates the claim");
  if (out.certificate.status != lp::Status::optimal)
    throw Error(ErrorCode::NumericalBreakdown, "generator pricing LP did not reach an optimum");

  std::vector<double> c(out.certificate.x);
  for (double& v : c) v = std::max(v, 0.0);
  double f0 = 0.0;
  for (double v : c) f0 += v;
  out.fair_price = f0;

  std::vector<double> gamma(k, 0.0);
  if (f0 > 0.0)
    for (std::size_t j = 0; j < k; ++j) gamma[j] = c[j] / f0;
  else
    gamma[0] = 1.0;
  out.gamma = std::move(gamma);

  std::vector<double> dom(space.cell_count(space.horizon()), 0.0);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t cell = 0; cell < dom.size(); ++cell) dom[cell] += c[j] * ce[0][j][cell];
  out.dominator = expand_cells(space, space.horizon(), dom);
  out.lower_bound = envelope_expectation(claim, family);

  const PricingResult a0 = fair_price_a0(space, claim, family, tol);
  if (f0 < a0.fair_price - 1e-9)
    throw Error(ErrorCode::NumericalBreakdown, "generator price fell below the a0 price");
  return out;
}

double closed_form_call(double s0, double strike, double upper_bound) {
  if (!(s0 > 0.0) || !(strike >= 0.0) || !(upper_bound > 0.0))
    throw Error(ErrorCode::BadBounds, "call needs S0 > 0, K >= 0, D2 > 0");
  return strike <= upper_bound ? s0 * (1.0 - strike / upper_bound) : 0.0;
}

double closed_form_put(double strike, double lower_bound) {
  if (!(strike >= 0.0) || !(lower_bound > 0.0)) throw Error(ErrorCode::BadBounds, "put needs K >= 0, D1 > 0");
  return strike >= lower_bound ? strike - lower_bound : 0.0;
}

std::vector<RandomVariable> asset_generators(const FilteredSpace& space, const AdaptedProcess& s) {
  s.check_shape(space);
  const double s0 = s.value(0, 0);
  std::vector<RandomVariable> out;
  for (int m = 0; m <= space.horizon(); ++m) {
    RandomVariable g = s.expand(space, m);
    for (double& v : g.values) v /= s0;
    out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------

EmmResult find_emm(const FilteredSpace& space, const MarketModel& market, double tol) {
  const std::size_t n = space.n_atoms();
  // variables: Q (atoms), eps
  lp::LinearProgram prog(n + 1);
  prog.objective[n] = -1.0;
  std::vector<double> total(n + 1, 1.0);
  total[n] = 0.0;
  prog.add_eq(std::move(total), 1.0);
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<double> row(n + 1, 0.0);
    row[a] = 1.0;
    row[n] = -1.0;
    prog.add_ge(std::move(row), 0.0);
  }
  for (const AdaptedProcess& s : market.assets) {
    s.check_shape(space);
    for (int m = 1; m <= space.horizon(); ++m)
      for (std::size_t node = 0; node < space.cell_count(m - 1); ++node) {
        std::vector<double> row(n + 1, 0.0);
        for (std::size_t c : space.successors(m, node))
          for (std::size_t a : space.cell(m, c)) row[a] = s.value(m, c) - s.value(m - 1, node);
        prog.add_eq(std::move(row), 0.0);
      }
  }
  const auto out = lp::solve(prog);
  EmmResult res;
  if (out.status != lp::Status::optimal) return res;
  res.min_slack = out.x[n];
  if (res.min_slack <= tol) return res;
  std::vector<double> q(out.x.begin(), out.x.begin() + static_cast<std::ptrdiff_t>(n));
  double sum = 0.0;
  for (double& v : q) {
    v = std::max(v, res.min_slack);
    sum += v;
  }
  for (double& v : q) v /= sum;
  res.measure = Measure(std::move(q));
  return res;
}

EmmReport verify_emm(const FilteredSpace& space, const Measure& q, const MarketModel& market, double tol) {
  EmmReport rep;
  for (const AdaptedProcess& s : market.assets)
    for (int m = 1; m <= space.horizon(); ++m) {
      const auto ce = step_cond_exp(space, s.at(m), q, m);
      for (std::size_t node = 0; node < ce.size(); ++node)
        rep.max_residual = std::max(rep.max_residual, std::abs(ce[node] - s.value(m - 1, node)));
    }
  rep.passed = rep.max_residual <= tol;
  return rep;
}

// ---------------------------------------------------------------------------

NotRepresentable::NotRepresentable(int m, std::size_t node, double residual)
    : Error(ErrorCode::NotRepresentable, "time " + std::to_string(m) + ", node " + std::to_string(node) +
                                             ": residual " + std::to_string(residual)),
      m_(m),
      node_(node),
      residual_(residual) {}

PredictableProcess martingale_representation(const FilteredSpace& space, const AdaptedProcess& mp,
                                             const MarketModel& market, double tol) {
  mp.check_shape(space);
  const std::size_t d = market.dimension();
  PredictableProcess out;
  out.positions.resize(static_cast<std::size_t>(space.horizon()) + 1);
  for (int m = 1; m <= space.horizon(); ++m) {
    auto& slot = out.positions[static_cast<std::size_t>(m)];
    for (std::size_t node = 0; node < space.cell_count(m - 1); ++node) {
      const auto& kids = space.successors(m, node);
      Eigen::MatrixXd a(static_cast<Eigen::Index>(kids.size()), static_cast<Eigen::Index>(d));
      Eigen::VectorXd b(static_cast<Eigen::Index>(kids.size()));
      for (std::size_t k = 0; k < kids.size(); ++k) {
        for (std::size_t j = 0; j < d; ++j)
          a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
              market.assets[j].value(m, kids[k]) - market.assets[j].value(m - 1, node);
        b(static_cast<Eigen::Index>(k)) = mp.value(m, kids[k]) - mp.value(m - 1, node);
      }
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
      cod.setThreshold(1e-12);
      const Eigen::VectorXd h = cod.solve(b);
      const double residual = (a * h - b).lpNorm<Eigen::Infinity>();
      if (!(residual <= tol)) throw NotRepresentable(m, node, residual);
      slot.emplace_back(h.data(), h.data() + h.size());
    }
  }
  return out;
}

double representation_residual(const FilteredSpace& space, const AdaptedProcess& mp, const PredictableProcess& h,
                               const MarketModel& market) {
  std::vector<double> prev{mp.value(0, 0)};
  double worst = 0.0;
  for (int m = 1; m <= space.horizon(); ++m) {
    std::vector<double> now(space.cell_count(m));
    for (std::size_t c = 0; c < now.size(); ++c) {
      const std::size_t s = space.predecessor(m, c);
      double gain = 0.0;
      for (std::size_t j = 0; j < market.dimension(); ++j)
        gain += h.positions[static_cast<std::size_t>(m)][s][j] *
                (market.assets[j].value(m, c) - market.assets[j].value(m - 1, s));
      now[c] = prev[s] + gain;
      worst = std::max(worst, std::abs(now[c] - mp.value(m, c)));
    }
    prev = std::move(now);
  }
  return worst;
}

TradingStrategy superhedge_strategy(const FilteredSpace& space, const RandomVariable& claim, const MarketModel& market,
                                    const MeasureFamily& family, double tol) {
  for (std::size_t i = 0; i < family.size(); ++i)
    if (!verify_emm(space, family[i], market, tol).passed)
      throw Error(ErrorCode::FamilyNotEmm, "extreme " + std::to_string(i) + " is not a martingale measure of S");

  const AdaptedProcess& s = market.S();
  const auto gens = asset_generators(space, s);
  PricingResult pricing = fair_price_generators(space, claim, gens, family, tol);
  const double f0 = pricing.fair_price;
  const double s0 = s.value(0, 0);
  const auto& gamma = *pricing.gamma;

  std::vector<std::vector<double>> mvals{{f0}};
  for (int m = 1; m <= space.horizon(); ++m) {
    std::vector<double> now(space.cell_count(m), 0.0);
    for (std::size_t c = 0; c < now.size(); ++c) {
      const std::size_t atom = space.cell(m, c).front();
      double acc = 0.0;
      for (std::size_t i = 0; i < gamma.size(); ++i) {
        const int t = std::min(static_cast<int>(i), m);
        acc += gamma[i] * s.value(t, space.cell_of(t, atom));
      }
      now[c] = f0 / s0 * acc;
    }
    mvals.push_back(std::move(now));
  }
  AdaptedProcess mart(space, std::move(mvals));
  const PredictableProcess h = martingale_representation(space, mart, market, tol);

  TradingStrategy out;
  out.cash.push_back({f0});
  out.risky.push_back({0.0});
  std::vector<std::vector<double>> capital{{f0}};
  for (int m = 1; m <= space.horizon(); ++m) {
    const auto& pos = h.positions[static_cast<std::size_t>(m)];
    std::vector<double> cash(pos.size());
    std::vector<double> risky(pos.size());
    for (std::size_t node = 0; node < pos.size(); ++node) {
      risky[node] = pos[node][0];
      cash[node] = mart.value(m - 1, node) - risky[node] * s.value(m - 1, node);
    }
    std::vector<double> x(space.cell_count(m));
    for (std::size_t c = 0; c < x.size(); ++c) {
      const std::size_t node = space.predecessor(m, c);
      x[c] = cash[node] + risky[node] * s.value(m, c);
    }
    out.cash.push_back(std::move(cash));
    out.risky.push_back(std::move(risky));
    capital.push_back(std::move(x));
  }
  out.capital = AdaptedProcess(space, std::move(capital));
  out.pricing = std::move(pricing);
  out.martingale = std::move(mart);
  return out;
}

double self_financing_residual(const FilteredSpace& space, const TradingStrategy& st, const AdaptedProcess& s) {
  double worst = 0.0;
  for (int m = 1; m <= space.horizon(); ++m)
    for (std::size_t node = 0; node < space.cell_count(m - 1); ++node) {
      // positions held over (m-2, m-1]; at m = 1 that is the initial (cash f_0, risky 0)
      const std::size_t prev = m == 1 ? 0 : space.predecessor(m - 1, node);
      const double d_cash = st.cash[static_cast<std::size_t>(m)][node] - st.cash[static_cast<std::size_t>(m) - 1][prev];
      const double d_risky =
          st.risky[static_cast<std::size_t>(m)][node] - st.risky[static_cast<std::size_t>(m) - 1][prev];
      worst = std::max(worst, std::abs(d_cash + d_risky * s.value(m - 1, node)));
    }
  return worst;
}

}  // namespace doobkit
