#include "doobkit/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doobkit/error.hpp"

namespace doobkit {

std::vector<double> cond_exp_cells(const FilteredSpace& space, const RandomVariable& xi, const Measure& p, int m) {
  if (xi.size() != space.n_atoms() || p.size() != space.n_atoms())
    throw Error(ErrorCode::ShapeMismatch, "cond_exp: length does not match the space");
  const Partition& part = space.partition(m);
  std::vector<double> out(part.size());
  for (std::size_t c = 0; c < part.size(); ++c) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t a : part[c]) {
      num += xi[a] * p[a];
      den += p[a];
    }
    out[c] = num / den;
  }
  return out;
}

RandomVariable cond_exp(const FilteredSpace& space, const RandomVariable& xi, const Measure& p, int m) {
  return expand_cells(space, m, cond_exp_cells(space, xi, p, m));
}

std::vector<double> step_cond_exp(const FilteredSpace& space, std::span<const double> cell_values, const Measure& p,
                                  int m) {
  if (m < 1 || cell_values.size() != space.cell_count(m))
    throw Error(ErrorCode::ShapeMismatch, "step_cond_exp: values do not match F_m");
  const std::size_t nodes = space.cell_count(m - 1);
  std::vector<double> out(nodes);
  for (std::size_t s = 0; s < nodes; ++s) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t c : space.successors(m, s)) {
      const double w = p.mass(space.cell(m, c));
      num += w * cell_values[c];
      den += w;
    }
    out[s] = num / den;
  }
  return out;
}

void check_weights(std::span<const double> weights, std::size_t k) {
  if (weights.size() != k) throw Error(ErrorCode::BadWeights, "weight count does not match the family");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw Error(ErrorCode::BadWeights, "weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > kStrictTol) throw Error(ErrorCode::BadWeights, "weights must sum to 1");
}

RandomVariable cond_exp_mixture(const FilteredSpace& space, const RandomVariable& xi, const MeasureFamily& family,
                                std::span<const double> weights, int m) {
  check_weights(weights, family.size());
  const Measure& p1 = family[0];
  const std::size_t n = space.n_atoms();

  std::vector<double> num(space.cell_count(m), 0.0);
  std::vector<double> den(space.cell_count(m), 0.0);
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (weights[i] == 0.0) continue;
    std::vector<double> phi(n);
    for (std::size_t a = 0; a < n; ++a) phi[a] = family[i][a] / p1[a];
    const auto density = cond_exp_cells(space, RandomVariable(std::move(phi)), p1, m);
    const auto inner = cond_exp_cells(space, xi, family[i], m);
    for (std::size_t c = 0; c < num.size(); ++c) {
      num[c] += weights[i] * density[c] * inner[c];
      den[c] += weights[i] * density[c];
    }
  }
  for (std::size_t c = 0; c < num.size(); ++c) num[c] /= den[c];
  return expand_cells(space, m, num);
}

RandomVariable cond_exp_change_of_measure(const FilteredSpace& space, const RandomVariable& xi,
                                          const Measure& target, const Measure& base, int m) {
  const std::size_t n = space.n_atoms();
  std::vector<double> ratio(n);
  for (std::size_t a = 0; a < n; ++a) ratio[a] = target[a] / base[a];
  const RandomVariable ratio_rv(ratio);
  const RandomVariable normalizer = cond_exp(space, ratio_rv, base, m);
  std::vector<double> weighted(n);
  for (std::size_t a = 0; a < n; ++a) weighted[a] = xi[a] * ratio[a] / normalizer[a];
  return cond_exp(space, RandomVariable(std::move(weighted)), base, m);
}

std::vector<double> ess_sup_cond_exp_cells(const FilteredSpace& space, const RandomVariable& xi,
                                           const MeasureFamily& family, int m) {
  std::vector<double> out = cond_exp_cells(space, xi, family[0], m);
  for (std::size_t i = 1; i < family.size(); ++i) {
    const auto ce = cond_exp_cells(space, xi, family[i], m);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = std::max(out[c], ce[c]);
  }
  return out;
}

RandomVariable ess_sup_cond_exp(const FilteredSpace& space, const RandomVariable& xi, const MeasureFamily& family,
                                int m) {
  return expand_cells(space, m, ess_sup_cond_exp_cells(space, xi, family, m));
}

Measure mixture(const MeasureFamily& family, std::span<const double> weights) {
  check_weights(weights, family.size());
  std::vector<double> probs(family.n_atoms(), 0.0);
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t a = 0; a < probs.size(); ++a) probs[a] += weights[i] * family[i][a];
  // Absorb the rounding residue so the result passes the unit-sum check.
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& p : probs) p /= total;
  return Measure(std::move(probs));
}

RnBounds rn_bounds(const MeasureFamily& family) {
  RnBounds b;
  for (const Measure& q1 : family)
    for (const Measure& q2 : family)
      for (std::size_t a = 0; a < family.n_atoms(); ++a) {
        const double r = q1[a] / q2[a];
        b.lower = std::min(b.lower, r);
        b.upper = std::max(b.upper, r);
      }
  return b;
}

std::vector<double> contract(const FilteredSpace& space, const Measure& p, int m) {
  std::vector<double> out;
  out.reserve(space.cell_count(m));
  for (const Cell& cell : space.partition(m)) out.push_back(p.mass(cell));
  return out;
}

std::vector<std::vector<double>> contract(const FilteredSpace& space, const MeasureFamily& family, int m) {
  std::vector<std::vector<double>> out;
  out.reserve(family.size());
  for (const Measure& p : family) out.push_back(contract(space, p, m));
  return out;
}

double rho_metric(std::span<const double> p_contracted, std::span<const double> q_contracted) {
  if (p_contracted.size() != q_contracted.size())
    throw Error(ErrorCode::LengthMismatch, "contractions have different cell counts");
  double s = 0.0;
  for (std::size_t j = 0; j < p_contracted.size(); ++j) s += std::abs(p_contracted[j] - q_contracted[j]);
  return s;
}

std::vector<double> sample_simplex(std::size_t k, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (double& x : w) {
    x = expo(rng);
    total += x;
  }
  for (double& x : w) x /= total;
  // Renormalize against rounding.
  const double again = std::accumulate(w.begin(), w.end(), 0.0);
  w.back() += 1.0 - again;
  if (w.back() < 0.0) w.back() = 0.0;
  return w;
}

}  // namespace doobkit
