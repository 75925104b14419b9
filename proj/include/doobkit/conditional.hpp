#pragma once

#include <random>
#include <span>
#include <vector>

#include "doobkit/space.hpp"

namespace doobkit {

/// E^P{xi | F_m} as one value per cell of F_m.
std::vector<double> cond_exp_cells(const FilteredSpace& space, const RandomVariable& xi, const Measure& p, int m);

/// E^P{xi | F_m} spread back onto atoms.
RandomVariable cond_exp(const FilteredSpace& space, const RandomVariable& xi, const Measure& p, int m);

/// E^Q{xi | F_m} for Q = sum_i w_i P_i, evaluated through the weighted formula
///   sum_i w_i E^{P_1}{phi_i|F_m} E^{P_i}{xi|F_m} / sum_i w_i E^{P_1}{phi_i|F_m},
/// phi_i = dP_i/dP_1. Throws Error{BadWeights}.
RandomVariable cond_exp_mixture(const FilteredSpace& space, const RandomVariable& xi, const MeasureFamily& family,
                                std::span<const double> weights, int m);

/// E^P{X|F_{m-1}} per cell of F_{m-1}, for X given by its values on the cells of F_m (m >= 1).
std::vector<double> step_cond_exp(const FilteredSpace& space, std::span<const double> cell_values, const Measure& p,
                                  int m);

/// E^{target}{xi|F_m} computed as E^{base}{xi * phi | F_m} with
/// phi = (d target / d base) / E^{base}{d target / d base | F_m}.
RandomVariable cond_exp_change_of_measure(const FilteredSpace& space, const RandomVariable& xi,
                                          const Measure& target, const Measure& base, int m);

/// Pointwise max over extremes of E^{P_i}{xi|F_m}; the essential supremum over the hull.
RandomVariable ess_sup_cond_exp(const FilteredSpace& space, const RandomVariable& xi, const MeasureFamily& family,
                                int m);

/// Per-cell version of ess_sup_cond_exp.
std::vector<double> ess_sup_cond_exp_cells(const FilteredSpace& space, const RandomVariable& xi,
                                           const MeasureFamily& family, int m);

/// Atomwise convex combination. Throws Error{BadWeights}.
Measure mixture(const MeasureFamily& family, std::span<const double> weights);

struct RnBounds {
  double lower = 1.0;  // l
  double upper = 1.0;  // L
};

/// Global min / max of dQ1/dQ2 over ordered extreme pairs and atoms.
/// Ratios of mixtures are bracketed by ratios of extremes, so these bound the hull.
RnBounds rn_bounds(const MeasureFamily& family);

/// Cell masses (P(A_1^m), ..., P(A_{N_m}^m)) for each extreme.
std::vector<std::vector<double>> contract(const FilteredSpace& space, const MeasureFamily& family, int m);
std::vector<double> contract(const FilteredSpace& space, const Measure& p, int m);

/// Sum over cells of |P1(A) - P2(A)|. Throws Error{LengthMismatch}.
double rho_metric(std::span<const double> p_contracted, std::span<const double> q_contracted);

/// Validates convex weights for a family of size k. Throws Error{BadWeights}.
void check_weights(std::span<const double> weights, std::size_t k);

/// Uniform draw from the (k-1)-simplex.
std::vector<double> sample_simplex(std::size_t k, std::mt19937_64& rng);

}  // namespace doobkit
