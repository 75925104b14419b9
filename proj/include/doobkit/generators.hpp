#pragma once

#include <cstdint>
#include <random>

#include "doobkit/regularity.hpp"
#include "doobkit/space.hpp"

namespace doobkit::gen {

struct SpaceLimits {
  std::size_t min_atoms = 2;
  std::size_t max_atoms = 8;
  int max_periods = 3;
  /// Force F_N to be atom-fine, so every random variable is F_N-measurable.
  bool fine_terminal = false;
};

/// Random refining filtration. Atom labels are shuffled before splitting.
FilteredSpace random_space(std::mt19937_64& rng, const SpaceLimits& limits = {});

/// k strictly positive measures; atom weights are Exp(1) + floor before normalization.
MeasureFamily random_family(std::mt19937_64& rng, std::size_t n_atoms, std::size_t k, double floor = 0.05);

/// Pasting-stable family: per node, one or two conditional laws over successors;
/// extremes are all products of per-node choices, capped at max_extremes.
MeasureFamily product_family(const FilteredSpace& space, std::mt19937_64& rng, std::size_t max_extremes = 8);

/// Martingale under every extreme: increments drawn from the per-node nullspace of
/// { E^{P_i}{dN|F_{m-1}} = 0 }. N_0 = start.
AdaptedProcess random_family_martingale(const FilteredSpace& space, const MeasureFamily& family, std::mt19937_64& rng,
                                        double scale = 1.0, double start = 0.0);

/// f = N - g + c with N a family martingale, g non-decreasing from 0 and c chosen so
/// min f = margin. Returned pieces satisfy f = (N + c) - g.
struct SupermartingaleSample {
  AdaptedProcess f;
  AdaptedProcess martingale;   // N + c
  AdaptedProcess compensator;  // g
};

SupermartingaleSample random_supermartingale(const FilteredSpace& space, const MeasureFamily& family,
                                             std::mt19937_64& rng, double margin = 0.1);

/// Convex combination of 1 and a random vertex of the A_0 polytope.
A0Element random_a0_element(const MeasureFamily& family, std::mt19937_64& rng);

/// Uniform random variable on [low, high) per atom.
RandomVariable random_variable(std::mt19937_64& rng, std::size_t n_atoms, double low = 0.0, double high = 2.0);

}  // namespace doobkit::gen
