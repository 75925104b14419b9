#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doobkit/space.hpp"

namespace doobkit::testing {

// Atoms are 0-based here; the scenario files use 1-based indices.
inline FilteredSpace fixture_b_space() {
  return FilteredSpace::build(4, {{{0, 1, 2, 3}}, {{0, 1}, {2, 3}}, {{0}, {1}, {2}, {3}}});
}

inline MeasureFamily fixture_b_family() {
  return MeasureFamily({Measure({0.25, 0.25, 0.25, 0.25}), Measure({0.4, 0.1, 0.1, 0.4})});
}

inline RandomVariable fixture_b_xi() { return RandomVariable({1.2, 0.8, 1.2, 0.8}); }

inline FilteredSpace fixture_a_space() { return FilteredSpace::build(3, {{{0, 1, 2}}, {{0}, {1}, {2}}}); }

inline MeasureFamily fixture_a_family() {
  return MeasureFamily({Measure({0.3, 0.5, 0.2}), Measure({0.57, 0.05, 0.38})});
}

inline AdaptedProcess fixture_a_price(const FilteredSpace& space) {
  return AdaptedProcess(space, {{100.0}, {120.0, 100.0, 70.0}});
}

inline RandomVariable fixture_a_call() { return RandomVariable({30.0, 10.0, 0.0}); }
inline RandomVariable fixture_a_put() { return RandomVariable({0.0, 0.0, 10.0}); }

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = a.size() == b.size() ? 0.0 : 1e300;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace doobkit::testing
