#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace doobkit {

/// Equality tolerance used where a caller does not pass one.
inline constexpr double kDefaultTol = 1e-9;
/// Tolerance for identities that hold up to rounding only.
inline constexpr double kStrictTol = 1e-12;
/// Smallest admissible atom probability.
inline constexpr double kMinProbability = 1e-15;

using Cell = std::vector<std::size_t>;
using Partition = std::vector<Cell>;

/// Finite sample space with a refining sequence of partitions F_0 <= ... <= F_N.
///
/// Cells are canonical: atoms sorted inside each cell, cells ordered by their
/// least atom, so cell indices are stable for a given input.
class FilteredSpace {
 public:
  /// Validates and canonicalizes. Atom indices are 0-based.
  /// Throws Error{TrivialRootMissing | BadCover | NonRefining | ShapeMismatch}.
  static FilteredSpace build(std::size_t n_atoms, std::vector<Partition> partitions);

  std::size_t n_atoms() const noexcept { return n_atoms_; }
  int horizon() const noexcept { return static_cast<int>(partitions_.size()) - 1; }

  const Partition& partition(int m) const;
  std::size_t cell_count(int m) const { return partition(m).size(); }
  const Cell& cell(int m, std::size_t c) const { return partition(m).at(c); }

  /// Index of the cell of F_m containing `atom`.
  std::size_t cell_of(int m, std::size_t atom) const;

  /// For m >= 1: index of the cell of F_{m-1} that contains cell `c` of F_m.
  std::size_t predecessor(int m, std::size_t c) const;

  /// For m >= 1: cells of F_m contained in cell `node` of F_{m-1}.
  const std::vector<std::size_t>& successors(int m, std::size_t node) const;

  /// True when every cell of F_m is a single atom.
  bool atom_fine(int m) const { return cell_count(m) == n_atoms_; }

  friend bool operator==(const FilteredSpace&, const FilteredSpace&) = default;

 private:
  std::size_t n_atoms_ = 0;
  std::vector<Partition> partitions_;
  std::vector<std::vector<std::size_t>> cell_of_;      // [m][atom]
  std::vector<std::vector<std::size_t>> predecessor_;  // [m][cell], m >= 1
  std::vector<std::vector<std::vector<std::size_t>>> successors_;  // [m][node]
};

/// One real number per atom.
struct RandomVariable {
  std::vector<double> values;

  RandomVariable() = default;
  explicit RandomVariable(std::vector<double> v);
  static RandomVariable constant(std::size_t n, double c) { return RandomVariable(std::vector<double>(n, c)); }

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  std::span<const double> view() const noexcept { return values; }

  friend bool operator==(const RandomVariable&, const RandomVariable&) = default;
};

/// Strictly positive probability vector.
class Measure {
 public:
  /// Throws Error{BadMeasure} unless every entry exceeds kMinProbability and the
  /// entries sum to 1 within kStrictTol.
  explicit Measure(std::vector<double> probs);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }

  double mass(const Cell& cell) const;
  double expectation(const RandomVariable& xi) const;

  friend bool operator==(const Measure&, const Measure&) = default;

 private:
  std::vector<double> probs_;
};

/// Extreme points P_1..P_k of the convex family M.
class MeasureFamily {
 public:
  /// Throws Error{ShapeMismatch} when k == 0 or sizes differ,
  /// Error{DuplicateExtreme} when two extremes coincide.
  explicit MeasureFamily(std::vector<Measure> extremes);

  std::size_t size() const noexcept { return extremes_.size(); }
  std::size_t n_atoms() const noexcept { return extremes_.front().size(); }
  const Measure& operator[](std::size_t i) const { return extremes_.at(i); }
  const std::vector<Measure>& extremes() const noexcept { return extremes_; }

  auto begin() const { return extremes_.begin(); }
  auto end() const { return extremes_.end(); }

 private:
  std::vector<Measure> extremes_;
};

/// Values per cell per time; the time-m slice has one entry per cell of F_m.
class AdaptedProcess {
 public:
  AdaptedProcess() = default;
  /// Throws Error{ShapeMismatch} when the slice sizes do not match the space.
  AdaptedProcess(const FilteredSpace& space, std::vector<std::vector<double>> per_time);

  /// Samples an F_m-measurable random variable onto cells for every m.
  /// Throws Error{NotMeasurable} if some slice is not constant on cells.
  static AdaptedProcess from_atoms(const FilteredSpace& space, std::span<const RandomVariable> per_time,
                                   double tol = kDefaultTol);

  int horizon() const noexcept { return static_cast<int>(per_time_.size()) - 1; }
  const std::vector<double>& at(int m) const { return per_time_.at(static_cast<std::size_t>(m)); }
  double value(int m, std::size_t cell) const { return at(m).at(cell); }
  const std::vector<std::vector<double>>& per_time() const noexcept { return per_time_; }

  /// The time-m value as a random variable on atoms.
  RandomVariable expand(const FilteredSpace& space, int m) const;

  /// Throws Error{ShapeMismatch} unless this process fits `space`.
  void check_shape(const FilteredSpace& space) const;

  friend bool operator==(const AdaptedProcess&, const AdaptedProcess&) = default;

 private:
  std::vector<std::vector<double>> per_time_;
};

/// Spreads per-cell values of F_m onto atoms.
RandomVariable expand_cells(const FilteredSpace& space, int m, std::span<const double> cell_values);

/// Per-cell values of an F_m-measurable variable. Throws Error{NotMeasurable}.
std::vector<double> restrict_to_cells(const FilteredSpace& space, const RandomVariable& xi, int m,
                                      double tol = kDefaultTol);

bool is_measurable(const FilteredSpace& space, const RandomVariable& xi, int m, double tol = kDefaultTol);

}  // namespace doobkit
