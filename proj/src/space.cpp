#include "doobkit/space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "doobkit/error.hpp"

namespace doobkit {

namespace {

std::string at_time(int m) { return " (time " + std::to_string(m) + ")"; }

}  // namespace

FilteredSpace FilteredSpace::build(std::size_t n_atoms, std::vector<Partition> partitions) {
  if (n_atoms == 0) throw Error(ErrorCode::ShapeMismatch, "space needs at least one atom");
  if (partitions.size() < 2) throw Error(ErrorCode::ShapeMismatch, "horizon must be at least 1");

  FilteredSpace space;
  space.n_atoms_ = n_atoms;
  space.cell_of_.assign(partitions.size(), std::vector<std::size_t>(n_atoms));

  for (std::size_t m = 0; m < partitions.size(); ++m) {
    auto& part = partitions[m];
    std::vector<int> seen(n_atoms, 0);
    for (auto& cell : part) {
      if (cell.empty()) throw Error(ErrorCode::BadCover, "empty cell" + at_time(static_cast<int>(m)));
      std::sort(cell.begin(), cell.end());
      for (std::size_t a : cell) {
        if (a >= n_atoms) throw Error(ErrorCode::BadCover, "atom index out of range" + at_time(static_cast<int>(m)));
        if (++seen[a] > 1) throw Error(ErrorCode::BadCover, "atom in two cells" + at_time(static_cast<int>(m)));
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw Error(ErrorCode::BadCover, "atom not covered" + at_time(static_cast<int>(m)));

    std::sort(part.begin(), part.end(), [](const Cell& a, const Cell& b) { return a.front() < b.front(); });
    for (std::size_t c = 0; c < part.size(); ++c)
      for (std::size_t a : part[c]) space.cell_of_[m][a] = c;
  }

  if (partitions[0].size() != 1) throw Error(ErrorCode::TrivialRootMissing, "F_0 must be {empty, Omega}");

  space.predecessor_.resize(partitions.size());
  space.successors_.resize(partitions.size());
  for (std::size_t m = 1; m < partitions.size(); ++m) {
    space.predecessor_[m].resize(partitions[m].size());
    space.successors_[m].resize(partitions[m - 1].size());
    for (std::size_t c = 0; c < partitions[m].size(); ++c) {
      const Cell& cell = partitions[m][c];
      const std::size_t parent = space.cell_of_[m - 1][cell.front()];
      for (std::size_t a : cell) {
        if (space.cell_of_[m - 1][a] != parent)
          throw Error(ErrorCode::NonRefining, "cell splits across cells of the previous partition" +
                                                  at_time(static_cast<int>(m)));
      }
      space.predecessor_[m][c] = parent;
      space.successors_[m][parent].push_back(c);
    }
  }
  space.partitions_ = std::move(partitions);
  return space;
}

const Partition& FilteredSpace::partition(int m) const {
  if (m < 0 || m > horizon()) throw Error(ErrorCode::ShapeMismatch, "time index out of range" + at_time(m));
  return partitions_[static_cast<std::size_t>(m)];
}

std::size_t FilteredSpace::cell_of(int m, std::size_t atom) const {
  partition(m);
  return cell_of_[static_cast<std::size_t>(m)].at(atom);
}

std::size_t FilteredSpace::predecessor(int m, std::size_t c) const {
  if (m < 1) throw Error(ErrorCode::ShapeMismatch, "F_0 has no predecessor");
  partition(m);
  return predecessor_[static_cast<std::size_t>(m)].at(c);
}

const std::vector<std::size_t>& FilteredSpace::successors(int m, std::size_t node) const {
  if (m < 1) throw Error(ErrorCode::ShapeMismatch, "successors are defined for m >= 1");
  partition(m);
  return successors_[static_cast<std::size_t>(m)].at(node);
}

RandomVariable::RandomVariable(std::vector<double> v) : values(std::move(v)) {
  for (double x : values)
    if (!std::isfinite(x)) throw Error(ErrorCode::ShapeMismatch, "random variable has a non-finite entry");
}

Measure::Measure(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw Error(ErrorCode::BadMeasure, "empty probability vector");
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p <= kMinProbability)
      throw Error(ErrorCode::BadMeasure, "probabilities must be strictly positive");
    total += p;
  }
  if (std::abs(total - 1.0) > kStrictTol)
    throw Error(ErrorCode::BadMeasure, "probabilities sum to " + std::to_string(total));
}

double Measure::mass(const Cell& cell) const {
  double s = 0.0;
  for (std::size_t a : cell) s += probs_.at(a);
  return s;
}

double Measure::expectation(const RandomVariable& xi) const {
  if (xi.size() != probs_.size()) throw Error(ErrorCode::ShapeMismatch, "random variable length");
  return std::inner_product(probs_.begin(), probs_.end(), xi.values.begin(), 0.0);
}

MeasureFamily::MeasureFamily(std::vector<Measure> extremes) : extremes_(std::move(extremes)) {
  if (extremes_.empty()) throw Error(ErrorCode::ShapeMismatch, "family needs at least one extreme");
  const std::size_t n = extremes_.front().size();
  for (const auto& p : extremes_)
    if (p.size() != n) throw Error(ErrorCode::ShapeMismatch, "extremes defined on different spaces");
  for (std::size_t i = 0; i < extremes_.size(); ++i) {
    for (std::size_t j = i + 1; j < extremes_.size(); ++j) {
      double diff = 0.0;
      for (std::size_t a = 0; a < n; ++a) diff = std::max(diff, std::abs(extremes_[i][a] - extremes_[j][a]));
      if (diff <= kMinProbability)
        throw Error(ErrorCode::DuplicateExtreme,
                    "extremes " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
    }
  }
}

AdaptedProcess::AdaptedProcess(const FilteredSpace& space, std::vector<std::vector<double>> per_time)
    : per_time_(std::move(per_time)) {
  check_shape(space);
  for (const auto& slice : per_time_)
    for (double x : slice)
      if (!std::isfinite(x)) throw Error(ErrorCode::ShapeMismatch, "process has a non-finite entry");
}

AdaptedProcess AdaptedProcess::from_atoms(const FilteredSpace& space, std::span<const RandomVariable> per_time,
                                          double tol) {
  std::vector<std::vector<double>> cells;
  cells.reserve(per_time.size());
  for (std::size_t m = 0; m < per_time.size(); ++m)
    cells.push_back(restrict_to_cells(space, per_time[m], static_cast<int>(m), tol));
  return AdaptedProcess(space, std::move(cells));
}

void AdaptedProcess::check_shape(const FilteredSpace& space) const {
  if (horizon() != space.horizon())
    throw Error(ErrorCode::ShapeMismatch, "process horizon " + std::to_string(horizon()) + " vs space horizon " +
                                              std::to_string(space.horizon()));
  for (int m = 0; m <= horizon(); ++m)
    if (at(m).size() != space.cell_count(m))
      throw Error(ErrorCode::ShapeMismatch, "process slice size does not match cell count" + at_time(m));
}

RandomVariable AdaptedProcess::expand(const FilteredSpace& space, int m) const {
  return expand_cells(space, m, at(m));
}

RandomVariable expand_cells(const FilteredSpace& space, int m, std::span<const double> cell_values) {
  if (cell_values.size() != space.cell_count(m))
    throw Error(ErrorCode::ShapeMismatch, "cell value count" + at_time(m));
  std::vector<double> out(space.n_atoms());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = cell_values[space.cell_of(m, a)];
  return RandomVariable(std::move(out));
}

bool is_measurable(const FilteredSpace& space, const RandomVariable& xi, int m, double tol) {
  if (xi.size() != space.n_atoms()) return false;
  for (const Cell& cell : space.partition(m))
    for (std::size_t a : cell)
      if (std::abs(xi[a] - xi[cell.front()]) > tol) return false;
  return true;
}

std::vector<double> restrict_to_cells(const FilteredSpace& space, const RandomVariable& xi, int m, double tol) {
  if (xi.size() != space.n_atoms()) throw Error(ErrorCode::ShapeMismatch, "random variable length");
  if (!is_measurable(space, xi, m, tol))
    throw Error(ErrorCode::NotMeasurable, "value is not constant on cells" + at_time(m));
  std::vector<double> out;
  out.reserve(space.cell_count(m));
  for (const Cell& cell : space.partition(m)) out.push_back(xi[cell.front()]);
  return out;
}

}  // namespace doobkit
