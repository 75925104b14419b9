#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace doobkit::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// minimize c.x  subject to  A_eq x = b_eq,  A_ge x >= b_ge,  x >= lower.
/// An empty `lower` means every variable is nonnegative; -kInfinity frees a variable.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> ge_rows;
  std::vector<double> ge_rhs;
  std::vector<double> lower;

  LinearProgram() = default;
  explicit LinearProgram(std::size_t n_vars) : objective(n_vars, 0.0) {}

  std::size_t n_vars() const noexcept { return objective.size(); }
  double lower_bound(std::size_t j) const { return lower.empty() ? 0.0 : lower[j]; }

  void add_eq(std::vector<double> row, double rhs);
  void add_ge(std::vector<double> row, double rhs);
  void add_le(std::vector<double> row, double rhs);
  void set_free(std::size_t j);

  /// Throws Error{ShapeMismatch} on inconsistent dimensions or non-finite data.
  void validate() const;
};

enum class Status { optimal, infeasible, unbounded };

enum class PivotRule {
  bland,    // smallest-index entering and leaving; terminates on degenerate problems
  dantzig,  // most negative reduced cost; falls back to Bland after a stall
};

struct SolveOptions {
  PivotRule rule = PivotRule::bland;
  std::size_t max_iterations = 200000;
  int verbosity = 0;           // >= 2 dumps every tableau to `log`
  std::ostream* log = nullptr;
};

struct LpOutcome {
  Status status = Status::infeasible;
  std::vector<double> x;
  double value = 0.0;

  // Recovered duals and certificates; filled when status == optimal.
  std::vector<double> eq_duals;
  std::vector<double> ge_duals;
  std::vector<double> reduced_costs;
  double dual_value = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementary_slackness = 0.0;

  // Phase-one optimum: sum of artificial levels. Zero (to tolerance) iff feasible.
  double infeasibility = 0.0;
  std::size_t iterations = 0;

  double duality_gap() const { return value - dual_value; }
};

/// Two-phase dense tableau simplex. Deterministic for a fixed input ordering.
/// Throws Error{NumericalBreakdown} when the iteration budget runs out or the
/// tableau turns non-finite.
LpOutcome solve(const LinearProgram& lp, const SolveOptions& options = {});

/// Phase-one only: a point satisfying the constraints of `system`, or none.
/// The objective of `system` is ignored.
std::optional<std::vector<double>> feasible_point(const LinearProgram& system, const SolveOptions& options = {});

/// max |A_eq x - b|, max(b - A_ge x, 0), max(lower - x, 0).
double primal_residual(const LinearProgram& lp, std::span<const double> x);

}  // namespace doobkit::lp
