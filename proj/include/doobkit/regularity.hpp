#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "doobkit/error.hpp"
#include "doobkit/space.hpp"

namespace doobkit {

// ---------------------------------------------------------------------------
// Classification

enum class ProcessKind { martingale, supermartingale_strict, not_supermartingale };

std::string_view to_string(ProcessKind kind);

/// Largest one-step defect E^{P_i}{f_m|F_{m-1}} - f_{m-1} found, with its location.
struct Violation {
  int time = 0;
  std::size_t cell = 0;     // cell of F_{time-1}
  std::size_t extreme = 0;
  double magnitude = 0.0;   // signed; > 0 breaks the supermartingale inequality
};

struct Classification {
  ProcessKind kind = ProcessKind::martingale;
  Violation worst_violation;
  double martingale_defect = 0.0;  // max |E^{P_i}{f_m|F_{m-1}} - f_{m-1}|
};

/// One-step check under every extreme. By the weighted mixture formula this
/// covers every measure in the hull.
Classification classify(const FilteredSpace& space, const AdaptedProcess& f, const MeasureFamily& family,
                        double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// The set A_0 = { xi >= 0 : E^P xi = 1 for every P in the family }

bool a0_membership(const RandomVariable& xi, const MeasureFamily& family, double tol = kStrictTol);

class A0Element {
 public:
  /// Throws Error{PreconditionFailed} unless `xi` is in A_0 to `tol`.
  A0Element(RandomVariable xi, const MeasureFamily& family, double tol = kStrictTol);

  const RandomVariable& xi() const noexcept { return xi_; }

 private:
  RandomVariable xi_;
};

/// LP over the A_0 polytope: maximizes <objective, xi> when given, otherwise
/// maximizes min_w xi(w) (which always returns xi = 1).
A0Element find_a0_element(const MeasureFamily& family, const std::optional<RandomVariable>& objective = std::nullopt);

// ---------------------------------------------------------------------------
// Uniform gap propagation

struct GapBoundReport {
  double lower = 1.0;        // l
  double upper = 1.0;        // L
  double eps0 = 0.5;         // L / (1 + L)
  double constant = 0.5;     // l / (1 + L)
  std::size_t samples = 0;
  double min_slack = 0.0;    // min over samples and cells of gap_Q - constant * phi
  bool holds = true;
};

/// Checks f_{m0-1} - E^Q{f_{m0}|F_{m0-1}} >= l/(1+L) phi for Q = (1-a) P_1 + a P_2,
/// a in [0, L/(1+L)], P_2 in the hull. Deterministic and sampled Q are both used.
/// Throws Error{PreconditionFailed} when the P_1 gap assumption, the sign or
/// measurability of phi, or the supermartingale property fails.
GapBoundReport uniform_gap_bound(const FilteredSpace& space, const AdaptedProcess& f, const MeasureFamily& family,
                                 int m0, const RandomVariable& phi, std::size_t samples = 100,
                                 std::uint64_t seed = 7, double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// Martingale increments m_n - m_{n-1} of m_n = E^{P_base}{xi_0|F_n}

struct MartingaleDelta {
  int n = 1;
  std::size_t base = 0;
  std::vector<double> increments;   // d_j^n, one per cell of F_n
  std::vector<std::size_t> minus;   // I^-: d <= 0
  std::vector<std::size_t> plus;    // I^+: d > 0
};

MartingaleDelta martingale_increments(const FilteredSpace& space, const A0Element& xi0, const MeasureFamily& family,
                                      std::size_t base_measure_index, int n);

/// max over extremes and cells of F_{n-1} of |E^{P_i}{d|F_{n-1}}|. Zero under the base
/// measure by construction; generally nonzero under the others.
double conditional_mean_defect(const FilteredSpace& space, const MartingaleDelta& delta, const MeasureFamily& family);

// ---------------------------------------------------------------------------
// alpha path

struct AlphaInterval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool empty = false;

  bool contains(double a) const { return !empty && a >= lower && a <= upper; }
  /// Upper end when finite, else lower end when finite, else 0.
  double preferred() const;
  AlphaInterval intersect(const AlphaInterval& other) const;
};

/// Feasible set of a with f_i <= 1 + a d_i for every cell.
AlphaInterval alpha_interval(std::span<const double> f_normalized, std::span<const double> increments);

enum class StepMethod { alpha, lp };

std::string_view to_string(StepMethod method);

/// Certificate xi_m^0 of one decomposition step.
struct Xi0Step {
  int m = 1;
  RandomVariable xi0;            // F_m-measurable
  std::vector<double> xi0_cells; // per cell of F_m
  StepMethod method = StepMethod::lp;
  std::optional<double> alpha;
};

struct StepFailure {
  int m = 1;
  std::optional<std::size_t> node;  // cell of F_{m-1}, when one is singled out
  std::string reason;
  double magnitude = 0.0;           // phase-one infeasibility or largest defect
};

using StepResult = std::variant<Xi0Step, StepFailure>;

/// f_m / f_{m-1} per cell of F_m; 1 on cells whose predecessor value is 0.
std::vector<double> step_ratio(const FilteredSpace& space, const AdaptedProcess& f, int m);

StepResult xi0_step_alpha(const FilteredSpace& space, const AdaptedProcess& f, const A0Element& xi0,
                          const MeasureFamily& family, int m, std::size_t base_measure_index = 0,
                          double tol = kDefaultTol);

/// Per node of F_{m-1}: xi^0 >= f_m/f_{m-1}, E^{P_i}{xi^0|F_{m-1}} = 1 for all i,
/// minimizing the node's sum of xi^0.
StepResult xi0_step_lp(const FilteredSpace& space, const AdaptedProcess& f, const MeasureFamily& family, int m,
                       double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// Optional decomposition f = M - g

struct OptionalDecomposition {
  AdaptedProcess martingale;
  AdaptedProcess compensator;
  std::vector<Xi0Step> steps;
};

enum class Strategy { lp, alpha_with_xi0, automatic };

class NotLocallyRegular : public Error {
 public:
  explicit NotLocallyRegular(StepFailure failure)
      : Error(ErrorCode::NotLocallyRegular, "step " + std::to_string(failure.m) + ": " + failure.reason),
        failure_(std::move(failure)) {}
  const StepFailure& failure() const noexcept { return failure_; }

 private:
  StepFailure failure_;
};

/// Throws Error{NotSupermartingale}, Error{PreconditionFailed} (negative f) or
/// NotLocallyRegular. `xi0` feeds the alpha path; xi = 1 when absent.
OptionalDecomposition optional_decompose(const FilteredSpace& space, const AdaptedProcess& f,
                                         const MeasureFamily& family, Strategy strategy = Strategy::lp,
                                         const std::optional<A0Element>& xi0 = std::nullopt,
                                         double tol = kDefaultTol);

/// All-steps feasibility of xi0_step_lp, i.e. local regularity of a nonnegative supermartingale.
bool locally_regular(const FilteredSpace& space, const AdaptedProcess& f, const MeasureFamily& family,
                     double tol = kDefaultTol);

struct Check {
  std::string name;
  double max_violation = 0.0;
  bool passed = true;
};

struct VerificationReport {
  bool ok = true;
  std::vector<Check> checks;
  std::vector<std::string> failures;
  /// psi[m][j][cell of F_m] = dg_m - E^{P_j}{dg_m|F_{m-1}}, m >= 1 (psi[0] empty).
  std::vector<std::vector<std::vector<double>>> psi;

  const Check* find(std::string_view name) const;
};

/// Never throws; shape problems become failures.
VerificationReport verify_decomposition(const FilteredSpace& space, const AdaptedProcess& f,
                                        const OptionalDecomposition& decomposition, const MeasureFamily& family,
                                        double tol = kDefaultTol, std::uint64_t seed = 11,
                                        std::size_t mixtures = 20);

// ---------------------------------------------------------------------------
// Completeness diagnostic

struct PairMembership {
  std::size_t i = 0;  // cell in I^-
  std::size_t j = 0;  // cell in I^+
  std::vector<double> two_point;  // the two-point contracted measure on F_n
  double distance = 0.0;          // l1 distance to the contracted hull
  bool inside = false;
};

struct CompletenessReport {
  int n = 1;
  std::size_t pairs = 0;
  std::size_t inside = 0;
  double fraction = 1.0;
  std::vector<PairMembership> details;
};

CompletenessReport completeness_check(const FilteredSpace& space, const MeasureFamily& family,
                                      const MartingaleDelta& delta, double tol = kDefaultTol);

/// l1 distance from `target` to the convex hull of `points` (LP).
double hull_distance(const std::vector<std::vector<double>>& points, std::span<const double> target);

}  // namespace doobkit
