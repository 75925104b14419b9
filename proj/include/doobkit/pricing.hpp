#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "doobkit/error.hpp"
#include "doobkit/lp.hpp"
#include "doobkit/regularity.hpp"
#include "doobkit/space.hpp"

namespace doobkit {

/// Price paths of d risky assets; the numeraire is 1.
struct MarketModel {
  std::vector<AdaptedProcess> assets;

  /// Single-asset market. Throws Error{BadMeasure} unless S > 0.
  explicit MarketModel(AdaptedProcess s);
  explicit MarketModel(std::vector<AdaptedProcess> s);

  const AdaptedProcess& S() const { return assets.front(); }
  std::size_t dimension() const noexcept { return assets.size(); }
};

/// Optional deterministic bounds D^1_m <= S_m <= D^2_m.
struct PriceBounds {
  std::vector<double> lower;  // D^1_m, m = 0..N
  std::vector<double> upper;  // D^2_m
};

/// Throws Error{BadBounds} when the bounds are malformed, violated by S, or not nested
/// (D^1 non-increasing, D^2 non-decreasing, D^1 > 0).
void check_bounds(const FilteredSpace& space, const AdaptedProcess& s, const PriceBounds& bounds);

enum class PricingMode { a0, generators };

std::string_view to_string(PricingMode mode);

struct PricingResult {
  PricingMode mode = PricingMode::a0;
  double fair_price = 0.0;
  RandomVariable dominator;           // fair_price * E{xi|F_N}, on atoms
  std::optional<RandomVariable> xi;   // h / t in A_0 (a0 mode, t > 0)
  std::optional<std::vector<double>> gamma;  // generator weights (generators mode)
  double lower_bound = 0.0;           // max_i E^{P_i} f_N
  lp::LpOutcome certificate;          // the solved LP with duals
};

/// Claim must be F_N-measurable and nonnegative. Throws Error{NotMeasurable | PreconditionFailed}.
PricingResult fair_price_a0(const FilteredSpace& space, const RandomVariable& claim, const MeasureFamily& family,
                            double tol = kDefaultTol);

/// Generators must be in A_0 (Error{GeneratorNotInA0}). The result is compared against
/// fair_price_a0; a price below it raises Error{NumericalBreakdown}. Error{Infeasible}
/// when no combination dominates the claim.
PricingResult fair_price_generators(const FilteredSpace& space, const RandomVariable& claim,
                                    std::span<const RandomVariable> generators, const MeasureFamily& family,
                                    double tol = kDefaultTol);

/// S_0 (1 - K / D^2_N) when K <= D^2_N, else 0. Throws Error{BadBounds}.
double closed_form_call(double s0, double strike, double upper_bound);
/// K - D^1_N when K >= D^1_N, else 0. Throws Error{BadBounds}.
double closed_form_put(double strike, double lower_bound);

/// S_i / S_0 for i = 0..N, expanded to atoms.
std::vector<RandomVariable> asset_generators(const FilteredSpace& space, const AdaptedProcess& s);

struct EmmResult {
  std::optional<Measure> measure;
  double min_slack = 0.0;
};

/// Max-min-slack LP over all martingale measures of the market.
EmmResult find_emm(const FilteredSpace& space, const MarketModel& market, double tol = 1e-10);

struct EmmReport {
  double max_residual = 0.0;
  bool passed = true;
};

EmmReport verify_emm(const FilteredSpace& space, const Measure& q, const MarketModel& market, double tol = kDefaultTol);

/// Values at time m live on cells of F_{m-1}: positions[m][node][asset], m >= 1 (positions[0] unused).
struct PredictableProcess {
  std::vector<std::vector<std::vector<double>>> positions;
};

class NotRepresentable : public Error {
 public:
  NotRepresentable(int m, std::size_t node, double residual);
  int time() const noexcept { return m_; }
  std::size_t node() const noexcept { return node_; }
  double residual() const noexcept { return residual_; }

 private:
  int m_;
  std::size_t node_;
  double residual_;
};

/// Per node, the least-norm H with H . dS(child) = dM(child) for every child.
/// Throws NotRepresentable when a node's residual exceeds tol.
PredictableProcess martingale_representation(const FilteredSpace& space, const AdaptedProcess& m,
                                             const MarketModel& market, double tol = kDefaultTol);

/// max |M_m - M_0 - sum_i <H_i, dS_i>| over all times and cells.
double representation_residual(const FilteredSpace& space, const AdaptedProcess& m, const PredictableProcess& h,
                               const MarketModel& market);

struct TradingStrategy {
  std::vector<std::vector<double>> cash;   // H0_m per cell of F_{m-1} (m >= 1); cash[0] = {f_0}
  std::vector<std::vector<double>> risky;  // H_m per cell of F_{m-1}; risky[0] = {0}
  AdaptedProcess capital;                  // X_m = H0_m + H_m S_m
  PricingResult pricing;
  AdaptedProcess martingale;               // M_m = (f_0 / S_0) sum_i gamma_i S_{i ^ m}
};

/// Self-financing superhedge from the generator price with generators {S_i/S_0}.
/// Throws Error{FamilyNotEmm} unless every extreme is a martingale measure of S, and
/// propagates NotRepresentable.
TradingStrategy superhedge_strategy(const FilteredSpace& space, const RandomVariable& claim, const MarketModel& market,
                                    const MeasureFamily& family, double tol = kDefaultTol);

/// max |dH0_m + dH_m S_{m-1}| over nodes, with the strategy's H evaluated at m and m+1.
double self_financing_residual(const FilteredSpace& space, const TradingStrategy& strategy, const AdaptedProcess& s);

}  // namespace doobkit
