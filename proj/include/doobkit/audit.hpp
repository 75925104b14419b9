#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "doobkit/space.hpp"

namespace doobkit {

enum class ClaimId { lemma_q5, lemma_lkq4, lemma_tmars5, lemma_1q5, thm_fmars5, thm_mars12, thm_mmars1 };

inline constexpr ClaimId kAllClaims[] = {ClaimId::lemma_q5,   ClaimId::lemma_lkq4, ClaimId::lemma_tmars5,
                                         ClaimId::lemma_1q5,  ClaimId::thm_fmars5, ClaimId::thm_mars12,
                                         ClaimId::thm_mmars1};

/// "lemma-q5", "thm-fmars5", ...
std::string_view to_string(ClaimId id);
/// Throws Error{UnknownClaim}.
ClaimId parse_claim(std::string_view text);

/// What a claim is evaluated on. `f` is only read by thm-mmars1 (defaults to f = 1).
struct AuditInstance {
  FilteredSpace space;
  MeasureFamily family;
  RandomVariable xi;
  std::optional<AdaptedProcess> f;
};

enum class Verdict { pass, counterexample };

std::string_view to_string(Verdict verdict);

struct AuditResult {
  ClaimId claim = ClaimId::lemma_q5;
  Verdict verdict = Verdict::pass;
  double violation = 0.0;  // absolute size of the largest defect; <= tol on pass
  std::string detail;      // where the defect sits
  std::optional<AuditInstance> instance;
  std::size_t trials = 0;  // instances drawn by search_counterexample
};

/// Evaluates the claim literally on one instance.
/// Throws Error{ClaimPreconditionUnmet} when the instance is outside the claim's hypotheses.
AuditResult audit(ClaimId claim, const AuditInstance& instance, double tol = kDefaultTol);

/// Recomputes the violation and returns the absolute difference from the recorded one.
double replay(const AuditResult& result, double tol = kDefaultTol);

struct SearchLimits {
  std::size_t max_atoms = 8;
  int max_periods = 3;
  std::size_t min_extremes = 1;
  std::size_t max_extremes = 3;
};

/// Randomized search, deterministic in `seed`. A found witness is shrunk by
/// dropping extremes and atoms while it still violates the claim.
/// Throws Error{BadBudget} when budget == 0.
AuditResult search_counterexample(ClaimId claim, std::size_t budget, std::uint64_t seed,
                                  const SearchLimits& limits = {}, double tol = kDefaultTol);

/// Instance with one atom removed and every measure renormalized. Throws when no valid space remains.
AuditInstance drop_atom(const AuditInstance& instance, std::size_t atom);

}  // namespace doobkit
