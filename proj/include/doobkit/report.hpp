#pragma once

#include <optional>
#include <string>
#include <vector>

#include "doobkit/audit.hpp"
#include "doobkit/pricing.hpp"
#include "doobkit/regularity.hpp"
#include "doobkit/scenario.hpp"

namespace doobkit::report {

Json classification(const Classification& c);

/// status "ok" with the decomposition, or "fail" with an error message and no processes.
Json decomposition(const OptionalDecomposition* d, const VerificationReport* verification,
                   const std::string& error = {});

Json pricing(const PricingResult& result, const TradingStrategy* strategy = nullptr);

Json emm(const EmmResult& result, const std::optional<EmmReport>& check);

Json audit(const std::vector<AuditResult>& results);

/// Columns time, cell, X, H0, H, S; one row per cell of every F_m.
std::string capital_csv(const FilteredSpace& space, const TradingStrategy& strategy, const AdaptedProcess& s);

}  // namespace doobkit::report
