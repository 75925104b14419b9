#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "doobkit/audit.hpp"
#include "doobkit/space.hpp"

namespace doobkit {

using Json = nlohmann::ordered_json;

struct ScenarioClaim {
  int time = 0;
  std::vector<double> values;  // per canonical cell of F_time
  RandomVariable atoms;        // expanded
};

/// A scenario file after validation. Cell-indexed data is stored in canonical cell order.
struct Scenario {
  FilteredSpace space;
  std::vector<std::string> measure_names;       // file order
  std::optional<MeasureFamily> family;          // absent when the file lists no measures
  std::vector<std::pair<std::string, AdaptedProcess>> processes;
  std::vector<std::pair<std::string, ScenarioClaim>> claims;

  const AdaptedProcess* process(const std::string& name) const;
  const ScenarioClaim* claim(const std::string& name) const;

  /// Throws Error{Schema} naming what is missing.
  const MeasureFamily& require_family() const;
  const AdaptedProcess& require_process(const std::string& name) const;
  const ScenarioClaim& require_claim(const std::string& name) const;
};

/// Structural checks raise Error{Schema}; space and measure invariants raise their own codes.
/// Atom indices are 1-based in the document.
Scenario parse_scenario(const Json& doc);

/// Reads and parses a file. Throws Error{Io} when the file cannot be read, Error{Schema} on bad JSON.
Scenario load_scenario(const std::filesystem::path& path);

/// Serializes with canonical cell order and 1-based atoms; parse_scenario(to_json(s)) reproduces s.
Json to_json(const Scenario& scenario);

/// Scenario encoding of an audit instance: measures P1..Pk, claim "xi" at time N
/// (requires xi to be F_N-measurable), process "f" when present.
Json instance_to_json(const AuditInstance& instance);

/// Inverse of instance_to_json. `xi_claim` and `process` select the scenario entries.
AuditInstance instance_from_scenario(const Scenario& scenario, const std::string& xi_claim = "xi",
                                     const std::optional<std::string>& process = std::nullopt);

}  // namespace doobkit
