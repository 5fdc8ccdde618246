#pragma once

#include <string>

#include <json.hpp>

#include "labgauge/gauge.hpp"

namespace labgauge {

/// Parse a scenario from its JSON description.  The schema is strict: unknown
/// keys raise SchemaError carrying the JSON pointer of the offender, and
/// semantically inconsistent values raise ValidationError.  Optional parts
/// default to: flat connection, zero twist form, zero gauge field, zero
/// potential, seed 0, no tolerance overrides.
Scenario scenario_from_json(const nlohmann::json& j, const std::string& fallback_name = "");

/// Load a scenario from a JSON file; throws FileNotFound when unreadable.
Scenario load_scenario(const std::string& path);

/// Canonical JSON rendering of a scenario: alphabetically ordered keys,
/// expressions printed through the canonical expression printer, defaulted
/// parts omitted.  load(save(s)) reproduces s.
nlohmann::json scenario_to_json(const Scenario& s);

/// Write the canonical rendering to a file (two-space indentation).
void save_scenario(const Scenario& s, const std::string& path);

/// FNV-1a 64-bit digest of the canonical rendering, as 16 hex digits.
std::string scenario_digest(const Scenario& s);

}  // namespace labgauge
