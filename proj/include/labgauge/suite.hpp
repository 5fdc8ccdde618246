#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "labgauge/gauge.hpp"

namespace labgauge {

/// What to run and how hard.
struct SuiteSpec {
  std::string suite = "all";  ///< calculus | gauge | redefinition | obstruction | bianchi | all
  int points = 50;            ///< sample-point budget per check
  std::uint64_t seed = 7;     ///< master seed; every check derives its own stream from it
  std::string format = "text";  ///< text | json
};

/// Outcome of one check.
struct CheckRecord {
  std::string id;        ///< e.g. "calculus/ad-wedge"
  std::string anchor;    ///< the mathematical statement being verified, in words
  double residual = 0.0; ///< measured residual (-1 when the check threw before measuring)
  double tolerance = 0.0;
  bool pass = false;
  double seconds = 0.0;
  std::string note;      ///< verdicts, classifications, or the error message on failure
};

/// Outcome of a whole run.
struct SuiteReport {
  std::string scenario_name;
  std::string digest;     ///< digest of the canonical scenario rendering
  std::uint64_t seed = 0;
  int points = 0;
  std::vector<CheckRecord> checks;
  bool all_pass() const;
};

/// The table of check anchors: check id -> the statement it verifies.
const std::map<std::string, std::string>& anchor_table();

/// Valid suite names accepted by SuiteSpec::suite.
const std::vector<std::string>& suite_names();

/// Effective tolerance for one check on this scenario: the per-scenario
/// override when present, otherwise 1e-8 (1e-6 for quadrature-backed checks or
/// when the scenario involves transcendental functions), scaled by the
/// LABGAUGE_TOLERANCE_SCALE environment variable when set.
double tolerance_for(const Scenario& s, const std::string& check_id);

/// Run the chosen suite.  Individual check failures and exceptions are
/// recorded in the report; the run itself never aborts.
SuiteReport run_suite(const Scenario& s, const SuiteSpec& spec);

/// Run a single calculus identity by its kebab-case id.
SuiteReport run_identity(const Scenario& s, const std::string& identity_id,
                         const SuiteSpec& spec);

/// Render a report as aligned glyph-per-check text.
std::string emit_text(const SuiteReport& rep);

/// Render a report as JSON (alphabetical keys; parse-then-dump stable).
nlohmann::json emit_json(const SuiteReport& rep);

}  // namespace labgauge
