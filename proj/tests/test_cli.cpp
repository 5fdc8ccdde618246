#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "labgauge/redef.hpp"
#include "labgauge/scenario_io.hpp"
#include "labgauge/suite.hpp"

using labgauge::Scenario;
using labgauge::make_algebra;
using nlohmann::json;

namespace {

Scenario canonical_sum() {
  return labgauge::canonical_nonclassical(make_algebra("u1+su2"), 3);
}

/// run the installed binary with arguments, capturing its exit code
int run_cli(const std::string& args) {
  const char* bin = LABGAUGE_BIN;
  const std::string cmd = std::string(bin) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string write_temp_json(const json& j, const std::string& stem) {
  const std::string path = "/tmp/labgauge_test_" + stem + ".json";
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  return path;
}

}  // namespace

TEST_CASE("scenarios round trip through their canonical JSON rendering") {
  Scenario s = canonical_sum();
  json j = labgauge::scenario_to_json(s);
  Scenario back = labgauge::scenario_from_json(j, s.name);

  CHECK(back.name == s.name);
  CHECK(back.alg.name == s.alg.name);
  CHECK(back.chart_M.dim == 4);
  CHECK(back.eta == s.eta);
  CHECK(labgauge::scenario_digest(back) == labgauge::scenario_digest(s));

  // a second rendering is byte-identical (canonical form is a fixed point)
  CHECK(labgauge::scenario_to_json(back).dump() == j.dump());

  // default-valued members are omitted from the rendering
  CHECK(!j.contains("nabla"));  // flat
  CHECK(!j.contains("A"));      // zero
  CHECK(!j.contains("V"));      // zero
  CHECK(j.contains("zeta"));
  CHECK(j["algebra"] == "u1+su2");
}

TEST_CASE("saving and loading a scenario file preserves the digest") {
  Scenario s = canonical_sum();
  const std::string path = "/tmp/labgauge_test_roundtrip.json";
  labgauge::save_scenario(s, path);
  Scenario back = labgauge::load_scenario(path);
  CHECK(labgauge::scenario_digest(back) == labgauge::scenario_digest(s));
  CHECK(back.name == s.name);
  std::remove(path.c_str());

  CHECK_THROWS_AS((void)labgauge::load_scenario("/tmp/does_not_exist_labgauge.json"),
                  labgauge::FileNotFound);
}

TEST_CASE("unknown keys anywhere in a scenario document are rejected with their pointer") {
  json j = labgauge::scenario_to_json(canonical_sum());
  j["zetta"] = 1;
  try {
    (void)labgauge::scenario_from_json(j);
    FAIL("expected SchemaError");
  } catch (const labgauge::SchemaError& e) {
    CHECK(std::string(e.what()).find("unknown key 'zetta'") != std::string::npos);
    CHECK(e.path == "/zetta");
  }

  json nested = labgauge::scenario_to_json(canonical_sum());
  nested["chart_M"]["sign"] = 1;
  try {
    (void)labgauge::scenario_from_json(nested);
    FAIL("expected SchemaError");
  } catch (const labgauge::SchemaError& e) {
    CHECK(e.path == "/chart_M/sign");
  }
}

TEST_CASE("structural mistakes in a scenario document carry helpful messages") {
  json base = labgauge::scenario_to_json(canonical_sum());

  json j = base;
  j.erase("kappa");
  CHECK_THROWS_AS((void)labgauge::scenario_from_json(j), labgauge::SchemaError);

  j = base;
  j["algebra"] = "no-such-algebra";
  try {
    (void)labgauge::scenario_from_json(j);
    FAIL("expected ValidationError");
  } catch (const labgauge::ValidationError& e) {
    CHECK(e.path == "/algebra");
    CHECK(std::string(e.what()).find("no-such-algebra") != std::string::npos);
  }

  j = base;
  j["chart_M"]["dim"] = 0;
  try {
    (void)labgauge::scenario_from_json(j);
    FAIL("expected ValidationError");
  } catch (const labgauge::ValidationError& e) {
    CHECK(e.path == "/chart_M/dim");
  }

  j = base;
  j["seed"] = -5;
  CHECK_THROWS_AS((void)labgauge::scenario_from_json(j), labgauge::SchemaError);

  j = base;
  j["zeta"]["1"]["dq^dx2"] = "x3";
  CHECK_THROWS_AS((void)labgauge::scenario_from_json(j), labgauge::ValidationError);

  // shape problems in the metric are schema-level complaints
  j = base;
  j["kappa"] = {{1.0, 0.0}, {0.0, 1.0}};  // wrong size for a 4-dim algebra
  try {
    (void)labgauge::scenario_from_json(j);
    FAIL("expected SchemaError");
  } catch (const labgauge::SchemaError& e) {
    CHECK(e.path == "/kappa");
  }

  // metric signs live inside the chart and must match its dimension
  j = base;
  j["chart_M"]["metric_signs"] = {1, -1};
  try {
    (void)labgauge::scenario_from_json(j);
    FAIL("expected SchemaError");
  } catch (const labgauge::SchemaError& e) {
    CHECK(e.path == "/chart_M/metric_signs");
  }

  // a syntactically fine document can still fail semantic validation: a
  // source-metric sign of 0 passes the parser shape checks and is caught by
  // the scenario validator under its element name
  j = base;
  j["chart_M"]["metric_signs"] = {1, 0, -1, -1};
  try {
    (void)labgauge::scenario_from_json(j);
    FAIL("expected ValidationError");
  } catch (const labgauge::ValidationError& e) {
    CHECK(e.path == "eta");
  }
}

TEST_CASE("suite runs are deterministic and subsets agree with the full run") {
  Scenario s = canonical_sum();
  labgauge::SuiteSpec spec;
  spec.points = 12;
  spec.seed = 99;

  auto rep1 = labgauge::run_suite(s, spec);
  auto rep2 = labgauge::run_suite(s, spec);
  REQUIRE(rep1.checks.size() == rep2.checks.size());
  CHECK(rep1.checks.size() == 23);
  CHECK(rep1.all_pass());
  for (std::size_t i = 0; i < rep1.checks.size(); ++i) {
    CHECK(rep1.checks[i].id == rep2.checks[i].id);
    CHECK(rep1.checks[i].residual == rep2.checks[i].residual);  // bitwise reproducible
    CHECK(rep1.checks[i].pass == rep2.checks[i].pass);
  }

  // running only one family yields the same numbers as inside the full run
  labgauge::SuiteSpec sub = spec;
  sub.suite = "obstruction";
  auto subrep = labgauge::run_suite(s, sub);
  for (const auto& c : subrep.checks) {
    bool found = false;
    for (const auto& full : rep1.checks) {
      if (full.id == c.id) {
        found = true;
        CHECK(full.residual == c.residual);
        CHECK(full.note == c.note);
      }
    }
    CHECK(found);
  }
}

TEST_CASE("a different master seed changes the sampled data but not the verdicts") {
  Scenario s = canonical_sum();
  labgauge::SuiteSpec spec;
  spec.points = 12;
  spec.seed = 99;
  auto rep1 = labgauge::run_suite(s, spec);
  spec.seed = 100;
  auto rep2 = labgauge::run_suite(s, spec);
  CHECK(rep2.all_pass());
  bool any_residual_differs = false;
  for (std::size_t i = 0; i < rep1.checks.size(); ++i) {
    if (rep1.checks[i].residual != rep2.checks[i].residual) any_residual_differs = true;
  }
  CHECK(any_residual_differs);
}

TEST_CASE("reports render to readable text and to canonical JSON") {
  Scenario s = canonical_sum();
  labgauge::SuiteSpec spec;
  spec.points = 10;
  spec.seed = 7;
  spec.suite = "obstruction";
  auto rep = labgauge::run_suite(s, spec);

  std::string text = labgauge::emit_text(rep);
  CHECK(text.find("obstruction/report") != std::string::npos);
  CHECK(text.find("✓") != std::string::npos);  // pass glyph
  CHECK(text.find("all checks passed") != std::string::npos);
  CHECK(text.find("nonzero-representative-but-exact") != std::string::npos);

  json j = labgauge::emit_json(rep);
  CHECK(j["scenario"] == s.name);
  CHECK(j["all_pass"] == true);
  CHECK(j["seed"] == 7);
  REQUIRE(j["checks"].is_array());
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("id"));
    CHECK(c.contains("anchor"));
    CHECK(c.contains("residual"));
    CHECK(c.contains("tolerance"));
    CHECK(c.contains("pass"));
  }
  // canonical: parse(dump) round trips byte-identically
  CHECK(json::parse(j.dump()).dump() == j.dump());
}

TEST_CASE("every check id carries an anchor and the shipped manifest matches them") {
  const auto& table = labgauge::anchor_table();
  CHECK(table.size() == 23);

  Scenario s = canonical_sum();
  labgauge::SuiteSpec spec;
  spec.points = 8;
  auto rep = labgauge::run_suite(s, spec);
  for (const auto& c : rep.checks) {
    auto it = table.find(c.id);
    REQUIRE(it != table.end());
    CHECK(c.anchor == it->second);
    CHECK(!c.anchor.empty());
  }

  // the JSON manifest shipped with the repository is exactly the same table
  const char* manifest_path = LABGAUGE_ANCHORS_JSON;
  std::ifstream in(manifest_path);
  REQUIRE(in.good());
  json manifest = json::parse(in);
  CHECK(manifest.size() == table.size());
  for (const auto& [id, anchor] : table) {
    REQUIRE(manifest.contains(id));
    CHECK(manifest[id].get<std::string>() == anchor);
  }
}

TEST_CASE("per-scenario overrides and the environment scale adjust tolerances") {
  Scenario s = canonical_sum();
  CHECK(labgauge::tolerance_for(s, "calculus/ad-wedge") == 1e-8);
  CHECK(labgauge::tolerance_for(s, "obstruction/report") == 1e-6);  // quadrature-backed

  s.tolerances["calculus/ad-wedge"] = 1e-5;
  CHECK(labgauge::tolerance_for(s, "calculus/ad-wedge") == 1e-5);

  setenv("LABGAUGE_TOLERANCE_SCALE", "10", 1);
  CHECK(labgauge::tolerance_for(s, "calculus/ad-wedge") == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(labgauge::tolerance_for(s, "gauge/invariance") == doctest::Approx(1e-7).epsilon(1e-12));
  unsetenv("LABGAUGE_TOLERANCE_SCALE");
  CHECK(labgauge::tolerance_for(s, "gauge/invariance") == 1e-8);

  // transcendental scenario data widens the polynomial-class default
  Scenario trig = s;
  trig.V = labgauge::SmoothField::sin(labgauge::SmoothField::coordinate(0));
  CHECK(labgauge::tolerance_for(trig, "gauge/invariance") == 1e-6);
}

TEST_CASE("the identity runner checks one named identity only") {
  Scenario s = canonical_sum();
  labgauge::SuiteSpec spec;
  spec.points = 10;
  auto rep = labgauge::run_identity(s, "ad-wedge", spec);
  REQUIRE(rep.checks.size() == 1);
  CHECK(rep.checks[0].id == "calculus/ad-wedge");
  CHECK(rep.checks[0].pass);

  CHECK_THROWS_AS((void)labgauge::run_identity(s, "no-such-identity", spec),
                  labgauge::ValidationError);
}

TEST_CASE("the command line binary reports pass failure and error through its exit code") {
  Scenario s = canonical_sum();
  json good = labgauge::scenario_to_json(s);
  const std::string good_path = write_temp_json(good, "good");

  CHECK(run_cli("verify " + good_path + " --points 8 --seed 7") == 0);
  CHECK(run_cli("verify " + good_path + " --suite obstruction --points 8 --format json") == 0);
  CHECK(run_cli("identity ad-wedge " + good_path + " --points 6") == 0);

  // schema problems exit 2
  json bad = good;
  bad["zetta"] = 1;
  const std::string bad_path = write_temp_json(bad, "bad");
  CHECK(run_cli("verify " + bad_path) == 2);
  CHECK(run_cli("verify /tmp/no_such_file_labgauge.json") == 2);

  // canonical generation writes a loadable scenario
  const std::string out_path = "/tmp/labgauge_test_canonical.json";
  CHECK(run_cli("canonical --algebra u1 --ndim 3 --out " + out_path) == 0);
  Scenario canon = labgauge::load_scenario(out_path);
  CHECK(canon.alg.name == "u1");
  CHECK(run_cli("canonical --algebra su2 --ndim 3 --out /tmp/labgauge_nc.json") == 2);

  std::remove(good_path.c_str());
  std::remove(bad_path.c_str());
  std::remove(out_path.c_str());
}
