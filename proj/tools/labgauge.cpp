/// Command-line front end: verify scenarios, emit canonical scenarios, and
/// run single calculus identities.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "labgauge/errors.hpp"
#include "labgauge/redef.hpp"
#include "labgauge/scenario_io.hpp"
#include "labgauge/suite.hpp"

namespace {

int print_report(const labgauge::SuiteReport& rep, const std::string& format) {
  if (format == "json")
    std::cout << labgauge::emit_json(rep).dump(2) << "\n";
  else
    std::cout << labgauge::emit_text(rep);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical verifier for the covariant calculus of gauge fields on "
               "trivialized algebra bundles"};
  app.require_subcommand(1);

  // ---- verify -------------------------------------------------------------
  std::string verify_path, suite = "all", format = "text";
  int points = 50;
  std::uint64_t seed = 7;
  CLI::App* verify = app.add_subcommand("verify", "run a check suite on a scenario file");
  verify->add_option("scenario", verify_path, "scenario JSON file")->required();
  verify->add_option("--suite", suite, "which checks to run")
      ->check(CLI::IsMember(labgauge::suite_names()))
      ->capture_default_str();
  verify->add_option("--points", points, "sample-point budget per check")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify->add_option("--seed", seed, "master seed for all randomness")->capture_default_str();
  verify->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  // ---- canonical ----------------------------------------------------------
  std::string algebra = "u1", out_path;
  int ndim = 3;
  CLI::App* canonical =
      app.add_subcommand("canonical", "emit the canonical nonzero-obstruction scenario");
  canonical->add_option("--algebra", algebra, "algebra tag (must have nontrivial centre)")
      ->capture_default_str();
  canonical->add_option("--ndim", ndim, "target chart dimension (>= 3)")
      ->capture_default_str();
  canonical->add_option("--out", out_path, "write to this file instead of stdout");

  // ---- identity -----------------------------------------------------------
  std::string identity_id, identity_path;
  CLI::App* identity =
      app.add_subcommand("identity", "verify one calculus identity on random instances");
  identity->add_option("id", identity_id, "identity id, e.g. ad-wedge")->required();
  identity->add_option("scenario", identity_path, "scenario JSON file (supplies the algebra)")
      ->required();
  identity->add_option("--points", points, "sample-point budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  identity->add_option("--seed", seed, "master seed")->capture_default_str();
  identity->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      labgauge::Scenario s = labgauge::load_scenario(verify_path);
      labgauge::SuiteSpec spec{suite, points, seed, format};
      return print_report(labgauge::run_suite(s, spec), format);
    }
    if (canonical->parsed()) {
      labgauge::Scenario s =
          labgauge::canonical_nonclassical(labgauge::make_algebra(algebra), ndim);
      if (out_path.empty())
        std::cout << labgauge::scenario_to_json(s).dump(2) << "\n";
      else
        labgauge::save_scenario(s, out_path);
      return 0;
    }
    if (identity->parsed()) {
      labgauge::Scenario s = labgauge::load_scenario(identity_path);
      labgauge::SuiteSpec spec{"all", points, seed, format};
      return print_report(labgauge::run_identity(s, identity_id, spec), format);
    }
  } catch (const labgauge::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
