#include "labgauge/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <sstream>

#include "labgauge/errors.hpp"
#include "labgauge/identities.hpp"
#include "labgauge/redef.hpp"
#include "labgauge/scenario_io.hpp"

namespace labgauge {

bool SuiteReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckRecord& c) { return c.pass; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"calculus",    "gauge",   "redefinition",
                                                 "obstruction", "bianchi", "all"};
  return names;
}

const std::map<std::string, std::string>& anchor_table() {
  static const std::map<std::string, std::string> table = {
      {"calculus/pullback-naturality",
       "pulling back then differentiating equals differentiating then pulling back: "
       "d^(X*nabla)(X^! w) = X^!(d^nabla w)"},
      {"calculus/connection-shift",
       "shifting the connection by an endomorphism one-form adds its wedge action: "
       "d^(nabla+D) w = d^nabla w + D wedge w"},
      {"calculus/leibniz-endomorphism",
       "the covariant derivative is a graded derivation over the endomorphism action: "
       "d^nabla(T wedge w) = (d^nabla T) wedge w + (-1)^deg(T) T wedge (d^nabla w)"},
      {"calculus/ad-wedge",
       "the adjoint-composed form acts by the graded bracket: (ad o w) wedge psi = "
       "[w wedge, psi]"},
      {"calculus/pullback-bracket",
       "pullback distributes over the graded bracket: X^![w wedge, psi] = "
       "[X^!w wedge, X^!psi]"},
      {"calculus/graded-antisymmetry",
       "the graded bracket is graded-antisymmetric: [w wedge, psi] = "
       "-(-1)^(deg w * deg psi) [psi wedge, w]"},
      {"calculus/graded-jacobi",
       "the graded bracket of a form with its own bracket square vanishes: "
       "[w wedge, [w wedge, w]] = 0"},
      {"calculus/ad-pullback",
       "adjoint composition commutes with pullback: ad o (X^! w) = X^!(ad o w)"},
      {"calculus/leibniz-bracket",
       "for a bracket-compatible connection the covariant derivative is a graded "
       "derivation over the bracket: d^nabla[w wedge, psi] = [d^nabla w wedge, psi] + "
       "(-1)^deg(w) [w wedge, d^nabla psi]"},
      {"calculus/ad-commutes-differential",
       "for a bracket-compatible connection the covariant derivative commutes with "
       "adjoint composition: d^nabla(ad o w) = ad o (d^nabla w)"},
      {"compat/bracket",
       "the connection derives the bracket on frame sections: nabla[u, v] = "
       "[nabla u, v] + [u, nabla v]"},
      {"compat/curvature",
       "the curvature of the connection is the adjoint of the twist form: "
       "R_nabla = ad o zeta"},
      {"gauge/variation",
       "the field strength varies in the adjoint under infinitesimal gauge "
       "transformations: delta_eps G = [eps, G]"},
      {"gauge/invariance",
       "the Lagrangian density is stationary along infinitesimal gauge transformations "
       "when the fibre metric is ad-invariant and both compatibility conditions hold"},
      {"lagrangian/redef-invariance",
       "the Lagrangian density is unchanged when the gauge field, the twist form and "
       "the connection are redefined together"},
      {"redef/field-strength",
       "the field strength is unchanged when the gauge field, the twist form and the "
       "connection are redefined together"},
      {"redef/involution",
       "redefining by -lambda undoes redefining by lambda"},
      {"redef/compat-preserved",
       "both compatibility conditions survive every field redefinition"},
      {"obstruction/centre",
       "the covariant derivative of the twist form takes values in the centre: "
       "ad o (d^nabla zeta) = 0"},
      {"obstruction/closedness",
       "the centre coefficients of d^nabla zeta are closed forms"},
      {"obstruction/invariance",
       "d^nabla zeta is unchanged by field redefinitions"},
      {"obstruction/report",
       "d^nabla zeta either vanishes, or is exhibited as the exterior derivative of an "
       "explicit primitive on a chart star-shaped about the origin"},
      {"bianchi/defect",
       "the differential consequence of the structure equation: d^(X*nabla) G + "
       "[A wedge, G] = X^!(d^nabla zeta)"},
  };
  return table;
}

namespace {

std::uint64_t fnv64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

bool has_transcendental(const std::string& printed) {
  return printed.find("sin(") != std::string::npos ||
         printed.find("cos(") != std::string::npos ||
         printed.find("exp(") != std::string::npos;
}

bool uses_transcendentals(const Scenario& s) {
  if (has_transcendental(s.V.to_string(s.chart_N))) return true;
  for (const auto& f : s.X.comp)
    if (has_transcendental(f.to_string(s.chart_M))) return true;
  for (const auto& fibre : s.A.comp)
    for (const auto& f : fibre)
      if (has_transcendental(f.to_string(s.chart_M))) return true;
  for (const auto& fibre : s.zeta.comp)
    for (const auto& f : fibre)
      if (has_transcendental(f.to_string(s.chart_N))) return true;
  for (const auto& row : s.nabla.gamma)
    for (const auto& col : row)
      for (const auto& f : col)
        if (has_transcendental(f.to_string(s.chart_N))) return true;
  return false;
}

std::vector<std::vector<double>> sample_points(const Chart& chart, int count, Sampler& smp) {
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) pts.push_back(smp.point(chart));
  return pts;
}

KForm random_lambda(const Scenario& s, Sampler& smp) {
  KForm lambda(s.chart_N, s.alg.dim, 1);
  for (int a = 0; a < s.alg.dim; ++a)
    for (int i = 0; i < s.chart_N.dim; ++i) lambda.comp[a][i] = smp.polynomial(s.chart_N, 2, 2);
  return lambda;
}

struct CheckDef {
  std::string id;
  std::function<double(Sampler&, CheckRecord&)> fn;
};

std::vector<CheckDef> calculus_checks(const Scenario& s, const SuiteSpec& spec) {
  std::vector<CheckDef> defs;
  const int npts = std::max(3, spec.points / 10);
  for (CalculusIdentity which : all_identities()) {
    defs.push_back({"calculus/" + identity_name(which),
                    [&s, which, npts](Sampler& smp, CheckRecord&) {
                      double worst = 0.0;
                      for (int i = 0; i < 2; ++i) {
                        IdentityInstance inst = random_identity_instance(which, s.alg, smp);
                        IdentityResult r = verify_calculus_identity(which, inst, smp, npts, 4);
                        worst = std::max(worst, r.relative());
                      }
                      return worst;
                    }});
  }
  return defs;
}

std::vector<CheckDef> gauge_checks(const Scenario& s, const SuiteSpec& spec) {
  const int scan = std::min(spec.points, 20);
  const int heavy = std::max(4, spec.points / 5);
  return {
      {"compat/bracket",
       [&s, scan](Sampler& smp, CheckRecord&) {
         return check_compat_bracket(s, sample_points(s.chart_N, scan, smp));
       }},
      {"compat/curvature",
       [&s, scan](Sampler& smp, CheckRecord&) {
         return compat_curvature_residual(s, sample_points(s.chart_N, scan, smp));
       }},
      {"gauge/variation",
       [&s, heavy](Sampler& smp, CheckRecord&) {
         KForm eps = random_gauge_parameter(s, smp);
         return gauge_variation_G(s, eps, smp, heavy, 4).relative();
       }},
      {"gauge/invariance",
       [&s, heavy](Sampler& smp, CheckRecord&) {
         KForm eps = random_gauge_parameter(s, smp);
         return gauge_invariance_residual(s, eps, smp, heavy).relative();
       }},
  };
}

std::vector<CheckDef> redefinition_checks(const Scenario& s, const SuiteSpec& spec) {
  const int heavy = std::max(4, spec.points / 5);
  return {
      {"redef/field-strength",
       [&s, heavy](Sampler& smp, CheckRecord&) {
         RedefinitionReport rep = verify_redefinition(s, random_lambda(s, smp), smp, heavy, 4);
         return rep.G_residual / (1.0 + rep.G_reference);
       }},
      {"redef/involution",
       [&s, heavy](Sampler& smp, CheckRecord&) {
         RedefinitionReport rep = verify_redefinition(s, random_lambda(s, smp), smp, heavy, 4);
         return rep.involution_residual;
       }},
      {"redef/compat-preserved",
       [&s, heavy](Sampler& smp, CheckRecord&) {
         double worst = 0.0;
         for (int t = 0; t < 5; ++t) {
           RedefinitionReport rep =
               verify_redefinition(s, random_lambda(s, smp), smp, heavy, 4);
           worst = std::max({worst, rep.compat1_residual_after, rep.compat2_residual_after});
         }
         return worst;
       }},
      {"lagrangian/redef-invariance",
       [&s, heavy](Sampler& smp, CheckRecord&) {
         Scenario after = apply_redefinition(s, random_lambda(s, smp));
         SmoothField before_f = lagrangian_density(s);
         SmoothField after_f = lagrangian_density(after);
         double diff = 0.0, mag = 0.0;
         for (const auto& pt : sample_points(s.chart_M, heavy, smp)) {
           const double a = before_f.eval(pt), b = after_f.eval(pt);
           diff = std::max(diff, std::abs(a - b));
           mag = std::max({mag, std::abs(a), std::abs(b)});
         }
         return diff / (1.0 + mag);
       }},
  };
}

std::vector<CheckDef> obstruction_checks(const Scenario& s, const SuiteSpec& spec) {
  const int scan = std::min(spec.points, 20);
  return {
      {"obstruction/centre",
       [&s, scan](Sampler& smp, CheckRecord&) {
         return dnabla_zeta(s, sample_points(s.chart_N, scan, smp)).centre_residual;
       }},
      {"obstruction/closedness",
       [&s, scan](Sampler& smp, CheckRecord&) {
         auto pts = sample_points(s.chart_N, scan, smp);
         DerivedTwist dt = dnabla_zeta(s, pts);
         return closedness_check(s.alg, s.nabla, dt.form, pts);
       }},
      {"obstruction/invariance",
       [&s, scan](Sampler& smp, CheckRecord&) {
         auto pts = sample_points(s.chart_N, scan, smp);
         Scenario after = apply_redefinition(s, random_lambda(s, smp));
         KForm before_d = ext_cov_deriv(s.nabla, s.zeta);
         KForm after_d = ext_cov_deriv(after.nabla, after.zeta);
         return max_abs_diff(before_d, after_d, pts) / (1.0 + max_abs(before_d, pts));
       }},
      {"obstruction/report",
       [&s, scan](Sampler&, CheckRecord& rec) {
         ObstructionReport rep = obstruction_report(s, scan);
         switch (rep.verdict) {
           case ObstructionVerdict::LocallyZero:
             rec.note = "locally-zero";
             return rep.dnz_max;
           case ObstructionVerdict::NotStarShapedDomain:
             rec.note = "not-star-shaped-domain";
             return 0.0;
           case ObstructionVerdict::NonzeroRepresentativeButExact:
             rec.note = "nonzero-representative-but-exact";
             return rep.primitive ? rep.primitive->residual : 0.0;
         }
         return 0.0;
       }},
  };
}

std::vector<CheckDef> bianchi_checks(const Scenario& s, const SuiteSpec& spec) {
  const int heavy = std::max(4, spec.points / 5);
  return {
      {"bianchi/defect",
       [&s, heavy](Sampler& smp, CheckRecord&) {
         return bianchi_defect(s, smp, heavy, 4).relative();
       }},
  };
}

std::vector<CheckDef> build_checks(const Scenario& s, const SuiteSpec& spec) {
  std::vector<CheckDef> defs;
  auto append = [&defs](std::vector<CheckDef> more) {
    for (auto& d : more) defs.push_back(std::move(d));
  };
  const std::string& which = spec.suite;
  if (which != "calculus" && which != "gauge" && which != "redefinition" &&
      which != "obstruction" && which != "bianchi" && which != "all")
    throw ValidationError("unknown suite '" + which + "'", "/suite");
  if (which == "calculus" || which == "all") append(calculus_checks(s, spec));
  if (which == "gauge" || which == "all") append(gauge_checks(s, spec));
  if (which == "redefinition" || which == "all") append(redefinition_checks(s, spec));
  if (which == "obstruction" || which == "all") append(obstruction_checks(s, spec));
  if (which == "bianchi" || which == "all") append(bianchi_checks(s, spec));
  return defs;
}

SuiteReport run_checks(const Scenario& s, const SuiteSpec& spec, std::vector<CheckDef> defs) {
  SuiteReport rep;
  rep.scenario_name = s.name;
  rep.digest = scenario_digest(s);
  rep.seed = spec.seed;
  rep.points = spec.points;
  for (auto& def : defs) {
    CheckRecord rec;
    rec.id = def.id;
    rec.anchor = anchor_table().at(def.id);
    rec.tolerance = tolerance_for(s, def.id);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      Sampler smp(spec.seed ^ fnv64(def.id));
      rec.residual = def.fn(smp, rec);
      rec.pass = rec.residual <= rec.tolerance;
    } catch (const std::exception& e) {
      rec.residual = -1.0;
      rec.pass = false;
      rec.note = e.what();
    }
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.checks.push_back(std::move(rec));
  }
  return rep;
}

}  // namespace

double tolerance_for(const Scenario& s, const std::string& check_id) {
  const bool quadrature_backed = check_id == "obstruction/report";
  double tol = quadrature_backed || uses_transcendentals(s) ? 1e-6 : 1e-8;
  if (auto it = s.tolerances.find(check_id); it != s.tolerances.end()) tol = it->second;
  if (const char* env = std::getenv("LABGAUGE_TOLERANCE_SCALE")) {
    char* end = nullptr;
    const double scale = std::strtod(env, &end);
    if (end != env && scale > 0.0) tol *= scale;
  }
  return tol;
}

SuiteReport run_suite(const Scenario& s, const SuiteSpec& spec) {
  return run_checks(s, spec, build_checks(s, spec));
}

SuiteReport run_identity(const Scenario& s, const std::string& identity_id,
                         const SuiteSpec& spec) {
  auto which = identity_from_name(identity_id);
  if (!which) throw ValidationError("unknown identity id '" + identity_id + "'", "/identity");
  const int npts = std::max(3, spec.points / 10);
  std::vector<CheckDef> defs;
  defs.push_back({"calculus/" + identity_id,
                  [&s, id = *which, npts](Sampler& smp, CheckRecord&) {
                    double worst = 0.0;
                    for (int i = 0; i < 2; ++i) {
                      IdentityInstance inst = random_identity_instance(id, s.alg, smp);
                      IdentityResult r = verify_calculus_identity(id, inst, smp, npts, 4);
                      worst = std::max(worst, r.relative());
                    }
                    return worst;
                  }});
  return run_checks(s, spec, std::move(defs));
}

std::string emit_text(const SuiteReport& rep) {
  std::ostringstream out;
  out << "scenario: " << rep.scenario_name << "\n";
  out << "digest:   " << rep.digest << "\n";
  out << "seed:     " << rep.seed << "    points: " << rep.points << "\n\n";
  int passed = 0;
  for (const auto& c : rep.checks) {
    passed += c.pass ? 1 : 0;
    out << (c.pass ? "✓ " : "✗ ") << std::left << std::setw(34) << c.id;
    out << std::scientific << std::setprecision(3);
    if (c.residual < 0)
      out << "  residual n/a";
    else
      out << "  residual " << c.residual;
    out << "  tol " << c.tolerance;
    out << std::fixed << std::setprecision(3) << "  (" << c.seconds << "s)\n";
    out << "    = " << c.anchor << "\n";
    if (!c.note.empty()) out << "    note: " << c.note << "\n";
  }
  out << "\n" << (rep.all_pass() ? "all checks passed" : "CHECKS FAILED") << " (" << passed
      << "/" << rep.checks.size() << ")\n";
  return out.str();
}

nlohmann::json emit_json(const SuiteReport& rep) {
  nlohmann::json out;
  out["scenario"] = rep.scenario_name;
  out["digest"] = rep.digest;
  out["seed"] = rep.seed;
  out["points"] = rep.points;
  out["all_pass"] = rep.all_pass();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : rep.checks) {
    nlohmann::json jc;
    jc["id"] = c.id;
    jc["anchor"] = c.anchor;
    jc["residual"] = c.residual;
    jc["tolerance"] = c.tolerance;
    jc["pass"] = c.pass;
    jc["seconds"] = c.seconds;
    jc["note"] = c.note;
    arr.push_back(std::move(jc));
  }
  out["checks"] = std::move(arr);
  return out;
}

}  // namespace labgauge
