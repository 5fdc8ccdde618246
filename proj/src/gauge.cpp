#include "labgauge/gauge.hpp"

#include <algorithm>
#include <cmath>

#include "labgauge/errors.hpp"
#include "labgauge/oracle.hpp"

namespace labgauge {

namespace {

std::vector<Eigen::VectorXd> random_tuple(int dim, int count, Sampler& s) {
  std::vector<Eigen::VectorXd> out(count);
  for (int i = 0; i < count; ++i) {
    out[i] = Eigen::VectorXd(dim);
    for (int j = 0; j < dim; ++j) out[i][j] = s.uniform(-1.0, 1.0);
  }
  return out;
}

ResidualCheck compare_kforms(const KForm& A, const KForm& B,
                             const std::vector<std::vector<double>>& pts, Sampler& s,
                             int tuples) {
  ResidualCheck out;
  for (const auto& pt : pts) {
    FormValue va = value_of(A, pt), vb = value_of(B, pt);
    for (int i = 0; i < va.comp.rows(); ++i)
      for (int j = 0; j < va.comp.cols(); ++j) {
        out.residual = std::max(out.residual, std::abs(va.comp(i, j) - vb.comp(i, j)));
        out.reference = std::max({out.reference, std::abs(va.comp(i, j)),
                                  std::abs(vb.comp(i, j))});
      }
    if (va.degree > 0 && va.comp.cols() > 0) {
      for (int t = 0; t < tuples; ++t) {
        auto vecs = random_tuple(va.n, va.degree, s);
        Eigen::VectorXd ra = apply_value(va, vecs), rb = apply_value(vb, vecs);
        for (int i = 0; i < ra.size(); ++i) {
          out.residual = std::max(out.residual, std::abs(ra[i] - rb[i]));
          out.reference = std::max({out.reference, std::abs(ra[i]), std::abs(rb[i])});
        }
      }
    }
  }
  return out;
}

}  // namespace

void validate_scenario(const Scenario& s) {
  const int n = s.alg.dim;
  if (static_cast<int>(s.eta.size()) != s.chart_M.dim)
    throw ValidationError("eta must list one sign per source coordinate", "eta");
  for (int v : s.eta)
    if (v != 1 && v != -1)
      throw ValidationError("eta entries must be +1 or -1", "eta");
  if (static_cast<int>(s.gN.size()) != s.chart_N.dim)
    throw ValidationError("gN must list one sign per target coordinate", "gN");
  for (int v : s.gN)
    if (v != 1)
      throw ValidationError("the target metric must be Euclidean (all gN entries +1)", "gN");
  if (s.kappa.kappa.rows() != n)
    throw ValidationError("kappa size must equal the algebra dimension", "kappa");
  if (!(s.nabla.chart == s.chart_N) || s.nabla.fibre_dim != n)
    throw ValidationError("the connection must live on the target chart with fibre "
                          "dimension equal to the algebra dimension", "nabla");
  if (!(s.zeta.chart == s.chart_N) || s.zeta.fibre_dim != n || s.zeta.degree != 2)
    throw ValidationError("zeta must be a fibre-valued two-form on the target chart", "zeta");
  if (!(s.X.source == s.chart_M) || !(s.X.target == s.chart_N))
    throw ValidationError("X must map the source chart to the target chart", "X");
  if (!(s.A.chart == s.chart_M) || s.A.fibre_dim != n || s.A.degree != 1)
    throw ValidationError("A must be a fibre-valued one-form on the source chart", "A");
  if (s.V.min_dim() > s.chart_N.dim)
    throw ValidationError("V references coordinates beyond the target chart", "V");
}

KForm field_strength_for(const Scenario& s, const KForm& A) {
  Connection pulled = pullback_connection(s.X, s.nabla);
  return ext_cov_deriv(pulled, A) + 0.5 * wedge_bracket(s.alg, A, A) +
         pullback_form(s.X, s.zeta);
}

KForm field_strength(const Scenario& s) { return field_strength_for(s, s.A); }

KForm gauge_variation_A(const Scenario& s, const KForm& eps) {
  Connection pulled = pullback_connection(s.X, s.nabla);
  return wedge_bracket(s.alg, eps, s.A) - ext_cov_deriv(pulled, eps);
}

ResidualCheck gauge_variation_G(const Scenario& s, const KForm& eps, Sampler& sampler,
                                int npoints, int random_tuples) {
  KForm dA = gauge_variation_A(s, eps);
  // G is quadratic in the field, so one central difference is exact.
  KForm numeric = field_strength_for(s, s.A + 0.5 * dA) -
                  field_strength_for(s, s.A + (-0.5) * dA);
  KForm claimed = wedge_bracket(s.alg, eps, field_strength(s));
  std::vector<std::vector<double>> pts;
  pts.reserve(npoints);
  for (int i = 0; i < npoints; ++i) pts.push_back(sampler.point(s.chart_M));
  return compare_kforms(numeric, claimed, pts, sampler, random_tuples);
}

SmoothField lagrangian_density(const Scenario& s, const KForm& A) {
  const int n = s.chart_M.dim;
  KForm G = field_strength_for(s, A);
  KForm gauge_term = -0.5 * metric_pair(s.kappa.kappa, G, hodge_star(s.eta, G));

  KForm dX(s.chart_M, s.chart_N.dim, 1);
  for (int j = 0; j < s.chart_N.dim; ++j)
    for (int mu = 0; mu < n; ++mu) dX.comp[j][mu] = s.X.differential(j, mu);
  Eigen::MatrixXd gN = Eigen::MatrixXd::Zero(s.chart_N.dim, s.chart_N.dim);
  for (int j = 0; j < s.chart_N.dim; ++j) gN(j, j) = s.gN[j];
  KForm matter_term = metric_pair(gN, dX, hodge_star(s.eta, dX));

  KForm potential_term(s.chart_M, 1, n);
  potential_term.comp[0][0] = s.X.pull_function(s.V);

  KForm total = gauge_term + matter_term + potential_term;
  return total.comp[0][0];
}

SmoothField lagrangian_density(const Scenario& s) { return lagrangian_density(s, s.A); }

ResidualCheck gauge_invariance_residual(const Scenario& s, const KForm& eps, Sampler& sampler,
                                        int npoints) {
  // hypotheses: ad-invariant fibre metric, both compatibility conditions
  AdInvarianceReport rep = check_ad_invariance(s.alg, s.kappa.kappa);
  if (rep.residual > 1e-10)
    throw PreconditionFailed(
        "the fibre metric kappa is not ad-invariant (worst defect " +
            std::to_string(rep.residual) + "), so the gauge term is not invariant",
        "ad-invariance of the fibre metric kappa", rep.residual);
  std::vector<std::vector<double>> ptsN;
  ptsN.reserve(npoints);
  for (int i = 0; i < npoints; ++i) ptsN.push_back(sampler.point(s.chart_N));
  const double c1 = compat_bracket_residual(s.alg, s.nabla, ptsN);
  if (c1 > 1e-8)
    throw PreconditionFailed("the connection does not derive the bracket",
                             "bracket compatibility of the connection", c1);
  const double c2 = compat_curvature_residual(s, ptsN);
  if (c2 > 1e-8)
    throw PreconditionFailed("the connection curvature does not equal the adjoint of the "
                             "twist form", "curvature compatibility of the connection", c2);

  KForm dA = gauge_variation_A(s, eps);
  // the density is quartic in t, so the four-point stencil derivative is exact
  const double h = 0.5;
  SmoothField f0 = lagrangian_density(s);
  SmoothField fp1 = lagrangian_density(s, s.A + h * dA);
  SmoothField fm1 = lagrangian_density(s, s.A + (-h) * dA);
  SmoothField fp2 = lagrangian_density(s, s.A + (2.0 * h) * dA);
  SmoothField fm2 = lagrangian_density(s, s.A + (-2.0 * h) * dA);

  ResidualCheck out;
  for (int i = 0; i < npoints; ++i) {
    std::vector<double> pt = sampler.point(s.chart_M);
    const double deriv = (8.0 * (fp1.eval(pt) - fm1.eval(pt)) -
                          (fp2.eval(pt) - fm2.eval(pt))) /
                         (12.0 * h);
    out.residual = std::max(out.residual, std::abs(deriv));
    out.reference = std::max(out.reference, std::abs(f0.eval(pt)));
  }
  return out;
}

ResidualCheck bianchi_defect(const Scenario& s, Sampler& sampler, int npoints,
                             int random_tuples) {
  KForm G = field_strength(s);
  Connection pulled = pullback_connection(s.X, s.nabla);
  KForm defect = ext_cov_deriv(pulled, G) + wedge_bracket(s.alg, s.A, G);
  KForm predicted = pullback_form(s.X, ext_cov_deriv(s.nabla, s.zeta));
  std::vector<std::vector<double>> pts;
  pts.reserve(npoints);
  for (int i = 0; i < npoints; ++i) pts.push_back(sampler.point(s.chart_M));
  return compare_kforms(defect, predicted, pts, sampler, random_tuples);
}

double compat_curvature_residual(const Scenario& s, const std::vector<std::vector<double>>& pts) {
  EndForm R = curvature(s.nabla);
  const int n = s.alg.dim;
  double diff = 0.0, mag = 0.0;
  for (const auto& pt : pts) {
    FormValue rv = value_of(R, pt);
    FormValue zv = value_of(s.zeta, pt);
    for (int r = 0; r < rv.comp.cols(); ++r) {
      Eigen::MatrixXd want = ad_matrix(s.alg, zv.comp.col(r));
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          diff = std::max(diff, std::abs(rv.comp(a * n + b, r) - want(a, b)));
          mag = std::max({mag, std::abs(rv.comp(a * n + b, r)), std::abs(want(a, b))});
        }
    }
  }
  return diff / (1.0 + mag);
}

KForm random_gauge_parameter(const Scenario& s, Sampler& sampler) {
  KForm eps(s.chart_M, s.alg.dim, 0);
  for (int a = 0; a < s.alg.dim; ++a) eps.comp[a][0] = sampler.polynomial(s.chart_M, 2, 2);
  return eps;
}

}  // namespace labgauge
