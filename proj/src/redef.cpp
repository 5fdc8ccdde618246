#include "labgauge/redef.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "labgauge/errors.hpp"
#include "labgauge/oracle.hpp"

namespace labgauge {

namespace {

void require_lambda_shape(const Scenario& s, const KForm& lambda) {
  if (!(lambda.chart == s.chart_N) || lambda.fibre_dim != s.alg.dim || lambda.degree != 1)
    throw ShapeMismatch("the redefinition form must be a fibre-valued one-form on the "
                        "target chart");
}

std::vector<std::vector<double>> sample_points(const Chart& chart, int count, Sampler& s) {
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) pts.push_back(s.point(chart));
  return pts;
}

/// max |a - b| and max magnitude at the points, plus random tangent tuples
void accumulate_kforms(const KForm& a, const KForm& b, const std::vector<std::vector<double>>& pts,
                       Sampler& s, int tuples, double& diff, double& mag) {
  for (const auto& pt : pts) {
    FormValue va = value_of(a, pt), vb = value_of(b, pt);
    for (int i = 0; i < va.comp.rows(); ++i)
      for (int j = 0; j < va.comp.cols(); ++j) {
        diff = std::max(diff, std::abs(va.comp(i, j) - vb.comp(i, j)));
        mag = std::max({mag, std::abs(va.comp(i, j)), std::abs(vb.comp(i, j))});
      }
    if (va.degree > 0 && va.comp.cols() > 0) {
      for (int t = 0; t < tuples; ++t) {
        std::vector<Eigen::VectorXd> vecs(va.degree);
        for (int q = 0; q < va.degree; ++q) {
          vecs[q] = Eigen::VectorXd(va.n);
          for (int j = 0; j < va.n; ++j) vecs[q][j] = s.uniform(-1.0, 1.0);
        }
        Eigen::VectorXd ra = apply_value(va, vecs), rb = apply_value(vb, vecs);
        for (int i = 0; i < ra.size(); ++i) {
          diff = std::max(diff, std::abs(ra[i] - rb[i]));
          mag = std::max({mag, std::abs(ra[i]), std::abs(rb[i])});
        }
      }
    }
  }
}

Eigen::MatrixXd adjoint_pseudoinverse(const LieAlgebra& alg) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(stacked_adjoint(alg));
  return cod.pseudoInverse();
}

}  // namespace

Scenario apply_redefinition(const Scenario& s, const KForm& lambda) {
  require_lambda_shape(s, lambda);
  Scenario out = s;
  out.A = s.A + pullback_form(s.X, lambda);
  out.zeta = s.zeta - ext_cov_deriv(s.nabla, lambda) +
             0.5 * wedge_bracket(s.alg, lambda, lambda);
  out.nabla = shift_connection(s.nabla, -1.0 * ad_compose(s.alg, lambda));
  return out;
}

RedefinitionReport verify_redefinition(const Scenario& s, const KForm& lambda, Sampler& sampler,
                                       int npoints, int random_tuples) {
  Scenario after = apply_redefinition(s, lambda);

  auto ptsM = sample_points(s.chart_M, npoints, sampler);
  auto ptsN = sample_points(s.chart_N, npoints, sampler);

  double g_diff = 0.0, g_mag = 0.0;
  accumulate_kforms(field_strength(s), field_strength(after), ptsM, sampler, random_tuples,
                    g_diff, g_mag);

  Scenario back = apply_redefinition(after, -lambda);
  double inv = std::max({max_abs_diff(back.A, s.A, ptsM), max_abs_diff(back.zeta, s.zeta, ptsN)});
  for (int b = 0; b < s.alg.dim; ++b)
    for (int a = 0; a < s.alg.dim; ++a)
      for (int i = 0; i < s.chart_N.dim; ++i) {
        SmoothField d = back.nabla.gamma[b][a][i] - s.nabla.gamma[b][a][i];
        for (const auto& pt : ptsN) inv = std::max(inv, std::abs(d.eval(pt)));
      }

  double dnz_diff = max_abs_diff(ext_cov_deriv(s.nabla, s.zeta),
                                 ext_cov_deriv(after.nabla, after.zeta), ptsN);

  return RedefinitionReport{lambda,
                            g_diff,
                            g_mag,
                            inv,
                            dnz_diff,
                            compat_bracket_residual(s.alg, after.nabla, ptsN),
                            compat_curvature_residual(after, ptsN)};
}

double check_compat_bracket(const Scenario& s, const std::vector<std::vector<double>>& pts) {
  return compat_bracket_residual(s.alg, s.nabla, pts);
}

KForm solve_zeta(const LieAlgebra& alg, const Connection& nabla, double tol, int check_points,
                 std::uint64_t seed) {
  const int n = alg.dim;
  EndForm R = curvature(nabla);
  Eigen::MatrixXd P = adjoint_pseudoinverse(alg);  // n x n^2, column index (a*n + c)

  KForm zeta(nabla.chart, n, 2);
  for (int cc = 0; cc < n; ++cc)
    for (int r = 0; r < zeta.ranks(); ++r) {
      SmoothField acc(0.0);
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) {
          const double w = P(cc, a * n + c);
          if (std::abs(w) < 1e-14 || R.comp[a][c][r].is_zero()) continue;
          acc = acc + SmoothField(w) * R.comp[a][c][r];
        }
      zeta.comp[cc][r] = acc;
    }

  Sampler smp(seed);
  auto pts = sample_points(nabla.chart, check_points, smp);
  EndForm realized = ad_compose(alg, zeta);
  const double diff = max_abs_diff(realized, R, pts);
  const double mag = std::max(max_abs(realized, pts), max_abs(R, pts));
  if (diff / (1.0 + mag) > tol)
    throw NotInAdjointImage(
        "the curvature has a component outside the image of the adjoint map, so no "
        "twist form can reproduce it (relative residual " +
            std::to_string(diff / (1.0 + mag)) + ")",
        diff / (1.0 + mag));
  return zeta;
}

DerivedTwist dnabla_zeta(const Scenario& s, const std::vector<std::vector<double>>& pts) {
  KForm form = ext_cov_deriv(s.nabla, s.zeta);
  double centre = 0.0;
  for (const auto& pt : pts) {
    FormValue v = value_of(form, pt);
    for (int r = 0; r < v.comp.cols(); ++r) {
      Eigen::MatrixXd ad = ad_matrix(s.alg, v.comp.col(r));
      if (ad.size() > 0) centre = std::max(centre, ad.cwiseAbs().maxCoeff());
    }
  }
  return DerivedTwist{std::move(form), centre};
}

KForm centre_project(const LieAlgebra& alg, const KForm& w,
                     const std::vector<std::vector<double>>& pts, double* complement_residual) {
  const int n = alg.dim;
  Eigen::MatrixXd Z = centre_basis(alg);
  KForm out(w.chart, w.fibre_dim, w.degree);
  if (Z.cols() > 0) {
    Eigen::MatrixXd P = Z * Z.transpose();
    for (int a = 0; a < n; ++a)
      for (int r = 0; r < w.ranks(); ++r) {
        SmoothField acc(0.0);
        for (int b = 0; b < n; ++b) {
          if (std::abs(P(a, b)) < 1e-14 || w.comp[b][r].is_zero()) continue;
          acc = acc + SmoothField(P(a, b)) * w.comp[b][r];
        }
        out.comp[a][r] = acc;
      }
  }
  if (complement_residual) *complement_residual = max_abs_diff(w, out, pts);
  return out;
}

double closedness_check(const LieAlgebra& alg, const Connection& nabla, const KForm& w,
                        const std::vector<std::vector<double>>& pts) {
  const int n = alg.dim;
  Eigen::MatrixXd Z = centre_basis(alg);
  const int c = static_cast<int>(Z.cols());
  if (c == 0) return 0.0;

  // the coefficient expansion is frame-honest only when the constant centre
  // sections are parallel
  double parallel = 0.0;
  for (int j = 0; j < c; ++j)
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < nabla.chart.dim; ++i) {
        SmoothField g(0.0);
        for (int a = 0; a < n; ++a) {
          if (std::abs(Z(a, j)) < 1e-14 || nabla.gamma[b][a][i].is_zero()) continue;
          g = g + SmoothField(Z(a, j)) * nabla.gamma[b][a][i];
        }
        for (const auto& pt : pts) parallel = std::max(parallel, std::abs(g.eval(pt)));
      }
  if (parallel > 1e-8)
    throw PreconditionFailed(
        "the constant centre sections are not parallel for this connection, so the "
        "centre coefficients have no invariant exterior derivative",
        "centre-parallel frame", parallel);

  KForm coeff(w.chart, c, w.degree);
  for (int j = 0; j < c; ++j)
    for (int r = 0; r < w.ranks(); ++r) {
      SmoothField acc(0.0);
      for (int a = 0; a < n; ++a) {
        if (std::abs(Z(a, j)) < 1e-14 || w.comp[a][r].is_zero()) continue;
        acc = acc + SmoothField(Z(a, j)) * w.comp[a][r];
      }
      coeff.comp[j][r] = acc;
    }
  return max_abs(exterior_derivative(coeff), pts);
}

// ---------------------------------------------------------------------------
// homotopy operator
// ---------------------------------------------------------------------------

namespace {

/// order-m Gauss-Legendre nodes and weights on [0, 1]
std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int m) {
  std::vector<double> x(m), w(m);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = m * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = 0.5 * (1.0 - z);
    x[m - 1 - i] = 0.5 * (1.0 + z);
    w[i] = w[m - 1 - i] = 1.0 / ((1.0 - z * z) * pp * pp);
  }
  return {x, w};
}

}  // namespace

PrimitiveResult poincare_primitive(const KForm& w, double closed_tol, int check_points,
                                   std::uint64_t seed) {
  if (w.degree < 1)
    throw ShapeMismatch("a primitive is only defined for forms of degree at least one");
  if (!w.chart.star_shaped_about_origin())
    throw DomainError("the chart domain is not star-shaped about the origin, so the "
                      "scaling homotopy operator does not apply");

  const int n = w.chart.dim;
  const int k = w.degree;
  Sampler smp(seed);
  auto pts = sample_points(w.chart, check_points, smp);

  const double closed_res = max_abs(exterior_derivative(w), pts);
  if (closed_res > closed_tol)
    throw NotClosed("the form is not closed at the sample points (max residual " +
                        std::to_string(closed_res) + "), so it has no primitive",
                    closed_res);

  static const auto gl = gauss_legendre01(20);

  KForm out(w.chart, w.fibre_dim, k - 1);
  const auto& tuples = multiindex::all(n, k);
  for (int a = 0; a < w.fibre_dim; ++a)
    for (int rI = 0; rI < w.ranks(); ++rI) {
      if (w.comp[a][rI].is_zero()) continue;
      const std::vector<int>& I = tuples[rI];
      // radial average: int_0^1 t^{k-1} w_I(t x) dt
      SmoothField radial(0.0);
      for (std::size_t m = 0; m < gl.first.size(); ++m) {
        const double t = gl.first[m];
        const double c = gl.second[m] * std::pow(t, k - 1);
        radial = radial + SmoothField(c) * w.comp[a][rI].scale_coordinates(t, n);
      }
      for (int q = 0; q < k; ++q) {
        std::vector<int> J;
        J.reserve(k - 1);
        for (int p = 0; p < k; ++p)
          if (p != q) J.push_back(I[p]);
        const int rJ = multiindex::rank(n, J);
        SmoothField term = SmoothField::coordinate(I[q]) * radial;
        out.comp[a][rJ] = q % 2 == 0 ? out.comp[a][rJ] + term : out.comp[a][rJ] - term;
      }
    }

  const double diff = max_abs_diff(exterior_derivative(out), w, pts);
  const double mag = max_abs(w, pts);
  const double rel = diff / (1.0 + mag);
  if (rel > 1e-7)
    throw QuadratureDegradation(
        "the primitive failed its verification d(K w) = w (relative residual " +
            std::to_string(rel) + ")",
        rel);
  return PrimitiveResult{std::move(out), rel};
}

ObstructionReport obstruction_report(const Scenario& s, int npoints) {
  Sampler smp(s.seed ^ 0x9e3779b97f4a7c15ULL);
  auto pts = sample_points(s.chart_N, npoints, smp);

  DerivedTwist dt = dnabla_zeta(s, pts);
  const double m = max_abs(dt.form, pts);

  if (m <= 1e-9)
    return ObstructionReport{ObstructionVerdict::LocallyZero, std::move(dt.form), m,
                             dt.centre_residual, 0.0, std::nullopt};

  const double closed = closedness_check(s.alg, s.nabla, dt.form, pts);
  if (!s.chart_N.star_shaped_about_origin())
    return ObstructionReport{ObstructionVerdict::NotStarShapedDomain, std::move(dt.form), m,
                             dt.centre_residual, closed, std::nullopt};

  PrimitiveResult prim = poincare_primitive(dt.form);
  return ObstructionReport{ObstructionVerdict::NonzeroRepresentativeButExact,
                           std::move(dt.form), m, dt.centre_residual, closed,
                           std::move(prim)};
}

InnerDecomposition extract_inner_lambda(const LieAlgebra& alg, const Connection& nabla,
                                        double tol, int check_points, std::uint64_t seed) {
  const int n = alg.dim;
  Eigen::MatrixXd P = adjoint_pseudoinverse(alg);

  KForm lambda(nabla.chart, n, 1);
  for (int cc = 0; cc < n; ++cc)
    for (int i = 0; i < nabla.chart.dim; ++i) {
      SmoothField acc(0.0);
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
          const double weight = P(cc, b * n + a);
          if (std::abs(weight) < 1e-14 || nabla.gamma[b][a][i].is_zero()) continue;
          acc = acc - SmoothField(weight) * nabla.gamma[b][a][i];
        }
      lambda.comp[cc][i] = acc;
    }

  EndForm gamma(nabla.chart, n, 1);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < nabla.chart.dim; ++i) gamma.comp[b][a][i] = nabla.gamma[b][a][i];

  Sampler smp(seed);
  auto pts = sample_points(nabla.chart, check_points, smp);
  EndForm realized = ad_compose(alg, lambda);
  const double diff = max_abs_diff(realized, -1.0 * gamma, pts);
  const double mag = std::max(max_abs(realized, pts), max_abs(gamma, pts));
  const double rel = diff / (1.0 + mag);
  if (rel > tol)
    throw NotInnerValued(
        "the connection is not flat minus an adjoint-composed one-form (relative "
        "residual " +
            std::to_string(rel) + ")",
        rel);
  return InnerDecomposition{std::move(lambda), rel, centre_basis(alg).cols() > 0};
}

Scenario canonical_nonclassical(const LieAlgebra& alg, int ndim,
                                const std::optional<KForm>& zeta_override) {
  Eigen::MatrixXd Z = centre_basis(alg);
  if (Z.cols() == 0)
    throw NoCentre("the algebra '" + alg.name +
                   "' has trivial centre, so no centre-carried twist form exists");
  if (ndim < 3)
    throw DimensionTooSmall("the canonical twist form x3 dx1^dx2 needs a target chart of "
                            "dimension at least 3");

  Scenario s;
  s.name = "canonical-" + alg.name;
  s.chart_M = Chart(4);
  s.eta = {1, -1, -1, -1};
  s.chart_N = Chart(ndim);
  s.gN.assign(ndim, 1);
  s.alg = alg;
  s.kappa = ad_invariant_metric(alg);
  s.nabla = Connection::flat(s.chart_N, alg.dim);

  if (zeta_override) {
    if (!(zeta_override->chart == s.chart_N) || zeta_override->fibre_dim != alg.dim ||
        zeta_override->degree != 2)
      throw ShapeMismatch("the override twist form must be a fibre-valued two-form on "
                          "the target chart");
    s.zeta = *zeta_override;
  } else {
    Eigen::VectorXd z = Z.col(0);
    for (int a = 0; a < z.size(); ++a)
      if (std::abs(z[a]) > 1e-12) {
        if (z[a] < 0) z = -z;
        break;
      }
    s.zeta = KForm(s.chart_N, alg.dim, 2);
    const int r12 = multiindex::rank(ndim, {0, 1});
    for (int a = 0; a < alg.dim; ++a)
      if (std::abs(z[a]) > 1e-14)
        s.zeta.comp[a][r12] = SmoothField(z[a]) * SmoothField::coordinate(2);
  }

  s.V = SmoothField(0.0);
  std::vector<SmoothField> xcomp;
  xcomp.reserve(ndim);
  for (int j = 0; j < ndim; ++j)
    xcomp.push_back(j < std::min(ndim, 4) ? SmoothField::coordinate(j) : SmoothField(0.0));
  s.X = SmoothMap(s.chart_M, s.chart_N, std::move(xcomp));
  s.A = KForm(s.chart_M, alg.dim, 1);
  s.seed = 2026;
  return s;
}

NoVanishingCertificate no_vanishing_zeta_certificate(const Scenario& s, int trials,
                                                     std::uint64_t seed, int npoints) {
  Sampler smp(seed);
  auto pts = sample_points(s.chart_N, npoints, smp);

  NoVanishingCertificate cert;
  cert.trials = trials;
  cert.dnz_max = max_abs(ext_cov_deriv(s.nabla, s.zeta), pts);
  cert.certified = cert.dnz_max > 1e-8;
  cert.max_norm_before = max_abs(s.zeta, pts);
  cert.min_over_trials = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    KForm lambda(s.chart_N, s.alg.dim, 1);
    for (int a = 0; a < s.alg.dim; ++a)
      for (int i = 0; i < s.chart_N.dim; ++i) lambda.comp[a][i] = smp.polynomial(s.chart_N, 2, 2);
    Scenario after = apply_redefinition(s, lambda);
    cert.min_over_trials = std::min(cert.min_over_trials, max_abs(after.zeta, pts));
  }
  if (trials == 0) cert.min_over_trials = cert.max_norm_before;
  return cert;
}

}  // namespace labgauge
