#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "labgauge/expr.hpp"
#include "labgauge/liecore.hpp"

namespace labgauge {

// ---------------------------------------------------------------------------
// antisymmetric multi-index bookkeeping
// ---------------------------------------------------------------------------

namespace multiindex {

/// Binomial coefficient C(n, k) (0 when k < 0 or k > n).
int binomial(int n, int k);

/// All strictly increasing k-tuples over {0..n-1}, in lexicographic order.
const std::vector<std::vector<int>>& all(int n, int k);

/// Position of a sorted k-tuple in the lexicographic order.
int rank(int n, const std::vector<int>& I);

/// Sort `idx` in place; returns the permutation sign, or 0 on duplicates.
int sort_sign(std::vector<int>& idx);

/// Render as "dx^dy" style using the chart's coordinate names.
std::string to_string(const std::vector<int>& I, const Chart& chart);

/// Parse a "dx^dy" style string back into a (possibly unsorted) index tuple.
std::vector<int> parse(const std::string& text, const Chart& chart);

}  // namespace multiindex

// ---------------------------------------------------------------------------
// differential-form containers
// ---------------------------------------------------------------------------

/// Fibre-valued differential k-form on a chart: components comp[a][r] where
/// a indexes the fibre basis and r ranks the sorted multi-indices.  Unsorted
/// index access picks up the permutation sign.  Degrees above the chart
/// dimension are canonical zero forms (no components), not errors.
class KForm {
 public:
  KForm() = default;
  KForm(Chart chart, int fibre_dim, int degree);

  Chart chart;
  int fibre_dim = 0;
  int degree = 0;
  std::vector<std::vector<SmoothField>> comp;  ///< [fibre][rank]

  int ranks() const { return multiindex::binomial(chart.dim, degree); }

  /// Component at a sorted multi-index rank.
  SmoothField& at(int a, int r) { return comp[a][r]; }
  const SmoothField& at(int a, int r) const { return comp[a][r]; }

  /// Component at an arbitrary index tuple (sign on access; 0 on repeats).
  SmoothField component(int a, std::vector<int> indices) const;

  /// Evaluate all components: (fibre_dim x ranks) matrix.
  Eigen::MatrixXd eval(const std::vector<double>& point) const;

  bool is_zero() const;

  KForm& operator+=(const KForm& o);
  KForm& operator-=(const KForm& o);
  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  friend KForm operator*(const SmoothField& s, KForm w);
  friend KForm operator*(double s, KForm w);
  friend KForm operator-(KForm w);
};

/// Endomorphism-valued k-form: comp[a][b][r] is the (a,b) matrix entry of the
/// value on the multi-index of rank r (column convention: T(e_b) = sum_a
/// T[a][b] e_a).
class EndForm {
 public:
  EndForm() = default;
  EndForm(Chart chart, int fibre_dim, int degree);

  Chart chart;
  int fibre_dim = 0;
  int degree = 0;
  std::vector<std::vector<std::vector<SmoothField>>> comp;  ///< [a][b][rank]

  int ranks() const { return multiindex::binomial(chart.dim, degree); }

  SmoothField& at(int a, int b, int r) { return comp[a][b][r]; }
  const SmoothField& at(int a, int b, int r) const { return comp[a][b][r]; }

  /// Evaluate: (fibre_dim^2 x ranks) matrix, row index flattened as a*dim+b.
  Eigen::MatrixXd eval(const std::vector<double>& point) const;

  EndForm& operator+=(const EndForm& o);
  EndForm& operator-=(const EndForm& o);
  friend EndForm operator+(EndForm a, const EndForm& b) { return a += b; }
  friend EndForm operator-(EndForm a, const EndForm& b) { return a -= b; }
  friend EndForm operator*(double s, EndForm w);
};

/// Linear connection on the (trivialized) fibre bundle, stored through its
/// coefficient fields: nabla_{d/dx_i} e_a = sum_b gamma[b][a][i] e_b.
/// The flat reference connection is gamma == 0.
struct Connection {
  Chart chart;
  int fibre_dim = 0;
  std::vector<std::vector<std::vector<SmoothField>>> gamma;  ///< [b][a][i]

  Connection() = default;
  Connection(Chart chart_, int fibre_dim_);
  static Connection flat(Chart chart_, int fibre_dim_) { return Connection(std::move(chart_), fibre_dim_); }

  SmoothField& at(int b, int a, int i) { return gamma[b][a][i]; }
  const SmoothField& at(int b, int a, int i) const { return gamma[b][a][i]; }

  bool is_flat() const;
};

/// Smooth map between charts, stored through its component expressions
/// X_j (one per target coordinate, over the source chart) together with the
/// exact differential DX[j][mu] = d X_j / d x_mu.
struct SmoothMap {
  Chart source, target;
  std::vector<SmoothField> comp;
  std::vector<std::vector<SmoothField>> dcomp;  ///< [target j][source mu]

  SmoothMap() = default;
  SmoothMap(Chart source_, Chart target_, std::vector<SmoothField> comp_);

  const SmoothField& differential(int j, int mu) const { return dcomp[j][mu]; }

  /// Compose a field on the target with the map (substitution).
  SmoothField pull_function(const SmoothField& f) const;

  /// Image of a source point.
  std::vector<double> image(const std::vector<double>& point) const;
};

// ---------------------------------------------------------------------------
// operations
// ---------------------------------------------------------------------------

/// Componentwise exterior derivative (flat connection), fibre slot untouched.
KForm exterior_derivative(const KForm& w);

/// Graded bracket extension: [w wedge, psi][a] = sum_{b,c} C[a](b,c) w[b] ^ psi[c].
KForm wedge_bracket(const LieAlgebra& alg, const KForm& w, const KForm& psi);

/// Endomorphism action extension: (T wedge w)[a] = sum_b T[a][b] ^ w[b].
KForm wedge_end(const EndForm& T, const KForm& w);

/// Matrix-valued wedge of two endomorphism forms: (T ^ S)[a][b] = sum_c T[a][c] ^ S[c][b].
EndForm wedge_end_end(const EndForm& T, const EndForm& S);

/// Pointwise adjoint composition: (ad o lambda)[a][b] = sum_c C[a](c, b) lambda[c].
EndForm ad_compose(const LieAlgebra& alg, const KForm& lambda);

/// Scalar pairing extension of a constant fibre metric:
/// kappa(w wedge, psi) = sum_{a,b} kappa(a,b) w[a] ^ psi[b], a scalar form.
KForm metric_pair(const Eigen::MatrixXd& kappa, const KForm& w, const KForm& psi);

/// Exterior covariant derivative of a fibre-valued form:
/// (d^nabla w)[b] = d(w[b]) + (-1)^degree sum_a w[a] ^ Gamma1[b][a],
/// where Gamma1[b][a] = sum_i gamma[b][a][i] dx^i.
KForm ext_cov_deriv(const Connection& nabla, const KForm& w);

/// Exterior covariant derivative of an endomorphism-valued form under the
/// induced connection on endomorphisms:
/// (d^nabla T)[c][a] = dT[c][a] + (-1)^deg sum_b (T[b][a]^Gamma1[c][b] - T[c][b]^Gamma1[b][a]).
EndForm ext_cov_deriv(const Connection& nabla, const EndForm& T);

/// Shift a connection by an endomorphism-valued 1-form: gamma' = gamma + D.
Connection shift_connection(const Connection& nabla, const EndForm& D);

/// Curvature 2-form of the connection, computed two independent ways (the
/// matrix formula dGamma + Gamma ^ Gamma, and (d^nabla)^2 applied to the
/// frame sections); throws CurvatureMismatch when the two routes disagree
/// beyond 1e-10 at seeded sample points.
EndForm curvature(const Connection& nabla, int check_points = 12, std::uint64_t seed = 2026);

/// Pullback of a fibre-valued form along X (fibre frame carried along):
/// substitution of components plus minor determinants of DX.
KForm pullback_form(const SmoothMap& X, const KForm& w);

/// Pullback of an endomorphism-valued form along X.
EndForm pullback_end(const SmoothMap& X, const EndForm& T);

/// Pullback connection: (X*gamma)[b][a][mu] = sum_i (gamma[b][a][i] o X) DX[i][mu].
Connection pullback_connection(const SmoothMap& X, const Connection& nabla);

/// Hodge star for a constant diagonal metric with signs in {+1,-1} and the
/// orientation dx^1 ^ ... ^ dx^n:
///   *(dx^I) = (prod_{i in I} s_i) * sign(I, I^c) * dx^(I^c).
/// Satisfies alpha ^ *beta = <alpha, beta> vol and ** = (-1)^{k(n-k)} det(s).
KForm hodge_star(const std::vector<int>& metric_signs, const KForm& w);

/// Residual of the bracket compatibility of a connection (pointwise max over
/// the sample points of the structure-constant derivation defect).
double compat_bracket_residual(const LieAlgebra& alg, const Connection& nabla,
                               const std::vector<std::vector<double>>& points);

// ---------------------------------------------------------------------------
// residual helpers
// ---------------------------------------------------------------------------

double max_abs(const KForm& w, const std::vector<std::vector<double>>& points);
double max_abs(const EndForm& w, const std::vector<std::vector<double>>& points);
double max_abs_diff(const KForm& a, const KForm& b, const std::vector<std::vector<double>>& points);
double max_abs_diff(const EndForm& a, const EndForm& b, const std::vector<std::vector<double>>& points);

}  // namespace labgauge
