#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "labgauge/errors.hpp"

namespace labgauge {

/// Finite-dimensional real Lie algebra in a fixed working basis e_1..e_dim.
///
/// The bracket is stored through its structure constants:
///   [e_b, e_c] = sum_a C[a](b, c) e_a.
/// Antisymmetry in (b, c) and the Jacobi identity are validated at
/// construction; violations are construction errors, never warnings.
struct LieAlgebra {
  int dim = 0;
  std::vector<Eigen::MatrixXd> C;  ///< C[a] is the dim x dim matrix (b,c) -> C[a](b,c)
  std::string name;

  bool operator==(const LieAlgebra& o) const;
};

/// Constant symmetric positive-definite metric on the fibres, in the working
/// basis (positive-definiteness validated at construction).
struct FibreMetric {
  Eigen::MatrixXd kappa;

  FibreMetric() = default;
  explicit FibreMetric(Eigen::MatrixXd k);
};

/// Build one of the named algebras:
///   "u1"          : 1-dimensional abelian
///   "u1^k"        : k-dimensional abelian (e.g. "u1^3")
///   "su2", "so3"  : Levi-Civita structure constants C[a](b,c) = eps_abc
///   "u1+su2"      : abelian direction e_1 plus an su2 block on e_2..e_4
///   "heisenberg3" : [e_1, e_2] = e_3, e_3 central
/// Throws UnknownAlgebraTag for anything else.
LieAlgebra make_algebra(const std::string& tag);

/// Build an algebra from raw structure constants raw[a][b][c] (0-based
/// nesting, 1-based in error messages).  Validates antisymmetry and Jacobi.
LieAlgebra make_algebra(const std::vector<std::vector<std::vector<double>>>& raw,
                        const std::string& name = "custom");

/// w[a] = sum_{b,c} C[a](b,c) u[b] v[c].
Eigen::VectorXd bracket(const LieAlgebra& alg, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Matrix of ad(u) = [u, -]:  ad(u)(a,c) = sum_b C[a](b,c) u[b], so that
/// bracket(u, v) = ad_matrix(u) * v.
Eigen::MatrixXd ad_matrix(const LieAlgebra& alg, const Eigen::VectorXd& u);

/// Orthonormal basis of the centre {v : ad(v) = 0}, as columns.  Computed
/// from the SVD of the stacked dim^2 x dim map v -> ad(v); singular values
/// below 1e-10 * max(sigma_max, 1) count as zero.
Eigen::MatrixXd centre_basis(const LieAlgebra& alg);

/// The stacked dim^2 x dim matrix of v -> ad(v), rows indexed by (a,c).
Eigen::MatrixXd stacked_adjoint(const LieAlgebra& alg);

/// Killing form B(x, y) = tr(ad_x ad_y) on basis vectors.
Eigen::MatrixXd killing_form(const LieAlgebra& alg);

/// Result of the ad-invariance scan of a candidate metric.
struct AdInvarianceReport {
  double residual = 0.0;  ///< max |kappa([e_z,e_x],e_y) + kappa(e_x,[e_z,e_y])|
  int z = 0, x = 0, y = 0;  ///< worst triple, 1-based
  bool invariant(double tol = 1e-12) const { return residual <= tol; }
};

/// Scan every basis triple for the ad-invariance defect of kappa.
AdInvarianceReport check_ad_invariance(const LieAlgebra& alg, const Eigen::MatrixXd& kappa);

/// An ad-invariant symmetric positive-definite metric for the algebra, found
/// by projecting the identity onto the linear space of ad-invariant symmetric
/// matrices.  Throws MetricValidation when no positive-definite ad-invariant
/// metric exists (e.g. heisenberg3).
FibreMetric ad_invariant_metric(const LieAlgebra& alg);

}  // namespace labgauge
