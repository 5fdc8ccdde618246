#pragma once

#include <cstdint>
#include <optional>

#include "labgauge/gauge.hpp"

namespace labgauge {

/// Apply the field redefinition driven by a fibre-valued one-form lambda on
/// the target chart:
///   A       -> A + X^! lambda
///   zeta    -> zeta - d^nabla lambda + 1/2 [lambda wedge, lambda]
///   nabla   -> nabla - ad o lambda
/// Everything else (X, kappa, V, metrics) is untouched.
Scenario apply_redefinition(const Scenario& s, const KForm& lambda);

/// Measured consequences of one redefinition.
struct RedefinitionReport {
  KForm lambda;
  double G_residual = 0.0;        ///< field strength before vs after
  double G_reference = 0.0;
  double involution_residual = 0.0;      ///< redefine by lambda then -lambda vs original
  double dnz_invariance_residual = 0.0;  ///< d^nabla zeta before vs after
  double compat1_residual_after = 0.0;   ///< bracket compatibility of the new connection
  double compat2_residual_after = 0.0;   ///< curvature condition for the new data
};

/// Apply the redefinition and verify: the field strength is unchanged, the
/// redefinition by -lambda undoes it, d^nabla zeta is unchanged, and both
/// compatibility conditions survive (when they held before).
RedefinitionReport verify_redefinition(const Scenario& s, const KForm& lambda, Sampler& sampler,
                                       int npoints, int random_tuples = 6);

/// Bracket-compatibility residual of the scenario's connection at the points.
double check_compat_bracket(const Scenario& s, const std::vector<std::vector<double>>& pts);

/// Solve  ad o zeta = R_nabla  for zeta through the constant pseudo-inverse of
/// the stacked adjoint, applied to the curvature components at expression
/// level.  Throws NotInAdjointImage when the residual at seeded sample points
/// exceeds tol (the curvature has a component outside the adjoint image).
KForm solve_zeta(const LieAlgebra& alg, const Connection& nabla, double tol = 1e-8,
                 int check_points = 12, std::uint64_t seed = 2026);

/// The derived three-form d^nabla zeta together with how far its values sit
/// from the centre (max entry of ad applied to any slot value at the points).
struct DerivedTwist {
  KForm form;
  double centre_residual = 0.0;
};
DerivedTwist dnabla_zeta(const Scenario& s, const std::vector<std::vector<double>>& pts);

/// Project a fibre-valued form onto the centre (orthogonal projection in the
/// frame, applied at expression level).  When complement_residual is non-null
/// it receives the max deviation |w - P w| at the points.
KForm centre_project(const LieAlgebra& alg, const KForm& w,
                     const std::vector<std::vector<double>>& pts,
                     double* complement_residual = nullptr);

/// Closedness of the centre coefficients of a centre-valued form: expand the
/// form in an orthonormal centre basis and take the plain exterior derivative
/// of the scalar coefficient forms; returns its max magnitude at the points.
/// Throws PreconditionFailed when the constant centre sections are not
/// parallel for the connection (the coefficients are only well defined then).
double closedness_check(const LieAlgebra& alg, const Connection& nabla, const KForm& w,
                        const std::vector<std::vector<double>>& pts);

/// A primitive produced by the scaling homotopy operator on a chart whose
/// domain is star-shaped about the origin, with the verification residual of
/// d(primitive) = w at seeded sample points.
struct PrimitiveResult {
  KForm primitive;
  double residual = 0.0;
};

/// Homotopy-operator primitive of a closed form of degree >= 1:
///   (K w)[J] = sum_{I, q} (-1)^(q-1) x^(i_q) int_0^1 t^(k-1) w_I(t x) dt,
/// the integral evaluated by order-20 Gauss-Legendre quadrature (exact for
/// polynomial integrands up to degree 39).  Throws DomainError when the chart
/// domain is not star-shaped about the origin, NotClosed when d(w) does not
/// vanish at sample points, QuadratureDegradation when the verification
/// d(K w) = w fails beyond 1e-7.
PrimitiveResult poincare_primitive(const KForm& w, double closed_tol = 1e-9,
                                   int check_points = 20, std::uint64_t seed = 2026);

/// Classification of the obstruction carried by d^nabla zeta.
enum class ObstructionVerdict {
  LocallyZero,                   ///< d^nabla zeta vanishes at the sample points
  NonzeroRepresentativeButExact, ///< nonzero, closed, and exhibited as exact
  NotStarShapedDomain,           ///< nonzero but no primitive is attempted
};

struct ObstructionReport {
  ObstructionVerdict verdict;
  KForm dnz;                        ///< the derived three-form
  double dnz_max = 0.0;             ///< its max magnitude at the points
  double centre_residual = 0.0;     ///< distance of its values from the centre
  double closedness_residual = 0.0; ///< d of the centre coefficients
  std::optional<PrimitiveResult> primitive;  ///< present for the exact verdict
};

/// Full obstruction analysis of a scenario: compute d^nabla zeta, measure how
/// centre-valued and closed it is, and either report it locally zero, exhibit
/// a primitive (star-shaped domain), or flag the domain.
ObstructionReport obstruction_report(const Scenario& s, int npoints = 20);

/// Decomposition of a connection as flat minus ad(lambda).
struct InnerDecomposition {
  KForm lambda;
  double residual = 0.0;        ///< ad o lambda vs -Gamma at sample points
  bool centre_ambiguous = false; ///< nontrivial centre: lambda is not unique
};

/// Recover lambda with  nabla = flat - ad o lambda  through the constant
/// pseudo-inverse of the stacked adjoint.  Throws NotInnerValued when the
/// connection is not such a shift (residual above tol at sample points).
InnerDecomposition extract_inner_lambda(const LieAlgebra& alg, const Connection& nabla,
                                        double tol = 1e-8, int check_points = 12,
                                        std::uint64_t seed = 2026);

/// The canonical scenario with a nonzero obstruction: flat connection, twist
/// two-form x3 dx1^dx2 carried by a sign-normalized centre direction, zero
/// gauge field, coordinate map from a four-dimensional source with signs
/// (+,-,-,-), and an ad-invariant fibre metric.  Throws NoCentre when the
/// algebra has trivial centre and DimensionTooSmall when ndim < 3.
Scenario canonical_nonclassical(const LieAlgebra& alg, int ndim,
                                const std::optional<KForm>& zeta_override = std::nullopt);

/// Witness that no redefinition can remove the twist form: d^nabla zeta is
/// redefinition-invariant, so a nonzero value certifies that zeta stays
/// nonzero under every redefinition.  Random trials corroborate numerically.
struct NoVanishingCertificate {
  bool certified = false;        ///< dnz_max exceeds the certification threshold
  double dnz_max = 0.0;          ///< invariant witness magnitude
  double max_norm_before = 0.0;  ///< max |zeta| at the points before any trial
  double min_over_trials = 0.0;  ///< min over trials of max |zeta after| at the points
  int trials = 0;
};
NoVanishingCertificate no_vanishing_zeta_certificate(const Scenario& s, int trials,
                                                     std::uint64_t seed, int npoints = 20);

}  // namespace labgauge
