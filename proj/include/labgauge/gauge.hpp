#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "labgauge/forms.hpp"
#include "labgauge/liecore.hpp"
#include "labgauge/sampling.hpp"

namespace labgauge {

/// A complete model configuration: a source chart with a diagonal metric, a
/// target chart carrying the algebra bundle data (connection, twist two-form,
/// potential), a smooth map between them and a gauge field on the source.
struct Scenario {
  std::string name;

  Chart chart_M;             ///< source chart
  std::vector<int> eta;      ///< diagonal metric signs on M, each +1 or -1
  Chart chart_N;             ///< target chart
  std::vector<int> gN;       ///< diagonal metric signs on N, each +1

  LieAlgebra alg;
  FibreMetric kappa;         ///< constant fibre metric in the frame
  Connection nabla;          ///< frame connection on N
  KForm zeta;                ///< fibre-valued two-form on N
  SmoothField V;             ///< potential function on N
  SmoothMap X;               ///< M -> N
  KForm A;                   ///< fibre-valued one-form on M (the gauge field)

  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;  ///< per-check overrides
};

/// Check internal consistency (dimensions, degrees, charts, metric signs);
/// throws ValidationError naming the offending element.
void validate_scenario(const Scenario& s);

/// Field strength of the gauge field:
///   G = d^(X*nabla) A + 1/2 [A wedge, A] + X^! zeta,
/// a fibre-valued two-form on M.
KForm field_strength(const Scenario& s);

/// Same, for a candidate gauge field other than the scenario's own.
KForm field_strength_for(const Scenario& s, const KForm& A);

/// Infinitesimal gauge variation of the gauge field with parameter eps (a
/// fibre-valued zero-form on M):  delta A = [eps, A] - d^(X*nabla) eps.
KForm gauge_variation_A(const Scenario& s, const KForm& eps);

/// Two-sided numeric comparison; relative() uses maxdiff / (1 + maxmag).
struct ResidualCheck {
  double residual = 0.0;   ///< max absolute deviation
  double reference = 0.0;  ///< max magnitude encountered
  double relative() const { return residual / (1.0 + reference); }
};

/// Exact directional derivative of G along the gauge variation (central
/// difference, exact because G is quadratic in the field) compared with the
/// claimed first-order law  delta G = [eps, G].
ResidualCheck gauge_variation_G(const Scenario& s, const KForm& eps, Sampler& sampler,
                                int npoints, int random_tuples = 6);

/// Scalar coefficient of the Lagrangian top-form on the source chart:
///   -1/2 kappa(G wedge, *G) + gN(dX wedge, *dX) + (V o X) vol.
SmoothField lagrangian_density(const Scenario& s);
SmoothField lagrangian_density(const Scenario& s, const KForm& A);

/// First t-derivative of the density along the gauge flow A + t delta A at
/// t = 0, via a four-point stencil that is exact for the quartic dependence.
/// Throws PreconditionFailed when a hypothesis fails: the fibre metric is not
/// ad-invariant, or the connection fails either compatibility condition.
ResidualCheck gauge_invariance_residual(const Scenario& s, const KForm& eps, Sampler& sampler,
                                        int npoints);

/// Deviation form of the differential consequence of the structure equations:
///   d^(X*nabla) G + [A wedge, G]  compared against  X^!(d^nabla zeta).
ResidualCheck bianchi_defect(const Scenario& s, Sampler& sampler, int npoints,
                             int random_tuples = 6);

/// Residual of the curvature condition  R_nabla = ad o zeta  at the points
/// (relative, maxdiff / (1 + maxmag)).
double compat_curvature_residual(const Scenario& s, const std::vector<std::vector<double>>& pts);

/// Random fibre-valued zero-form on the source chart (a gauge parameter).
KForm random_gauge_parameter(const Scenario& s, Sampler& sampler);

}  // namespace labgauge
