#pragma once

#include <optional>
#include <string>
#include <vector>

#include "labgauge/forms.hpp"
#include "labgauge/oracle.hpp"
#include "labgauge/sampling.hpp"

namespace labgauge {

/// The ten structural identities of the exterior covariant calculus that the
/// library can check numerically.  Each is verified by computing the two
/// sides through genuinely different code paths and, where a graded product
/// appears, additionally re-evaluating that product with the slow
/// permutation-sum oracle on random tangent tuples.
enum class CalculusIdentity {
  PullbackNaturality,      ///< d^(X*nabla)(X^! w) = X^!(d^nabla w)
  ConnectionShift,         ///< d^(nabla+D) w = d^nabla w + D ^ w
  LeibnizEndomorphism,     ///< d^nabla(T ^ w) = (d^nabla T) ^ w + (-1)^deg(T) T ^ d^nabla w
  AdWedge,                 ///< (ad o w) ^ psi = [w ^, psi]
  PullbackBracket,         ///< X^!([w ^, psi]) = [X^! w ^, X^! psi]
  GradedAntisymmetry,      ///< [w ^, psi] = -(-1)^(deg w * deg psi) [psi ^, w]
  GradedJacobi,            ///< [w ^, [w ^, w]] = 0
  AdPullback,              ///< ad o (X^! w) = X^!(ad o w)
  LeibnizBracket,          ///< d^nabla [w ^, psi] = [d^nabla w ^, psi] + (-1)^deg(w) [w ^, d^nabla psi]
  AdCommutesDifferential,  ///< d^nabla (ad o w) = ad o (d^nabla w)
};

/// All ten identities in declaration order.
const std::vector<CalculusIdentity>& all_identities();

/// Stable kebab-case id, e.g. "ad-wedge".
std::string identity_name(CalculusIdentity which);

/// Inverse of identity_name; empty when the name is unknown.
std::optional<CalculusIdentity> identity_from_name(const std::string& name);

/// One randomly generated situation an identity is checked on.
struct IdentityInstance {
  LieAlgebra alg;
  Chart M, N;
  SmoothMap X;       ///< M -> N (used by the pullback identities)
  Connection nabla;  ///< on N; bracket-compatible for the identities that need it
  EndForm D;         ///< degree-1 endomorphism shift (connection-shift identity)
  KForm omega, psi;  ///< on N
  EndForm T;         ///< on N (endomorphism Leibniz identity)
};

/// Draw a random instance suited to the identity (degrees valid, connection
/// bracket-compatible exactly when the identity's hypothesis demands it).
IdentityInstance random_identity_instance(CalculusIdentity which, const LieAlgebra& alg,
                                          Sampler& sampler);

/// Residual of one identity check.
struct IdentityResult {
  double residual = 0.0;   ///< max absolute deviation over points, components, tuples
  double reference = 0.0;  ///< max magnitude of either side (for relative scaling)
  double relative() const { return residual / (1.0 + reference); }
};

/// Evaluate both sides of the identity on `npoints` sample points (drawn from
/// the sampler), componentwise and on `random_tuples` random tangent tuples
/// per point, folding in the slow-oracle re-evaluation of the graded
/// products.  Throws PreconditionFailed when a hypothesis fails (e.g. the
/// bracket-Leibniz identities on a non-compatible connection).
IdentityResult verify_calculus_identity(CalculusIdentity which, const IdentityInstance& inst,
                                        Sampler& sampler, int npoints, int random_tuples = 10);

}  // namespace labgauge
