#include "labgauge/liecore.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace labgauge {

namespace {

constexpr double kValidateTol = 1e-12;

void validate(const LieAlgebra& alg) {
  const int n = alg.dim;
  // antisymmetry in the last two slots
  double worst = 0.0;
  int wa = 0, wb = 0, wc = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double v = std::abs(alg.C[a](b, c) + alg.C[a](c, b));
        if (v > worst) {
          worst = v;
          wa = a; wb = b; wc = c;
        }
      }
  if (worst > kValidateTol)
    throw AntisymmetryViolation(
        "structure constants are not antisymmetric in the last two slots: "
        "|C[" + std::to_string(wa + 1) + "][" + std::to_string(wb + 1) + "][" +
            std::to_string(wc + 1) + "] + C[" + std::to_string(wa + 1) + "][" +
            std::to_string(wc + 1) + "][" + std::to_string(wb + 1) + "]| = " +
            std::to_string(worst),
        wa + 1, wb + 1, wc + 1, worst);

  // Jacobi: [[e_a,e_b],e_c] + [[e_b,e_c],e_a] + [[e_c,e_a],e_b] = 0
  worst = 0.0;
  int we = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          double sum = 0.0;
          for (int d = 0; d < n; ++d)
            sum += alg.C[e](d, c) * alg.C[d](a, b) +
                   alg.C[e](d, a) * alg.C[d](b, c) +
                   alg.C[e](d, b) * alg.C[d](c, a);
          if (std::abs(sum) > worst) {
            worst = std::abs(sum);
            wa = a; wb = b; wc = c; we = e;
          }
        }
  if (worst > kValidateTol)
    throw JacobiViolation(
        "structure constants violate the Jacobi identity at basis triple (" +
            std::to_string(wa + 1) + "," + std::to_string(wb + 1) + "," +
            std::to_string(wc + 1) + "), component " + std::to_string(we + 1) +
            ", magnitude " + std::to_string(worst),
        wa + 1, wb + 1, wc + 1, we + 1, worst);
}

LieAlgebra zero_algebra(int dim, const std::string& name) {
  LieAlgebra alg;
  alg.dim = dim;
  alg.name = name;
  alg.C.assign(dim, Eigen::MatrixXd::Zero(dim, dim));
  return alg;
}

// C[a](b,c) = eps_abc placed with an index offset (for direct-sum blocks)
void put_epsilon_block(LieAlgebra& alg, int off) {
  static const int even[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (const auto& p : even) {
    alg.C[off + p[0]](off + p[1], off + p[2]) = 1.0;
    alg.C[off + p[0]](off + p[2], off + p[1]) = -1.0;
  }
}

}  // namespace

bool LieAlgebra::operator==(const LieAlgebra& o) const {
  if (dim != o.dim) return false;
  for (int a = 0; a < dim; ++a)
    if (C[a] != o.C[a]) return false;
  return true;
}

FibreMetric::FibreMetric(Eigen::MatrixXd k) : kappa(std::move(k)) {
  if (kappa.rows() != kappa.cols())
    throw MetricValidation("fibre metric must be square, got " + std::to_string(kappa.rows()) +
                           "x" + std::to_string(kappa.cols()));
  if ((kappa - kappa.transpose()).cwiseAbs().maxCoeff() > kValidateTol)
    throw MetricValidation("fibre metric must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(kappa);
  if (llt.info() != Eigen::Success)
    throw MetricValidation("fibre metric must be positive definite");
}

LieAlgebra make_algebra(const std::string& tag) {
  if (tag == "u1") {
    return zero_algebra(1, "u1");
  }
  if (tag.rfind("u1^", 0) == 0) {
    const std::string ks = tag.substr(3);
    char* end = nullptr;
    long k = std::strtol(ks.c_str(), &end, 10);
    if (end && *end == '\0' && k >= 1 && k <= 64) return zero_algebra(static_cast<int>(k), tag);
  }
  if (tag == "su2" || tag == "so3") {
    LieAlgebra alg = zero_algebra(3, tag);
    put_epsilon_block(alg, 0);
    validate(alg);
    return alg;
  }
  if (tag == "u1+su2") {
    LieAlgebra alg = zero_algebra(4, tag);
    put_epsilon_block(alg, 1);
    validate(alg);
    return alg;
  }
  if (tag == "heisenberg3") {
    LieAlgebra alg = zero_algebra(3, tag);
    alg.C[2](0, 1) = 1.0;
    alg.C[2](1, 0) = -1.0;
    validate(alg);
    return alg;
  }
  throw UnknownAlgebraTag("unknown algebra tag '" + tag +
                          "'; known: u1, u1^k, su2, so3, u1+su2, heisenberg3");
}

LieAlgebra make_algebra(const std::vector<std::vector<std::vector<double>>>& raw,
                        const std::string& name) {
  const int n = static_cast<int>(raw.size());
  LieAlgebra alg = zero_algebra(n, name);
  for (int a = 0; a < n; ++a) {
    if (static_cast<int>(raw[a].size()) != n)
      throw DimensionMismatch("structure constants must form a dim^3 cube");
    for (int b = 0; b < n; ++b) {
      if (static_cast<int>(raw[a][b].size()) != n)
        throw DimensionMismatch("structure constants must form a dim^3 cube");
      for (int c = 0; c < n; ++c) alg.C[a](b, c) = raw[a][b][c];
    }
  }
  validate(alg);
  return alg;
}

Eigen::VectorXd bracket(const LieAlgebra& alg, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != alg.dim || v.size() != alg.dim)
    throw DimensionMismatch("bracket arguments must have the algebra dimension " +
                            std::to_string(alg.dim));
  Eigen::VectorXd w(alg.dim);
  for (int a = 0; a < alg.dim; ++a) w[a] = u.dot(alg.C[a] * v);
  return w;
}

Eigen::MatrixXd ad_matrix(const LieAlgebra& alg, const Eigen::VectorXd& u) {
  if (u.size() != alg.dim)
    throw DimensionMismatch("ad argument must have the algebra dimension " +
                            std::to_string(alg.dim));
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(alg.dim, alg.dim);
  for (int a = 0; a < alg.dim; ++a)
    for (int c = 0; c < alg.dim; ++c) {
      double s = 0.0;
      for (int b = 0; b < alg.dim; ++b) s += alg.C[a](b, c) * u[b];
      M(a, c) = s;
    }
  return M;
}

Eigen::MatrixXd stacked_adjoint(const LieAlgebra& alg) {
  const int n = alg.dim;
  Eigen::MatrixXd S(n * n, n);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c)
      for (int b = 0; b < n; ++b) S(a * n + c, b) = alg.C[a](b, c);
  return S;
}

Eigen::MatrixXd centre_basis(const LieAlgebra& alg) {
  const Eigen::MatrixXd S = stacked_adjoint(alg);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(sv.size() > 0 ? sv[0] : 0.0, 1.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  return svd.matrixV().rightCols(alg.dim - rank);
}

Eigen::MatrixXd killing_form(const LieAlgebra& alg) {
  const int n = alg.dim;
  std::vector<Eigen::MatrixXd> ad(n);
  for (int x = 0; x < n; ++x) ad[x] = ad_matrix(alg, Eigen::VectorXd::Unit(n, x));
  Eigen::MatrixXd B(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) B(x, y) = (ad[x] * ad[y]).trace();
  return B;
}

AdInvarianceReport check_ad_invariance(const LieAlgebra& alg, const Eigen::MatrixXd& kappa) {
  if (kappa.rows() != alg.dim || kappa.cols() != alg.dim)
    throw DimensionMismatch("metric must be " + std::to_string(alg.dim) + "x" +
                            std::to_string(alg.dim));
  AdInvarianceReport rep;
  const int n = alg.dim;
  for (int z = 0; z < n; ++z)
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        double v = 0.0;
        for (int d = 0; d < n; ++d)
          v += alg.C[d](z, x) * kappa(d, y) + kappa(x, d) * alg.C[d](z, y);
        if (std::abs(v) > rep.residual) {
          rep.residual = std::abs(v);
          rep.z = z + 1;
          rep.x = x + 1;
          rep.y = y + 1;
        }
      }
  return rep;
}

FibreMetric ad_invariant_metric(const LieAlgebra& alg) {
  const int n = alg.dim;
  // Solve the linear system L_z(kappa) = ad_z^T kappa + kappa ad_z = 0 for
  // symmetric kappa, then pick the nullspace element closest to the identity.
  const int nsym = n * (n + 1) / 2;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) pairs.emplace_back(i, j);

  Eigen::MatrixXd L(n * n * n, nsym);
  L.setZero();
  for (int z = 0; z < n; ++z) {
    Eigen::MatrixXd adz = ad_matrix(alg, Eigen::VectorXd::Unit(n, z));
    for (int p = 0; p < nsym; ++p) {
      auto [i, j] = pairs[p];
      Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
      E(i, j) = 1.0;
      E(j, i) = 1.0;
      Eigen::MatrixXd D = adz.transpose() * E + E * adz;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) L(z * n * n + a * n + b, p) += D(a, b);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(sv.size() > 0 ? sv[0] : 0.0, 1.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  const Eigen::MatrixXd null = svd.matrixV().rightCols(nsym - rank);
  if (null.cols() == 0)
    throw MetricValidation("algebra '" + alg.name + "' admits no ad-invariant metric");

  // coefficients of the identity in the symmetric parameterization
  Eigen::VectorXd id_coeff = Eigen::VectorXd::Zero(nsym);
  for (int p = 0; p < nsym; ++p)
    if (pairs[p].first == pairs[p].second) id_coeff[p] = 1.0;
  Eigen::VectorXd proj = null * (null.transpose() * id_coeff);

  Eigen::MatrixXd kappa = Eigen::MatrixXd::Zero(n, n);
  for (int p = 0; p < nsym; ++p) {
    auto [i, j] = pairs[p];
    kappa(i, j) = proj[p];
    kappa(j, i) = proj[p];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(kappa);
  if (llt.info() != Eigen::Success)
    throw MetricValidation("algebra '" + alg.name +
                           "' admits no positive-definite ad-invariant metric "
                           "(projection of the identity is not positive definite)");
  return FibreMetric(kappa);
}

}  // namespace labgauge
