#include "labgauge/identities.hpp"

#include <algorithm>
#include <cmath>

namespace labgauge {

const std::vector<CalculusIdentity>& all_identities() {
  static const std::vector<CalculusIdentity> ids = {
      CalculusIdentity::PullbackNaturality,  CalculusIdentity::ConnectionShift,
      CalculusIdentity::LeibnizEndomorphism, CalculusIdentity::AdWedge,
      CalculusIdentity::PullbackBracket,     CalculusIdentity::GradedAntisymmetry,
      CalculusIdentity::GradedJacobi,        CalculusIdentity::AdPullback,
      CalculusIdentity::LeibnizBracket,      CalculusIdentity::AdCommutesDifferential,
  };
  return ids;
}

std::string identity_name(CalculusIdentity which) {
  switch (which) {
    case CalculusIdentity::PullbackNaturality: return "pullback-naturality";
    case CalculusIdentity::ConnectionShift: return "connection-shift";
    case CalculusIdentity::LeibnizEndomorphism: return "leibniz-endomorphism";
    case CalculusIdentity::AdWedge: return "ad-wedge";
    case CalculusIdentity::PullbackBracket: return "pullback-bracket";
    case CalculusIdentity::GradedAntisymmetry: return "graded-antisymmetry";
    case CalculusIdentity::GradedJacobi: return "graded-jacobi";
    case CalculusIdentity::AdPullback: return "ad-pullback";
    case CalculusIdentity::LeibnizBracket: return "leibniz-bracket";
    case CalculusIdentity::AdCommutesDifferential: return "ad-commutes-differential";
  }
  return "?";
}

std::optional<CalculusIdentity> identity_from_name(const std::string& name) {
  for (CalculusIdentity id : all_identities())
    if (identity_name(id) == name) return id;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// random instances
// ---------------------------------------------------------------------------

namespace {

KForm random_kform(const Chart& chart, int fibre_dim, int degree, Sampler& s) {
  KForm w(chart, fibre_dim, degree);
  for (int a = 0; a < fibre_dim; ++a)
    for (int r = 0; r < w.ranks(); ++r) w.comp[a][r] = s.polynomial(chart, 2, 2);
  return w;
}

EndForm random_endform(const Chart& chart, int fibre_dim, int degree, Sampler& s) {
  EndForm T(chart, fibre_dim, degree);
  for (int a = 0; a < fibre_dim; ++a)
    for (int b = 0; b < fibre_dim; ++b)
      for (int r = 0; r < T.ranks(); ++r) T.comp[a][b][r] = s.polynomial(chart, 2, 1);
  return T;
}

Connection random_connection(const Chart& chart, int fibre_dim, Sampler& s) {
  Connection nb(chart, fibre_dim);
  for (int b = 0; b < fibre_dim; ++b)
    for (int a = 0; a < fibre_dim; ++a)
      for (int i = 0; i < chart.dim; ++i) nb.gamma[b][a][i] = s.polynomial(chart, 1, 1);
  return nb;
}

Connection random_inner_connection(const LieAlgebra& alg, const Chart& chart, Sampler& s) {
  KForm lambda = random_kform(chart, alg.dim, 1, s);
  return shift_connection(Connection::flat(chart, alg.dim), -1.0 * ad_compose(alg, lambda));
}

SmoothMap random_map(const Chart& source, const Chart& target, Sampler& s) {
  std::vector<SmoothField> comps;
  comps.reserve(target.dim);
  for (int j = 0; j < target.dim; ++j) comps.push_back(s.polynomial(source, 2, 2));
  return SmoothMap(source, target, std::move(comps));
}

// ---------------------------------------------------------------------------
// comparison plumbing
// ---------------------------------------------------------------------------

struct Accum {
  double residual = 0.0;
  double reference = 0.0;
  void diff(double d) { residual = std::max(residual, std::abs(d)); }
  void mag(double m) { reference = std::max(reference, std::abs(m)); }
};

std::vector<Eigen::VectorXd> random_tuple(int dim, int count, Sampler& s) {
  std::vector<Eigen::VectorXd> out(count);
  for (int i = 0; i < count; ++i) {
    out[i] = Eigen::VectorXd(dim);
    for (int j = 0; j < dim; ++j) out[i][j] = s.uniform(-1.0, 1.0);
  }
  return out;
}

void compare_values(const FormValue& va, const FormValue& vb, Sampler& s, int tuples, Accum& acc) {
  // componentwise (equivalent to the coordinate-basis tangent tuples)
  for (int i = 0; i < va.comp.rows(); ++i)
    for (int j = 0; j < va.comp.cols(); ++j) {
      acc.diff(va.comp(i, j) - vb.comp(i, j));
      acc.mag(va.comp(i, j));
      acc.mag(vb.comp(i, j));
    }
  // random tangent tuples
  if (va.degree > 0 && va.comp.cols() > 0) {
    for (int t = 0; t < tuples; ++t) {
      auto vecs = random_tuple(va.n, va.degree, s);
      Eigen::VectorXd ra = apply_value(va, vecs), rb = apply_value(vb, vecs);
      for (int i = 0; i < ra.size(); ++i) {
        acc.diff(ra[i] - rb[i]);
        acc.mag(ra[i]);
        acc.mag(rb[i]);
      }
    }
  }
}

void compare_kforms(const KForm& A, const KForm& B, const std::vector<std::vector<double>>& pts,
                    Sampler& s, int tuples, Accum& acc) {
  for (const auto& pt : pts) compare_values(value_of(A, pt), value_of(B, pt), s, tuples, acc);
}

void compare_endforms(const EndForm& A, const EndForm& B, const std::vector<std::vector<double>>& pts,
                      Sampler& s, int tuples, Accum& acc) {
  for (const auto& pt : pts) compare_values(value_of(A, pt), value_of(B, pt), s, tuples, acc);
}

// slow-oracle re-evaluation of a bracket product against its fast result
void slow_check_bracket(const LieAlgebra& alg, const KForm& w, const KForm& psi, const KForm& fast,
                        const std::vector<std::vector<double>>& pts, Sampler& s, int tuples,
                        Accum& acc) {
  auto combine = [&alg](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    return bracket(alg, u, v);
  };
  for (const auto& pt : pts) {
    FormValue vw = value_of(w, pt), vp = value_of(psi, pt), vf = value_of(fast, pt);
    if (vf.comp.cols() == 0) continue;
    for (int t = 0; t < tuples; ++t) {
      auto vecs = random_tuple(vf.n, vf.degree, s);
      Eigen::VectorXd slow = slow_graded_product(vw, vp, combine, vecs);
      Eigen::VectorXd fastv = apply_value(vf, vecs);
      for (int i = 0; i < slow.size(); ++i) {
        acc.diff(slow[i] - fastv[i]);
        acc.mag(slow[i]);
      }
    }
  }
}

// slow-oracle re-evaluation of an endomorphism action against its fast result
void slow_check_end(const EndForm& T, const KForm& w, const KForm& fast,
                    const std::vector<std::vector<double>>& pts, Sampler& s, int tuples,
                    Accum& acc) {
  const int fd = T.fibre_dim;
  auto combine = [fd](const Eigen::VectorXd& tflat, const Eigen::VectorXd& v) {
    Eigen::MatrixXd m(fd, fd);
    for (int a = 0; a < fd; ++a)
      for (int b = 0; b < fd; ++b) m(a, b) = tflat[a * fd + b];
    return Eigen::VectorXd(m * v);
  };
  for (const auto& pt : pts) {
    FormValue vt = value_of(T, pt), vw = value_of(w, pt), vf = value_of(fast, pt);
    if (vf.comp.cols() == 0) continue;
    for (int t = 0; t < tuples; ++t) {
      auto vecs = random_tuple(vf.n, vf.degree, s);
      Eigen::VectorXd slow = slow_graded_product(vt, vw, combine, vecs);
      Eigen::VectorXd fastv = apply_value(vf, vecs);
      for (int i = 0; i < slow.size(); ++i) {
        acc.diff(slow[i] - fastv[i]);
        acc.mag(slow[i]);
      }
    }
  }
}

// fully nested permutation-sum evaluation of [w ^, [w ^, w]] (no fast parts)
Eigen::VectorXd slow_triple_bracket(const LieAlgebra& alg, const FormValue& w,
                                    const std::vector<Eigen::VectorXd>& vectors) {
  const int l = w.degree;
  auto combine = [&alg](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    return bracket(alg, u, v);
  };
  std::vector<int> perm(3 * l);
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(w.fibre_dim);
  double lfact = 1.0, llfact = 1.0;
  for (int i = 2; i <= l; ++i) lfact *= i;
  for (int i = 2; i <= 2 * l; ++i) llfact *= i;
  do {
    int sign = 1;
    for (std::size_t i = 0; i < perm.size(); ++i)
      for (std::size_t j = i + 1; j < perm.size(); ++j)
        if (perm[i] > perm[j]) sign = -sign;
    std::vector<Eigen::VectorXd> left(l), right(2 * l);
    for (int i = 0; i < l; ++i) left[i] = vectors[perm[i]];
    for (int i = 0; i < 2 * l; ++i) right[i] = vectors[perm[l + i]];
    Eigen::VectorXd inner = slow_graded_product(w, w, combine, right);
    out += sign * bracket(alg, apply_value(w, left), inner);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out / (lfact * llfact);
}

void require_compat(const LieAlgebra& alg, const Connection& nabla,
                    const std::vector<std::vector<double>>& pts) {
  const double res = compat_bracket_residual(alg, nabla, pts);
  if (res > 1e-8)
    throw PreconditionFailed(
        "the connection does not derive the bracket (compatibility residual " +
            std::to_string(res) + "), so the bracket Leibniz identities do not apply",
        "bracket compatibility of the connection", res);
}

}  // namespace

IdentityInstance random_identity_instance(CalculusIdentity which, const LieAlgebra& alg,
                                          Sampler& s) {
  Chart M(4), N(3);
  SmoothMap X = random_map(M, N, s);
  const int fd = alg.dim;
  const bool needs_compat = which == CalculusIdentity::LeibnizBracket ||
                            which == CalculusIdentity::AdCommutesDifferential;
  Connection nabla =
      needs_compat ? random_inner_connection(alg, N, s) : random_connection(N, fd, s);
  EndForm D = random_endform(N, fd, 1, s);

  int l = 0, k = 0, m = 0;
  switch (which) {
    case CalculusIdentity::PullbackNaturality:
    case CalculusIdentity::ConnectionShift:
    case CalculusIdentity::AdPullback:
    case CalculusIdentity::AdCommutesDifferential:
      l = s.below(3);
      break;
    case CalculusIdentity::LeibnizEndomorphism:
      m = s.below(2);
      l = s.below(3 - m);
      break;
    case CalculusIdentity::AdWedge:
    case CalculusIdentity::PullbackBracket:
    case CalculusIdentity::GradedAntisymmetry:
      l = s.below(3);
      k = s.below(4 - l);
      break;
    case CalculusIdentity::GradedJacobi:
      l = s.below(2);
      break;
    case CalculusIdentity::LeibnizBracket:
      l = s.below(2);
      k = s.below(3 - l);
      break;
  }
  KForm omega = random_kform(N, fd, l, s);
  KForm psi = random_kform(N, fd, k, s);
  EndForm T = random_endform(N, fd, m, s);
  return IdentityInstance{alg,          M,
                          N,            std::move(X),
                          std::move(nabla), std::move(D),
                          std::move(omega), std::move(psi),
                          std::move(T)};
}

IdentityResult verify_calculus_identity(CalculusIdentity which, const IdentityInstance& inst,
                                        Sampler& sampler, int npoints, int random_tuples) {
  const LieAlgebra& alg = inst.alg;
  const bool on_source = which == CalculusIdentity::PullbackNaturality ||
                         which == CalculusIdentity::PullbackBracket ||
                         which == CalculusIdentity::AdPullback;
  const Chart& where = on_source ? inst.M : inst.N;
  std::vector<std::vector<double>> pts;
  pts.reserve(npoints);
  for (int i = 0; i < npoints; ++i) pts.push_back(sampler.point(where));

  Accum acc;
  switch (which) {
    case CalculusIdentity::PullbackNaturality: {
      KForm lhs = ext_cov_deriv(pullback_connection(inst.X, inst.nabla),
                                pullback_form(inst.X, inst.omega));
      KForm rhs = pullback_form(inst.X, ext_cov_deriv(inst.nabla, inst.omega));
      compare_kforms(lhs, rhs, pts, sampler, random_tuples, acc);
      break;
    }
    case CalculusIdentity::ConnectionShift: {
      KForm lhs = ext_cov_deriv(shift_connection(inst.nabla, inst.D), inst.omega);
      KForm dw = ext_cov_deriv(inst.nabla, inst.omega);
      KForm action = wedge_end(inst.D, inst.omega);
      KForm rhs = dw + action;
      compare_kforms(lhs, rhs, pts, sampler, random_tuples, acc);
      slow_check_end(inst.D, inst.omega, action, pts, sampler, random_tuples, acc);
      break;
    }
    case CalculusIdentity::LeibnizEndomorphism: {
      KForm tw = wedge_end(inst.T, inst.omega);
      KForm lhs = ext_cov_deriv(inst.nabla, tw);
      KForm first = wedge_end(ext_cov_deriv(inst.nabla, inst.T), inst.omega);
      KForm second = wedge_end(inst.T, ext_cov_deriv(inst.nabla, inst.omega));
      KForm rhs = inst.T.degree % 2 == 0 ? first + second : first - second;
      compare_kforms(lhs, rhs, pts, sampler, random_tuples, acc);
      slow_check_end(inst.T, inst.omega, tw, pts, sampler, random_tuples, acc);
      break;
    }
    case CalculusIdentity::AdWedge: {
      KForm lhs = wedge_end(ad_compose(alg, inst.omega), inst.psi);
      KForm rhs = wedge_bracket(alg, inst.omega, inst.psi);
      compare_kforms(lhs, rhs, pts, sampler, random_tuples, acc);
      slow_check_bracket(alg, inst.omega, inst.psi, rhs, pts, sampler, random_tuples, acc);
      break;
    }
    case CalculusIdentity::PullbackBracket: {
      KForm lhs = pullback_form(inst.X, wedge_bracket(alg, inst.omega, inst.psi));
      KForm pw = pullback_form(inst.X, inst.omega);
      KForm pp = pullback_form(inst.X, inst.psi);
      KForm rhs = wedge_bracket(alg, pw, pp);
      compare_kforms(lhs, rhs, pts, sampler, random_tuples, acc);
      slow_check_bracket(alg, pw, pp, rhs, pts, sampler, random_tuples, acc);
      break;
    }
    case CalculusIdentity::GradedAntisymmetry: {
      KForm lhs = wedge_bracket(alg, inst.omega, inst.psi);
      KForm rev = wedge_bracket(alg, inst.psi, inst.omega);
      const int sign = (inst.omega.degree * inst.psi.degree) % 2 == 0 ? -1 : 1;
      KForm rhs = double(sign) * rev;
      compare_kforms(lhs, rhs, pts, sampler, random_tuples, acc);
      slow_check_bracket(alg, inst.omega, inst.psi, lhs, pts, sampler, random_tuples, acc);
      break;
    }
    case CalculusIdentity::GradedJacobi: {
      KForm lhs = wedge_bracket(alg, inst.omega, wedge_bracket(alg, inst.omega, inst.omega));
      KForm rhs(lhs.chart, lhs.fibre_dim, lhs.degree);
      compare_kforms(lhs, rhs, pts, sampler, random_tuples, acc);
      // independent fully slow evaluation of the triple bracket
      for (const auto& pt : pts) {
        FormValue vw = value_of(inst.omega, pt);
        const int deg = 3 * inst.omega.degree;
        if (multiindex::binomial(inst.N.dim, deg) == 0) continue;
        for (int t = 0; t < random_tuples; ++t) {
          auto vecs = random_tuple(inst.N.dim, deg, sampler);
          Eigen::VectorXd slow = slow_triple_bracket(alg, vw, vecs);
          for (int i = 0; i < slow.size(); ++i) acc.diff(slow[i]);
        }
      }
      break;
    }
    case CalculusIdentity::AdPullback: {
      EndForm lhs = ad_compose(alg, pullback_form(inst.X, inst.omega));
      EndForm rhs = pullback_end(inst.X, ad_compose(alg, inst.omega));
      compare_endforms(lhs, rhs, pts, sampler, random_tuples, acc);
      // value-level adjoint consistency on tuples
      KForm pulled = pullback_form(inst.X, inst.omega);
      for (const auto& pt : pts) {
        FormValue vw = value_of(pulled, pt), vl = value_of(lhs, pt);
        if (vl.comp.cols() == 0 || pulled.degree == 0) continue;
        for (int t = 0; t < random_tuples; ++t) {
          auto vecs = random_tuple(inst.M.dim, pulled.degree, sampler);
          Eigen::MatrixXd slow = ad_matrix(alg, apply_value(vw, vecs));
          Eigen::VectorXd fastv = apply_value(vl, vecs);
          for (int a = 0; a < alg.dim; ++a)
            for (int b = 0; b < alg.dim; ++b) acc.diff(slow(a, b) - fastv[a * alg.dim + b]);
        }
      }
      break;
    }
    case CalculusIdentity::LeibnizBracket: {
      require_compat(alg, inst.nabla, pts);
      KForm prod = wedge_bracket(alg, inst.omega, inst.psi);
      KForm lhs = ext_cov_deriv(inst.nabla, prod);
      KForm first = wedge_bracket(alg, ext_cov_deriv(inst.nabla, inst.omega), inst.psi);
      KForm second = wedge_bracket(alg, inst.omega, ext_cov_deriv(inst.nabla, inst.psi));
      KForm rhs = inst.omega.degree % 2 == 0 ? first + second : first - second;
      compare_kforms(lhs, rhs, pts, sampler, random_tuples, acc);
      slow_check_bracket(alg, inst.omega, inst.psi, prod, pts, sampler, random_tuples, acc);
      break;
    }
    case CalculusIdentity::AdCommutesDifferential: {
      require_compat(alg, inst.nabla, pts);
      EndForm lhs = ext_cov_deriv(inst.nabla, ad_compose(alg, inst.omega));
      EndForm rhs = ad_compose(alg, ext_cov_deriv(inst.nabla, inst.omega));
      compare_endforms(lhs, rhs, pts, sampler, random_tuples, acc);
      break;
    }
  }

  IdentityResult res;
  res.residual = acc.residual;
  res.reference = acc.reference;
  return res;
}

}  // namespace labgauge
