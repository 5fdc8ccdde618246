#include "labgauge/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace labgauge {

FormValue value_of(const KForm& w, const std::vector<double>& point) {
  FormValue v;
  v.n = w.chart.dim;
  v.fibre_dim = w.fibre_dim;
  v.degree = w.degree;
  v.comp = w.eval(point);
  return v;
}

FormValue value_of(const EndForm& T, const std::vector<double>& point) {
  FormValue v;
  v.n = T.chart.dim;
  v.fibre_dim = T.fibre_dim * T.fibre_dim;
  v.degree = T.degree;
  v.comp = T.eval(point);
  return v;
}

Eigen::VectorXd apply_value(const FormValue& v, const std::vector<Eigen::VectorXd>& vectors) {
  if (static_cast<int>(vectors.size()) != v.degree)
    throw ShapeMismatch("a degree-" + std::to_string(v.degree) + " value needs exactly " +
                        std::to_string(v.degree) + " tangent vectors");
  const auto& I = multiindex::all(v.n, v.degree);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.fibre_dim);
  for (std::size_t r = 0; r < I.size(); ++r) {
    Eigen::MatrixXd minor(v.degree, v.degree);
    for (int row = 0; row < v.degree; ++row)
      for (int col = 0; col < v.degree; ++col) minor(row, col) = vectors[col][I[r][row]];
    const double det = v.degree == 0 ? 1.0 : minor.determinant();
    out += det * v.comp.col(r);
  }
  return out;
}

namespace {

int permutation_sign(const std::vector<int>& p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) sign = -sign;
  return sign;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

Eigen::VectorXd slow_graded_product(
    const FormValue& alpha, const FormValue& beta,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>& F,
    const std::vector<Eigen::VectorXd>& vectors) {
  const int k = alpha.degree, l = beta.degree;
  if (static_cast<int>(vectors.size()) != k + l)
    throw ShapeMismatch("graded product of degrees " + std::to_string(k) + " and " +
                        std::to_string(l) + " needs " + std::to_string(k + l) + " vectors");
  std::vector<int> perm(k + l);
  std::iota(perm.begin(), perm.end(), 0);
  Eigen::VectorXd out;
  bool first = true;
  do {
    const int sign = permutation_sign(perm);
    std::vector<Eigen::VectorXd> left(k), right(l);
    for (int i = 0; i < k; ++i) left[i] = vectors[perm[i]];
    for (int i = 0; i < l; ++i) right[i] = vectors[perm[k + i]];
    Eigen::VectorXd term = F(apply_value(alpha, left), apply_value(beta, right));
    if (first) {
      out = sign * term;
      first = false;
    } else {
      out += sign * term;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  out /= factorial(k) * factorial(l);
  return out;
}

}  // namespace labgauge
