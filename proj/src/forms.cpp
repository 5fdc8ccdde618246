#include "labgauge/forms.hpp"

#include <algorithm>
#include <map>

#include "labgauge/sampling.hpp"

namespace labgauge {

// ---------------------------------------------------------------------------
// multi-index utilities
// ---------------------------------------------------------------------------

namespace multiindex {

int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

const std::vector<std::vector<int>>& all(int n, int k) {
  static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
  auto key = std::make_pair(n, k);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<std::vector<int>> out;
  if (k >= 0 && k <= n) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      out.push_back(idx);
      int p = k - 1;
      while (p >= 0 && idx[p] == n - k + p) --p;
      if (p < 0) break;
      ++idx[p];
      for (int q = p + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
    }
    if (k == 0) out.assign(1, {});
  }
  return cache.emplace(key, std::move(out)).first->second;
}

int rank(int n, const std::vector<int>& I) {
  const int k = static_cast<int>(I.size());
  int r = 0;
  int prev = -1;
  for (int p = 0; p < k; ++p) {
    for (int v = prev + 1; v < I[p]; ++v) r += binomial(n - v - 1, k - p - 1);
    prev = I[p];
  }
  return r;
}

int sort_sign(std::vector<int>& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    int v = idx[i];
    std::size_t j = i;
    while (j > 0 && idx[j - 1] > v) {
      idx[j] = idx[j - 1];
      --j;
      sign = -sign;
    }
    idx[j] = v;
  }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return 0;
  return sign;
}

std::string to_string(const std::vector<int>& I, const Chart& chart) {
  if (I.empty()) return "1";
  std::string out;
  for (std::size_t p = 0; p < I.size(); ++p) {
    if (p) out += "^";
    out += "d" + chart.coordinate_names[I[p]];
  }
  return out;
}

std::vector<int> parse(const std::string& text, const Chart& chart) {
  if (text == "1") return {};
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t caret = text.find('^', pos);
    std::string piece = text.substr(pos, caret == std::string::npos ? std::string::npos : caret - pos);
    if (piece.size() < 2 || piece[0] != 'd')
      throw ValidationError("multi-index piece '" + piece + "' must look like d<coordinate>");
    int idx = chart.coordinate_index(piece.substr(1));
    if (idx < 0)
      throw ValidationError("multi-index piece '" + piece + "' names no coordinate of the chart");
    out.push_back(idx);
    if (caret == std::string::npos) break;
    pos = caret + 1;
  }
  return out;
}

}  // namespace multiindex

// ---------------------------------------------------------------------------
// containers
// ---------------------------------------------------------------------------

KForm::KForm(Chart chart_, int fibre_dim_, int degree_)
    : chart(std::move(chart_)), fibre_dim(fibre_dim_), degree(degree_) {
  if (fibre_dim_ < 0 || degree_ < 0) throw ShapeMismatch("form needs fibre_dim, degree >= 0");
  comp.assign(fibre_dim, std::vector<SmoothField>(ranks(), SmoothField(0.0)));
}

SmoothField KForm::component(int a, std::vector<int> indices) const {
  if (a < 0 || a >= fibre_dim) throw ShapeMismatch("fibre index out of range");
  if (static_cast<int>(indices.size()) != degree)
    throw ShapeMismatch("component access needs exactly degree-many indices");
  int sign = multiindex::sort_sign(indices);
  if (sign == 0) return SmoothField(0.0);
  for (int i : indices)
    if (i < 0 || i >= chart.dim) throw ShapeMismatch("coordinate index out of range");
  const SmoothField& f = comp[a][multiindex::rank(chart.dim, indices)];
  return sign > 0 ? f : -f;
}

Eigen::MatrixXd KForm::eval(const std::vector<double>& point) const {
  Eigen::MatrixXd M(fibre_dim, ranks());
  for (int a = 0; a < fibre_dim; ++a)
    for (int r = 0; r < ranks(); ++r) M(a, r) = comp[a][r].eval(point);
  return M;
}

bool KForm::is_zero() const {
  for (const auto& row : comp)
    for (const auto& f : row)
      if (!f.is_zero()) return false;
  return true;
}

namespace {

void require_same_shape(const KForm& a, const KForm& b) {
  if (!(a.chart == b.chart)) throw ChartMismatch("forms live on different charts");
  if (a.fibre_dim != b.fibre_dim) throw ShapeMismatch("forms have different fibre dimensions");
  if (a.degree != b.degree) throw ShapeMismatch("forms have different degrees");
}

void require_same_shape(const EndForm& a, const EndForm& b) {
  if (!(a.chart == b.chart)) throw ChartMismatch("forms live on different charts");
  if (a.fibre_dim != b.fibre_dim) throw ShapeMismatch("forms have different fibre dimensions");
  if (a.degree != b.degree) throw ShapeMismatch("forms have different degrees");
}

}  // namespace

KForm& KForm::operator+=(const KForm& o) {
  require_same_shape(*this, o);
  for (int a = 0; a < fibre_dim; ++a)
    for (int r = 0; r < ranks(); ++r) comp[a][r] += o.comp[a][r];
  return *this;
}

KForm& KForm::operator-=(const KForm& o) {
  require_same_shape(*this, o);
  for (int a = 0; a < fibre_dim; ++a)
    for (int r = 0; r < ranks(); ++r) comp[a][r] -= o.comp[a][r];
  return *this;
}

KForm operator*(const SmoothField& s, KForm w) {
  for (auto& row : w.comp)
    for (auto& f : row) f = s * f;
  return w;
}

KForm operator*(double s, KForm w) { return SmoothField(s) * std::move(w); }

KForm operator-(KForm w) {
  for (auto& row : w.comp)
    for (auto& f : row) f = -f;
  return w;
}

EndForm::EndForm(Chart chart_, int fibre_dim_, int degree_)
    : chart(std::move(chart_)), fibre_dim(fibre_dim_), degree(degree_) {
  if (fibre_dim_ < 0 || degree_ < 0) throw ShapeMismatch("form needs fibre_dim, degree >= 0");
  comp.assign(fibre_dim,
              std::vector<std::vector<SmoothField>>(fibre_dim, std::vector<SmoothField>(ranks(), SmoothField(0.0))));
}

Eigen::MatrixXd EndForm::eval(const std::vector<double>& point) const {
  Eigen::MatrixXd M(fibre_dim * fibre_dim, ranks());
  for (int a = 0; a < fibre_dim; ++a)
    for (int b = 0; b < fibre_dim; ++b)
      for (int r = 0; r < ranks(); ++r) M(a * fibre_dim + b, r) = comp[a][b][r].eval(point);
  return M;
}

EndForm& EndForm::operator+=(const EndForm& o) {
  require_same_shape(*this, o);
  for (int a = 0; a < fibre_dim; ++a)
    for (int b = 0; b < fibre_dim; ++b)
      for (int r = 0; r < ranks(); ++r) comp[a][b][r] += o.comp[a][b][r];
  return *this;
}

EndForm& EndForm::operator-=(const EndForm& o) {
  require_same_shape(*this, o);
  for (int a = 0; a < fibre_dim; ++a)
    for (int b = 0; b < fibre_dim; ++b)
      for (int r = 0; r < ranks(); ++r) comp[a][b][r] -= o.comp[a][b][r];
  return *this;
}

EndForm operator*(double s, EndForm w) {
  SmoothField f(s);
  for (auto& m : w.comp)
    for (auto& row : m)
      for (auto& e : row) e = f * e;
  return w;
}

Connection::Connection(Chart chart_, int fibre_dim_) : chart(std::move(chart_)), fibre_dim(fibre_dim_) {
  gamma.assign(fibre_dim,
               std::vector<std::vector<SmoothField>>(fibre_dim, std::vector<SmoothField>(chart.dim, SmoothField(0.0))));
}

bool Connection::is_flat() const {
  for (const auto& m : gamma)
    for (const auto& row : m)
      for (const auto& e : row)
        if (!e.is_zero()) return false;
  return true;
}

SmoothMap::SmoothMap(Chart source_, Chart target_, std::vector<SmoothField> comp_)
    : source(std::move(source_)), target(std::move(target_)), comp(std::move(comp_)) {
  if (static_cast<int>(comp.size()) != target.dim)
    throw DimensionMismatch("map into a " + std::to_string(target.dim) +
                            "-dimensional chart needs that many components, got " +
                            std::to_string(comp.size()));
  dcomp.assign(target.dim, std::vector<SmoothField>(source.dim, SmoothField(0.0)));
  for (int j = 0; j < target.dim; ++j)
    for (int mu = 0; mu < source.dim; ++mu) dcomp[j][mu] = comp[j].derivative(mu);
}

SmoothField SmoothMap::pull_function(const SmoothField& f) const { return f.substitute(comp); }

std::vector<double> SmoothMap::image(const std::vector<double>& point) const {
  std::vector<double> out(target.dim);
  for (int j = 0; j < target.dim; ++j) out[j] = comp[j].eval(point);
  return out;
}

// ---------------------------------------------------------------------------
// scalar-component helpers
// ---------------------------------------------------------------------------

namespace {

/// wedge of scalar rank arrays of degrees k and l over n coordinates
std::vector<SmoothField> wedge_scalar(int n, int k, const std::vector<SmoothField>& f,
                                      int l, const std::vector<SmoothField>& g) {
  const auto& I = multiindex::all(n, k);
  const auto& J = multiindex::all(n, l);
  std::vector<SmoothField> out(multiindex::binomial(n, k + l), SmoothField(0.0));
  if (out.empty()) return out;
  for (std::size_t ri = 0; ri < I.size(); ++ri) {
    if (f[ri].is_zero()) continue;
    for (std::size_t rj = 0; rj < J.size(); ++rj) {
      if (g[rj].is_zero()) continue;
      std::vector<int> merged;
      merged.reserve(k + l);
      merged.insert(merged.end(), I[ri].begin(), I[ri].end());
      merged.insert(merged.end(), J[rj].begin(), J[rj].end());
      int sign = multiindex::sort_sign(merged);
      if (sign == 0) continue;
      SmoothField term = f[ri] * g[rj];
      out[multiindex::rank(n, merged)] += sign > 0 ? term : -term;
    }
  }
  return out;
}

/// componentwise exterior derivative of a scalar rank array
std::vector<SmoothField> d_scalar(int n, int k, const std::vector<SmoothField>& f) {
  const auto& I = multiindex::all(n, k);
  std::vector<SmoothField> out(multiindex::binomial(n, k + 1), SmoothField(0.0));
  if (out.empty()) return out;
  for (std::size_t r = 0; r < I.size(); ++r) {
    if (f[r].is_zero()) continue;
    for (int i = 0; i < n; ++i) {
      SmoothField df = f[r].derivative(i);
      if (df.is_zero()) continue;
      std::vector<int> merged;
      merged.reserve(k + 1);
      merged.push_back(i);
      merged.insert(merged.end(), I[r].begin(), I[r].end());
      int sign = multiindex::sort_sign(merged);
      if (sign == 0) continue;
      out[multiindex::rank(n, merged)] += sign > 0 ? df : -df;
    }
  }
  return out;
}

/// determinant of a small matrix of fields by cofactor expansion
SmoothField field_det(const std::vector<std::vector<SmoothField>>& m) {
  const std::size_t l = m.size();
  if (l == 0) return SmoothField(1.0);
  if (l == 1) return m[0][0];
  SmoothField out(0.0);
  for (std::size_t c = 0; c < l; ++c) {
    if (m[0][c].is_zero()) continue;
    std::vector<std::vector<SmoothField>> sub(l - 1, std::vector<SmoothField>(l - 1, SmoothField(0.0)));
    for (std::size_t r = 1; r < l; ++r) {
      std::size_t cc = 0;
      for (std::size_t c2 = 0; c2 < l; ++c2) {
        if (c2 == c) continue;
        sub[r - 1][cc++] = m[r][c2];
      }
    }
    SmoothField term = m[0][c] * field_det(sub);
    out += (c % 2 == 0) ? term : -term;
  }
  return out;
}

/// degree-1 rank array view of the connection entry (b,a)
std::vector<SmoothField> gamma_one_form(const Connection& nb, int b, int a) {
  return nb.gamma[b][a];
}

}  // namespace

// ---------------------------------------------------------------------------
// operations
// ---------------------------------------------------------------------------

KForm exterior_derivative(const KForm& w) {
  KForm out(w.chart, w.fibre_dim, w.degree + 1);
  for (int a = 0; a < w.fibre_dim; ++a) out.comp[a] = d_scalar(w.chart.dim, w.degree, w.comp[a]);
  return out;
}

KForm wedge_bracket(const LieAlgebra& alg, const KForm& w, const KForm& psi) {
  if (!(w.chart == psi.chart)) throw ChartMismatch("bracket factors live on different charts");
  if (w.fibre_dim != alg.dim || psi.fibre_dim != alg.dim)
    throw AlgebraMismatch("bracket factors must have the algebra's fibre dimension");
  KForm out(w.chart, alg.dim, w.degree + psi.degree);
  const int n = w.chart.dim;
  for (int a = 0; a < alg.dim; ++a)
    for (int b = 0; b < alg.dim; ++b)
      for (int c = 0; c < alg.dim; ++c) {
        const double C = alg.C[a](b, c);
        if (C == 0.0) continue;
        auto term = wedge_scalar(n, w.degree, w.comp[b], psi.degree, psi.comp[c]);
        for (std::size_t r = 0; r < term.size(); ++r)
          out.comp[a][r] += SmoothField(C) * term[r];
      }
  return out;
}

KForm wedge_end(const EndForm& T, const KForm& w) {
  if (!(T.chart == w.chart)) throw ChartMismatch("endomorphism and form live on different charts");
  if (T.fibre_dim != w.fibre_dim) throw ShapeMismatch("endomorphism and form fibre dimensions differ");
  KForm out(w.chart, w.fibre_dim, T.degree + w.degree);
  const int n = w.chart.dim;
  for (int a = 0; a < w.fibre_dim; ++a)
    for (int b = 0; b < w.fibre_dim; ++b) {
      auto term = wedge_scalar(n, T.degree, T.comp[a][b], w.degree, w.comp[b]);
      for (std::size_t r = 0; r < term.size(); ++r) out.comp[a][r] += term[r];
    }
  return out;
}

EndForm wedge_end_end(const EndForm& T, const EndForm& S) {
  if (!(T.chart == S.chart)) throw ChartMismatch("endomorphism forms live on different charts");
  if (T.fibre_dim != S.fibre_dim) throw ShapeMismatch("endomorphism fibre dimensions differ");
  EndForm out(T.chart, T.fibre_dim, T.degree + S.degree);
  const int n = T.chart.dim;
  for (int a = 0; a < T.fibre_dim; ++a)
    for (int b = 0; b < T.fibre_dim; ++b)
      for (int c = 0; c < T.fibre_dim; ++c) {
        auto term = wedge_scalar(n, T.degree, T.comp[a][c], S.degree, S.comp[c][b]);
        for (std::size_t r = 0; r < term.size(); ++r) out.comp[a][b][r] += term[r];
      }
  return out;
}

EndForm ad_compose(const LieAlgebra& alg, const KForm& lambda) {
  if (lambda.fibre_dim != alg.dim)
    throw AlgebraMismatch("ad composition needs a form with the algebra's fibre dimension");
  EndForm out(lambda.chart, alg.dim, lambda.degree);
  for (int a = 0; a < alg.dim; ++a)
    for (int b = 0; b < alg.dim; ++b)
      for (int c = 0; c < alg.dim; ++c) {
        const double C = alg.C[a](c, b);
        if (C == 0.0) continue;
        for (int r = 0; r < lambda.ranks(); ++r)
          out.comp[a][b][r] += SmoothField(C) * lambda.comp[c][r];
      }
  return out;
}

KForm metric_pair(const Eigen::MatrixXd& kappa, const KForm& w, const KForm& psi) {
  if (!(w.chart == psi.chart)) throw ChartMismatch("pairing factors live on different charts");
  if (kappa.rows() != w.fibre_dim || kappa.cols() != psi.fibre_dim)
    throw DimensionMismatch("metric shape does not match the fibre dimensions");
  KForm out(w.chart, 1, w.degree + psi.degree);
  const int n = w.chart.dim;
  for (int a = 0; a < w.fibre_dim; ++a)
    for (int b = 0; b < psi.fibre_dim; ++b) {
      if (kappa(a, b) == 0.0) continue;
      auto term = wedge_scalar(n, w.degree, w.comp[a], psi.degree, psi.comp[b]);
      for (std::size_t r = 0; r < term.size(); ++r)
        out.comp[0][r] += SmoothField(kappa(a, b)) * term[r];
    }
  return out;
}

KForm ext_cov_deriv(const Connection& nabla, const KForm& w) {
  if (!(nabla.chart == w.chart)) throw ChartMismatch("connection and form live on different charts");
  if (nabla.fibre_dim != w.fibre_dim) throw ShapeMismatch("connection and form fibre dimensions differ");
  KForm out = exterior_derivative(w);
  if (nabla.is_flat()) return out;
  const int n = w.chart.dim;
  const int sgn = (w.degree % 2 == 0) ? 1 : -1;
  for (int b = 0; b < w.fibre_dim; ++b)
    for (int a = 0; a < w.fibre_dim; ++a) {
      auto term = wedge_scalar(n, w.degree, w.comp[a], 1, gamma_one_form(nabla, b, a));
      for (std::size_t r = 0; r < term.size(); ++r)
        out.comp[b][r] += sgn > 0 ? term[r] : -term[r];
    }
  return out;
}

EndForm ext_cov_deriv(const Connection& nabla, const EndForm& T) {
  if (!(nabla.chart == T.chart)) throw ChartMismatch("connection and form live on different charts");
  if (nabla.fibre_dim != T.fibre_dim) throw ShapeMismatch("connection and form fibre dimensions differ");
  EndForm out(T.chart, T.fibre_dim, T.degree + 1);
  const int n = T.chart.dim;
  const int sgn = (T.degree % 2 == 0) ? 1 : -1;
  for (int c = 0; c < T.fibre_dim; ++c)
    for (int a = 0; a < T.fibre_dim; ++a) {
      out.comp[c][a] = d_scalar(n, T.degree, T.comp[c][a]);
      if (nabla.is_flat()) continue;
      for (int b = 0; b < T.fibre_dim; ++b) {
        auto plus = wedge_scalar(n, T.degree, T.comp[b][a], 1, gamma_one_form(nabla, c, b));
        auto minus = wedge_scalar(n, T.degree, T.comp[c][b], 1, gamma_one_form(nabla, b, a));
        for (std::size_t r = 0; r < plus.size(); ++r) {
          SmoothField delta = plus[r] - minus[r];
          out.comp[c][a][r] += sgn > 0 ? delta : -delta;
        }
      }
    }
  return out;
}

Connection shift_connection(const Connection& nabla, const EndForm& D) {
  if (!(nabla.chart == D.chart)) throw ChartMismatch("connection and shift live on different charts");
  if (nabla.fibre_dim != D.fibre_dim) throw ShapeMismatch("connection and shift fibre dimensions differ");
  if (D.degree != 1) throw ShapeMismatch("a connection shift must be a 1-form");
  Connection out = nabla;
  for (int b = 0; b < nabla.fibre_dim; ++b)
    for (int a = 0; a < nabla.fibre_dim; ++a)
      for (int i = 0; i < nabla.chart.dim; ++i) out.gamma[b][a][i] += D.comp[b][a][i];
  return out;
}

EndForm curvature(const Connection& nabla, int check_points, std::uint64_t seed) {
  const int n = nabla.chart.dim;
  const int fd = nabla.fibre_dim;

  // route 1: matrix formula dGamma + Gamma ^ Gamma
  EndForm R(nabla.chart, fd, 2);
  for (int b = 0; b < fd; ++b)
    for (int a = 0; a < fd; ++a) {
      R.comp[b][a] = d_scalar(n, 1, gamma_one_form(nabla, b, a));
      for (int c = 0; c < fd; ++c) {
        auto term = wedge_scalar(n, 1, gamma_one_form(nabla, b, c), 1, gamma_one_form(nabla, c, a));
        for (std::size_t r = 0; r < term.size(); ++r) R.comp[b][a][r] += term[r];
      }
    }

  // route 2: (d^nabla)^2 on the frame sections
  EndForm R2(nabla.chart, fd, 2);
  for (int a = 0; a < fd; ++a) {
    KForm frame(nabla.chart, fd, 0);
    frame.comp[a][0] = SmoothField(1.0);
    KForm second = ext_cov_deriv(nabla, ext_cov_deriv(nabla, frame));
    for (int b = 0; b < fd; ++b) R2.comp[b][a] = second.comp[b];
  }

  Sampler sampler(seed);
  std::vector<std::vector<double>> pts;
  pts.reserve(check_points);
  for (int i = 0; i < check_points; ++i) pts.push_back(sampler.point(nabla.chart));
  const double mag = std::max(max_abs(R, pts), max_abs(R2, pts));
  const double diff = max_abs_diff(R, R2, pts);
  if (diff > 1e-10 * (1.0 + mag))
    throw CurvatureMismatch("the matrix-formula curvature and the squared covariant derivative "
                            "disagree by " + std::to_string(diff),
                            diff);
  return R;
}

KForm pullback_form(const SmoothMap& X, const KForm& w) {
  if (!(w.chart == X.target)) throw ChartMismatch("form does not live on the map's target chart");
  const int m = X.source.dim;
  const int n = X.target.dim;
  const int l = w.degree;
  KForm out(X.source, w.fibre_dim, l);
  if (out.ranks() == 0) return out;
  const auto& SRC = multiindex::all(m, l);
  const auto& TGT = multiindex::all(n, l);
  for (std::size_t rj = 0; rj < TGT.size(); ++rj) {
    bool any = false;
    for (int a = 0; a < w.fibre_dim && !any; ++a) any = !w.comp[a][rj].is_zero();
    if (!any) continue;
    // minor determinants det(DX[J, K]) for every source multi-index K
    std::vector<SmoothField> dets(SRC.size(), SmoothField(0.0));
    for (std::size_t rk = 0; rk < SRC.size(); ++rk) {
      std::vector<std::vector<SmoothField>> minor(l, std::vector<SmoothField>(l, SmoothField(0.0)));
      for (int r = 0; r < l; ++r)
        for (int s = 0; s < l; ++s) minor[r][s] = X.differential(TGT[rj][r], SRC[rk][s]);
      dets[rk] = field_det(minor);
    }
    for (int a = 0; a < w.fibre_dim; ++a) {
      if (w.comp[a][rj].is_zero()) continue;
      SmoothField pulled = X.pull_function(w.comp[a][rj]);
      for (std::size_t rk = 0; rk < SRC.size(); ++rk) {
        if (dets[rk].is_zero()) continue;
        out.comp[a][rk] += pulled * dets[rk];
      }
    }
  }
  return out;
}

EndForm pullback_end(const SmoothMap& X, const EndForm& T) {
  EndForm out(X.source, T.fibre_dim, T.degree);
  for (int b = 0; b < T.fibre_dim; ++b) {
    // reuse the fibre-valued pullback on each endomorphism column
    KForm column(T.chart, T.fibre_dim, T.degree);
    for (int a = 0; a < T.fibre_dim; ++a) column.comp[a] = T.comp[a][b];
    KForm pulled = pullback_form(X, column);
    for (int a = 0; a < T.fibre_dim; ++a) out.comp[a][b] = pulled.comp[a];
  }
  return out;
}

Connection pullback_connection(const SmoothMap& X, const Connection& nabla) {
  if (!(nabla.chart == X.target)) throw ChartMismatch("connection does not live on the map's target chart");
  Connection out(X.source, nabla.fibre_dim);
  for (int b = 0; b < nabla.fibre_dim; ++b)
    for (int a = 0; a < nabla.fibre_dim; ++a)
      for (int mu = 0; mu < X.source.dim; ++mu) {
        SmoothField sum(0.0);
        for (int i = 0; i < X.target.dim; ++i) {
          if (nabla.gamma[b][a][i].is_zero() || X.differential(i, mu).is_zero()) continue;
          sum += X.pull_function(nabla.gamma[b][a][i]) * X.differential(i, mu);
        }
        out.gamma[b][a][mu] = sum;
      }
  return out;
}

KForm hodge_star(const std::vector<int>& metric_signs, const KForm& w) {
  const int n = w.chart.dim;
  const int k = w.degree;
  if (static_cast<int>(metric_signs.size()) != n)
    throw DimensionMismatch("hodge star needs one metric sign per coordinate");
  for (int s : metric_signs)
    if (s != 1 && s != -1) throw MetricValidation("hodge star metric signs must be +1 or -1");
  if (k > n)
    throw ShapeMismatch("hodge star input degree exceeds the chart dimension");
  KForm out(w.chart, w.fibre_dim, n - k);
  const auto& I = multiindex::all(n, k);
  for (std::size_t r = 0; r < I.size(); ++r) {
    // complement and permutation sign of (I, I^c) against (0..n-1)
    std::vector<bool> in(n, false);
    for (int i : I[r]) in[i] = true;
    std::vector<int> merged(I[r]);
    for (int i = 0; i < n; ++i)
      if (!in[i]) merged.push_back(i);
    std::vector<int> complement(merged.begin() + k, merged.end());
    int sign = multiindex::sort_sign(merged);
    double factor = sign;
    for (int i : I[r]) factor *= metric_signs[i];
    const int rc = multiindex::rank(n, complement);
    for (int a = 0; a < w.fibre_dim; ++a)
      out.comp[a][rc] = SmoothField(factor) * w.comp[a][r];
  }
  return out;
}

double compat_bracket_residual(const LieAlgebra& alg, const Connection& nabla,
                               const std::vector<std::vector<double>>& points) {
  const int n = alg.dim;
  if (nabla.fibre_dim != n) throw AlgebraMismatch("connection fibre dimension differs from the algebra");
  double worst = 0.0;
  for (const auto& pt : points) {
    // evaluate gamma at the point once
    std::vector<Eigen::MatrixXd> G(nabla.chart.dim, Eigen::MatrixXd(n, n));
    for (int i = 0; i < nabla.chart.dim; ++i)
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) G[i](b, a) = nabla.gamma[b][a][i].eval(pt);
    for (int i = 0; i < nabla.chart.dim; ++i)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) {
            double v = 0.0;
            for (int d = 0; d < n; ++d)
              v += alg.C[d](b, c) * G[i](a, d) -
                   G[i](d, b) * alg.C[a](d, c) -
                   G[i](d, c) * alg.C[a](b, d);
            worst = std::max(worst, std::abs(v));
          }
  }
  return worst;
}

double max_abs(const KForm& w, const std::vector<std::vector<double>>& points) {
  double m = 0.0;
  for (const auto& pt : points) {
    const Eigen::MatrixXd v = w.eval(pt);
    if (v.size() > 0) m = std::max(m, v.cwiseAbs().maxCoeff());
  }
  return m;
}

double max_abs(const EndForm& w, const std::vector<std::vector<double>>& points) {
  double m = 0.0;
  for (const auto& pt : points) {
    const Eigen::MatrixXd v = w.eval(pt);
    if (v.size() > 0) m = std::max(m, v.cwiseAbs().maxCoeff());
  }
  return m;
}

double max_abs_diff(const KForm& a, const KForm& b, const std::vector<std::vector<double>>& points) {
  require_same_shape(a, b);
  double m = 0.0;
  for (const auto& pt : points) {
    const Eigen::MatrixXd va = a.eval(pt), vb = b.eval(pt);
    if (va.size() > 0) m = std::max(m, (va - vb).cwiseAbs().maxCoeff());
  }
  return m;
}

double max_abs_diff(const EndForm& a, const EndForm& b, const std::vector<std::vector<double>>& points) {
  require_same_shape(a, b);
  double m = 0.0;
  for (const auto& pt : points) {
    const Eigen::MatrixXd va = a.eval(pt), vb = b.eval(pt);
    if (va.size() > 0) m = std::max(m, (va - vb).cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace labgauge
