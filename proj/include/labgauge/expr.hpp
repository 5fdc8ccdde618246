#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "labgauge/errors.hpp"

namespace labgauge {

/// A coordinate chart: a dimension, coordinate names, and an optional box
/// the expressions are meant to be sampled on.
///
/// Default names are "x1".."xn".  Charts of dimension <= 4 that keep the
/// default names additionally accept the aliases "x","y","z","t" for the
/// first four coordinates when parsing expressions.
struct Chart {
  int dim = 0;
  std::vector<std::string> coordinate_names;
  /// Optional sampling box, one (lo, hi) pair per coordinate.
  std::optional<std::vector<std::pair<double, double>>> domain_hint;

  Chart() = default;
  explicit Chart(int dim_);
  Chart(int dim_, std::vector<std::string> names);

  /// Index of a coordinate name, alias-aware; -1 when unknown.
  int coordinate_index(const std::string& name) const;

  /// True when the chart still carries the default names "x1".."xn".
  bool has_default_names() const;

  /// True when the sampling box (explicit or default [-1,1]^dim) contains the
  /// origin, i.e. the chart domain is star-shaped about 0.
  bool star_shaped_about_origin() const;

  bool operator==(const Chart& o) const {
    return dim == o.dim && coordinate_names == o.coordinate_names;
  }
};

namespace detail {
enum class ExprOp : std::uint8_t { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };

struct ExprNode;
using ExprNodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprOp op;
  double value = 0.0;       // Const
  int var = -1;             // Var
  int exponent = 0;         // Pow
  ExprNodePtr a, b;         // children
  std::uint32_t tree_size = 1;  // saturating size of the fully expanded tree
};
}  // namespace detail

/// Immutable scalar field on a chart: an expression tree over the grammar
/// {+, -, *, /, integer power, sin, cos, exp, numeric literals, coordinates}.
///
/// The grammar is closed under differentiation, so derivatives of any order
/// are exact (no truncation).  Value semantics; copies share structure.
class SmoothField {
 public:
  SmoothField() : SmoothField(0.0) {}
  explicit SmoothField(double constant);

  /// Coordinate field x_i (0-based index).
  static SmoothField coordinate(int index);

  // -- algebra (light normalization only: constant folding, 0/1 absorption) --
  friend SmoothField operator+(const SmoothField& f, const SmoothField& g);
  friend SmoothField operator-(const SmoothField& f, const SmoothField& g);
  friend SmoothField operator*(const SmoothField& f, const SmoothField& g);
  friend SmoothField operator/(const SmoothField& f, const SmoothField& g);
  friend SmoothField operator-(const SmoothField& f);
  SmoothField pow(int exponent) const;
  static SmoothField sin(const SmoothField& f);
  static SmoothField cos(const SmoothField& f);
  static SmoothField exp(const SmoothField& f);

  SmoothField& operator+=(const SmoothField& g) { return *this = *this + g; }
  SmoothField& operator-=(const SmoothField& g) { return *this = *this - g; }
  SmoothField& operator*=(const SmoothField& g) { return *this = *this * g; }

  /// Evaluate at a point (throws DomainError on division by zero,
  /// DimensionMismatch when the point has fewer coordinates than used).
  double eval(const std::vector<double>& point) const;

  /// Exact partial derivative with respect to coordinate `index`.
  SmoothField derivative(int index) const;

  /// Substitute coordinate i by `replacement[i]` (composition with a map).
  SmoothField substitute(const std::vector<SmoothField>& replacement) const;

  /// Substitute x_i -> scale * x_i for every coordinate (used by the
  /// homotopy operator's radial integral).
  SmoothField scale_coordinates(double scale, int dim) const;

  /// True when the node is the literal 0 (cheap syntactic test).
  bool is_zero() const;
  /// True when the node is a literal constant; value returned through `out`.
  bool is_constant(double* out = nullptr) const;

  /// Largest coordinate index used, plus one (0 for constants).
  int min_dim() const;

  /// Render as a string parseable by parse_expr on the same chart.
  std::string to_string(const Chart& chart) const;

  const detail::ExprNodePtr& node() const { return node_; }
  explicit SmoothField(detail::ExprNodePtr n) : node_(std::move(n)) {}

 private:
  detail::ExprNodePtr node_;
};

/// Parse an expression string over the chart's coordinates.
/// Throws ParseError (with byte offset and the set of acceptable tokens) or
/// UnknownIdentifier (with the name and offset).
SmoothField parse_expr(const std::string& text, const Chart& chart);

/// Central finite difference oracle: (f(p + h e_i) - f(p - h e_i)) / 2h.
double fd_oracle(const SmoothField& f, int index, std::vector<double> point, double h = 1e-5);

}  // namespace labgauge
