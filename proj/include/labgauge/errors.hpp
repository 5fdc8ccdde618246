#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace labgauge {

/// Base class of every error thrown by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- construction / validation -------------------------------------------

/// Structure constants are not antisymmetric in the last two slots.
struct AntisymmetryViolation : Error {
  int a = 0, b = 0, c = 0;     ///< worst offending triple (1-based)
  double magnitude = 0.0;      ///< |C[a][b][c] + C[a][c][b]| at the worst triple
  AntisymmetryViolation(const std::string& msg, int a_, int b_, int c_, double mag)
      : Error(msg), a(a_), b(b_), c(c_), magnitude(mag) {}
};

/// Structure constants fail the Jacobi identity.
struct JacobiViolation : Error {
  int a = 0, b = 0, c = 0, e = 0;  ///< worst (a,b,c) triple and output component e (1-based)
  double magnitude = 0.0;
  JacobiViolation(const std::string& msg, int a_, int b_, int c_, int e_, double mag)
      : Error(msg), a(a_), b(b_), c(c_), e(e_), magnitude(mag) {}
};

/// Vector, matrix, or index extent does not match the expected dimension.
struct DimensionMismatch : Error {
  using Error::Error;
};

/// A fibre metric is not symmetric positive definite (or has the wrong size).
struct MetricValidation : Error {
  using Error::Error;
};

/// Unknown named algebra tag.
struct UnknownAlgebraTag : Error {
  using Error::Error;
};

// ---- expression engine -----------------------------------------------------

/// Syntax error while parsing an expression string.
struct ParseError : Error {
  std::size_t offset = 0;                 ///< byte offset of the offending token
  std::vector<std::string> expected;      ///< tokens that would have been accepted
  ParseError(const std::string& msg, std::size_t off, std::vector<std::string> exp)
      : Error(msg), offset(off), expected(std::move(exp)) {}
};

/// Identifier that is neither a coordinate of the chart nor a known function.
struct UnknownIdentifier : Error {
  std::string name;
  std::size_t offset = 0;
  UnknownIdentifier(const std::string& msg, std::string name_, std::size_t off)
      : Error(msg), name(std::move(name_)), offset(off) {}
};

/// Evaluation hit a point outside the expression's domain (division by zero).
struct DomainError : Error {
  using Error::Error;
};

// ---- forms and charts ------------------------------------------------------

/// Two objects live over different charts (or the wrong chart was supplied).
struct ChartMismatch : Error {
  using Error::Error;
};

/// Two objects carry different fibre algebras.
struct AlgebraMismatch : Error {
  using Error::Error;
};

/// Component array shape does not match (degree, chart dim, fibre dim).
struct ShapeMismatch : Error {
  using Error::Error;
};

/// The two independent curvature computations disagree.
struct CurvatureMismatch : Error {
  double residual = 0.0;
  CurvatureMismatch(const std::string& msg, double res) : Error(msg), residual(res) {}
};

/// A stated hypothesis of the identity or construction fails on this input.
struct PreconditionFailed : Error {
  std::string hypothesis;   ///< which hypothesis broke, by name
  double residual = 0.0;    ///< measured violation
  PreconditionFailed(const std::string& msg, std::string hyp, double res)
      : Error(msg), hypothesis(std::move(hyp)), residual(res) {}
};

// ---- solving and obstruction machinery -------------------------------------

/// The right-hand side is not in the image of the adjoint map.
struct NotInAdjointImage : Error {
  double residual = 0.0;
  NotInAdjointImage(const std::string& msg, double res) : Error(msg), residual(res) {}
};

/// The input form is not closed, so no primitive can exist.
struct NotClosed : Error {
  double residual = 0.0;
  NotClosed(const std::string& msg, double res) : Error(msg), residual(res) {}
};

/// The homotopy-operator quadrature failed its internal accuracy gate.
struct QuadratureDegradation : Error {
  double residual = 0.0;
  QuadratureDegradation(const std::string& msg, double res) : Error(msg), residual(res) {}
};

/// The connection is not an inner (adjoint-valued) shift of the flat one.
struct NotInnerValued : Error {
  double residual = 0.0;
  NotInnerValued(const std::string& msg, double res) : Error(msg), residual(res) {}
};

/// The algebra has trivial centre, so the requested construction is empty.
struct NoCentre : Error {
  using Error::Error;
};

/// The target chart dimension is too small for the requested construction.
struct DimensionTooSmall : Error {
  using Error::Error;
};

// ---- scenario files --------------------------------------------------------

/// Scenario file does not exist or cannot be opened.
struct FileNotFound : Error {
  using Error::Error;
};

/// Structural problem in a scenario file (unknown key, wrong JSON type, ...).
struct SchemaError : Error {
  std::string path;   ///< JSON pointer to the offending element
  SchemaError(const std::string& msg, std::string path_) : Error(msg), path(std::move(path_)) {}
};

/// Semantic problem in a scenario file (inconsistent dims, bad signs, ...).
struct ValidationError : Error {
  std::string path;
  ValidationError(const std::string& msg, std::string path_ = "")
      : Error(msg), path(std::move(path_)) {}
};

}  // namespace labgauge
