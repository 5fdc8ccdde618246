#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "labgauge/forms.hpp"

namespace labgauge {

/// Numeric value of a fibre-valued k-form at one point: the coefficient
/// matrix (fibre x ranks).  Endomorphism values are stored with the fibre
/// index flattened to a*dim+b.
struct FormValue {
  int n = 0;          ///< chart dimension
  int fibre_dim = 0;  ///< rows of comp
  int degree = 0;
  Eigen::MatrixXd comp;
};

FormValue value_of(const KForm& w, const std::vector<double>& point);
FormValue value_of(const EndForm& T, const std::vector<double>& point);

/// Apply the value to degree-many tangent vectors by the minor-determinant
/// expansion (the fast route through stored components).
Eigen::VectorXd apply_value(const FormValue& v, const std::vector<Eigen::VectorXd>& vectors);

/// The graded product of two form values through a bilinear combiner F,
/// evaluated by the definition: antisymmetrization over all permutations,
///   (alpha ^F beta)(Y_1..Y_{k+l})
///     = 1/(k! l!) sum_{sigma in S_{k+l}} sgn(sigma)
///         F(alpha(Y_sigma(1..k)), beta(Y_sigma(k+1..k+l))).
/// Deliberately slow and definition-shaped: this is the independent oracle
/// the coordinate formulas are checked against.
Eigen::VectorXd slow_graded_product(
    const FormValue& alpha, const FormValue& beta,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>& F,
    const std::vector<Eigen::VectorXd>& vectors);

}  // namespace labgauge
