#pragma once

#include <vector>

#include "susysep/field.hpp"
#include "susysep/grid.hpp"

namespace susysep {

/// g11 d1^2 + g22 d2^2 + c1 d1 + c2 d2 + b with constant principal part.
///
/// Coefficients are AnalyticFields; an empty field stands for an identically
/// zero coefficient. `singular` marks points where the coefficients are not
/// defined (the operator is never applied there).
struct DifferentialOperator2D {
  double g11 = 0.0;
  double g22 = 0.0;
  AnalyticField c1;
  AnalyticField c2;
  AnalyticField b;
  AnalyticField::Predicate singular;

  bool has_first_order() const { return static_cast<bool>(c1) || static_cast<bool>(c2); }
  bool is_singular_at(double x1, double x2) const { return singular && singular(x1, x2); }
};

/// Operators applied right to left: ops.back() acts first.
struct OperatorChain {
  std::vector<DifferentialOperator2D> ops;
};

/// Throws Error{SingularPoint} on the singular set, Error{MissingDerivative}
/// if the field supplies fewer than two derivative orders.
double apply_analytic(const DifferentialOperator2D& op, const AnalyticField& field, double x1,
                      double x2);

/// apply_analytic at every node of `grid`; nodes on the singular set of the
/// operator or the field are left invalid.
SampledField apply_pointwise(const DifferentialOperator2D& op, const AnalyticField& field,
                             const Grid2D& grid);

/// Formal L2 adjoint: c_i -> -c_i, b -> b - d1 c1 - d2 c2.
/// Throws Error{MissingDerivative} if a first-order coefficient has no derivatives.
DifferentialOperator2D adjoint(const DifferentialOperator2D& op);

/// Second-order central differences. Second derivatives use the axis
/// stencil; first derivatives combine the two diagonal differences
/// (f(i+1,j+1) - f(i-1,j-1)) and (f(i+1,j-1) - f(i-1,j+1)). A node is valid in the
/// output iff it is off the singular set, off the outer rim, and every stencil
/// neighbour is valid in the input.
/// Throws Error{GridTooCoarse} for fewer than five nodes per axis.
SampledField apply_grid(const DifferentialOperator2D& op, const SampledField& field);

/// Sequential apply_grid. Throws Error{InvalidParameter} for an empty chain and
/// Error{GridTooCoarse} if fewer than `min_valid_fraction` of the input's valid
/// nodes survive.
SampledField apply_chain(const OperatorChain& chain, const SampledField& field,
                         double min_valid_fraction = 0.8);

}  // namespace susysep
