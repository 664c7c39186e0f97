#pragma once

#include "susysep/field.hpp"
#include "susysep/operators.hpp"
#include "susysep/special1d.hpp"

namespace susysep {

/// Partner index: H0 carries the coefficient a(2a - 1) in front of the
/// sinh^-2 barrier, H1 carries a(2a + 1).
enum class Branch { H0 = 0, H1 = 1 };

enum class Sign { Plus, Minus };

/// Couplings of the two-dimensional generalized Morse model.
struct ModelParams {
  MorseParams morse;
  double a = 0.0;

  /// Throws Error{InvalidParameter} for A <= 0, alpha <= 0 or non-finite a.
  static ModelParams make(double A, double alpha, double a);

  double alpha() const { return morse.alpha; }

  /// a < -1/4 - 1/(4 sqrt 2): zero modes of Q+ can be normalizable.
  bool qes_admissible() const;
  /// a > 1/4 + 1/(4 sqrt 2): normalizable zero modes of Q- can exist.
  bool qminus_zero_mode_window() const;

  /// alpha^2 a (2a -+ 1), the strength of the sinh^-2(alpha x_- / 2) term.
  double barrier_coefficient(Branch branch) const;
  /// Constant 4 a^2 alpha^2 contained in both partner potentials.
  double energy_offset() const;
};

/// Upper end of the admissible window, -1/4 - 1/(4 sqrt 2).
double qes_window_edge();
/// Lower end of the Q- zero-mode window, 1/4 + 1/(4 sqrt 2).
double qminus_window_edge();

/// Coordinates closer to the diagonal than this count as singular.
inline constexpr double kDiagonalGuard = 1e-12;

bool on_diagonal(double x1, double x2);

/// Partner potential V^(0) or V^(1) with analytic derivatives to order two.
/// Evaluation on the diagonal throws Error{SingularPoint} when the barrier
/// coefficient is nonzero.
AnalyticField potential(Branch branch, const ModelParams& params);

bool is_singular_on_diagonal(Branch branch, const ModelParams& params);

/// Coefficient functions of the second-order supercharge with Lorentz
/// principal part d1^2 - d2^2.
///
/// C+ = C1 - C2 is the constant 4 a alpha, C- = C1 + C2 = 4 a alpha coth(alpha x_- / 2).
/// The zeroth-order part is B = C+ C- / 4 + f1(x1) + f2(x2) with f1 = -V_M and
/// f2 = +V_M, which is what the intertwining relation H0 Q+ = Q+ H1 requires.
class SuperchargeCoefficients {
 public:
  explicit SuperchargeCoefficients(const ModelParams& params) : params_(params) {}

  double c_plus(double x_plus) const;
  double c_minus(double x_minus) const;
  /// dC+/dx_+ (identically zero here).
  double c_plus_prime(double x_plus) const;
  /// dC-/dx_-.
  double c_minus_prime(double x_minus) const;

  /// First-profile and second-profile functions entering B.
  double f1(double x1) const;
  double f2(double x2) const;

  Jet2 c1(double x1, double x2) const;
  Jet2 c2(double x1, double x2) const;
  Jet2 b(double x1, double x2) const;
  /// Gauge function chi = -(a alpha) x_+ - 2a ln|sinh(alpha x_- / 2)|.
  Jet2 chi(double x1, double x2) const;

 private:
  ModelParams params_;
};

/// Q+ (Sign::Plus) or its formal adjoint Q- (Sign::Minus).
DifferentialOperator2D supercharge(Sign sign, const ModelParams& params);

/// q+ = exp(-chi) Q+ exp(chi) = d1^2 - d2^2 + f1(x1) + f2(x2).
DifferentialOperator2D gauged_supercharge(const ModelParams& params);

/// -d1^2 - d2^2 + V^(branch).
DifferentialOperator2D hamiltonian(Branch branch, const ModelParams& params);

/// exp(chi) with derivatives to order two.
AnalyticField gauge_factor(const ModelParams& params);

struct ShapeShift {
  ModelParams shifted;
  double R = 0.0;
};

/// H0(x; a) = H1(x; a - 1/2) + R(a) with R(a) = alpha^2 (4a - 1).
ShapeShift shape_invariance_shift(const ModelParams& params);

}  // namespace susysep
