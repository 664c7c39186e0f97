#pragma once

#include <utility>

namespace susysep {

/// Couplings of the one-dimensional Morse well V(x) = A (e^{-2 alpha x} - 2 e^{-alpha x}).
struct MorseParams {
  double A = 0.0;
  double alpha = 0.0;

  /// Validating constructor; throws Error{InvalidParameter} unless A > 0 and alpha > 0.
  static MorseParams make(double A, double alpha);

  /// sqrt(A)/alpha; bound states exist iff this exceeds 1/2.
  double depth_ratio() const;
  /// s_n = sqrt(A)/alpha - n - 1/2 (may be non-positive; no check).
  double s(int n) const;
  /// xi = (2 sqrt(A)/alpha) exp(-alpha x).
  double xi(double x) const;
  double potential(double x) const;
};

struct MorseLevel {
  int n = 0;
  double s = 0.0;
  double epsilon = 0.0;
};

/// Terminating confluent hypergeometric series F(-n, b; x), a polynomial of degree n.
/// Throws Error{InvalidParameter} if a Pochhammer denominator (b)_j vanishes for j <= n.
double kummer_truncated(int n, double b, double x);

/// Sum of |terms| of the same series; an envelope for |F(-n, b; x)|.
double kummer_abs_sum(int n, double b, double x);

/// Throws Error{NotBound} if s_n <= 0, Error{InvalidParameter} if n < 0.
MorseLevel morse_level(int n, const MorseParams& params);

int count_bound_states(const MorseParams& params);

/// Pieces of the unnormalized eigenfunction written as exp(L(x)) * u(x), with
/// L = -xi/2 + s ln xi and u = F(-n, 2s+1; xi), plus their x-derivatives.
/// Kept separate so products of many such factors can be formed in log space.
struct MorseLogJet {
  double L = 0.0;
  double dL = 0.0;
  double d2L = 0.0;
  double u = 0.0;
  double du = 0.0;
  double d2u = 0.0;
};

struct Jet1D {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Bound state eta_n of the Morse well, normalized to unit L2 norm.
///
/// Derivatives are analytic (hypergeometric derivative identity); the
/// normalization constant comes from composite Simpson quadrature over a
/// domain on which the integrand has decayed by e^-40 relative to its peak.
class MorseEigenfunction {
 public:
  MorseEigenfunction(const MorseLevel& level, const MorseParams& params);

  const MorseLevel& level() const { return level_; }
  const MorseParams& params() const { return params_; }

  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;
  Jet1D jet(double x) const;

  /// Unnormalized factors in log form (the closed-form expression without constant).
  MorseLogJet log_jet(double x) const;
  /// ln of the constant that turns exp(L) u into the unit-norm eigenfunction.
  double log_norm_constant() const { return log_norm_; }

  std::pair<double, double> quadrature_domain() const { return domain_; }

 private:
  MorseLevel level_;
  MorseParams params_;
  double log_norm_ = 0.0;
  std::pair<double, double> domain_{0.0, 0.0};
};

/// Throws Error{NotBound} if s_n <= 0.
MorseEigenfunction morse_eigenfunction(int n, const MorseParams& params);

/// Composite Simpson quadrature of eta_a * eta_b over the union of both domains.
double morse_overlap(const MorseEigenfunction& a, const MorseEigenfunction& b);

}  // namespace susysep
