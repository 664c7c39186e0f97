#include "susysep/model2d.hpp"

#include <cmath>

#include "susysep/error.hpp"

namespace susysep {

namespace {

// Hyperbolic pieces at u = alpha x_- / 2.
struct Hyper {
  double coth;
  double csch2;
};

Hyper hyper(double alpha, double x_minus) {
  const double u = 0.5 * alpha * x_minus;
  const double sh = std::sinh(u);
  return Hyper{std::cosh(u) / sh, 1.0 / (sh * sh)};
}

struct MorseJet {
  double v, d1, d2;
};

MorseJet morse_jet(const MorseParams& m, double x) {
  const double e = std::exp(-m.alpha * x);
  const double a2 = m.alpha * m.alpha;
  return MorseJet{m.A * (e * e - 2.0 * e), m.A * m.alpha * (-2.0 * e * e + 2.0 * e),
                  m.A * a2 * (4.0 * e * e - 2.0 * e)};
}

void guard_diagonal(double x1, double x2) {
  if (on_diagonal(x1, x2)) {
    throw Error(ErrorKind::SingularPoint, "evaluation on the diagonal x1 = x2");
  }
}

AnalyticField::Predicate diagonal_predicate() {
  return [](double x1, double x2) { return on_diagonal(x1, x2); };
}

}  // namespace

ModelParams ModelParams::make(double A, double alpha, double a) {
  if (!std::isfinite(a)) throw Error(ErrorKind::InvalidParameter, "parameter a must be finite");
  return ModelParams{MorseParams::make(A, alpha), a};
}

double qes_window_edge() { return -0.25 - 0.25 / std::sqrt(2.0); }
double qminus_window_edge() { return 0.25 + 0.25 / std::sqrt(2.0); }

bool ModelParams::qes_admissible() const { return a < qes_window_edge(); }
bool ModelParams::qminus_zero_mode_window() const { return a > qminus_window_edge(); }

double ModelParams::barrier_coefficient(Branch branch) const {
  const double sign = branch == Branch::H0 ? -1.0 : 1.0;
  return alpha() * alpha() * a * (2.0 * a + sign);
}

double ModelParams::energy_offset() const { return 4.0 * a * a * alpha() * alpha(); }

bool on_diagonal(double x1, double x2) { return std::abs(x1 - x2) < kDiagonalGuard; }

bool is_singular_on_diagonal(Branch branch, const ModelParams& params) {
  return params.barrier_coefficient(branch) != 0.0;
}

AnalyticField potential(Branch branch, const ModelParams& params) {
  const double kappa = params.barrier_coefficient(branch);
  const double offset = params.energy_offset();
  const MorseParams morse = params.morse;
  const double alpha = morse.alpha;
  auto eval = [kappa, offset, morse, alpha](double x1, double x2) {
    const MorseJet m1 = morse_jet(morse, x1);
    const MorseJet m2 = morse_jet(morse, x2);
    Jet2 j{offset + m1.v + m2.v, m1.d1, m2.d1, m1.d2, 0.0, m2.d2};
    if (kappa != 0.0) {
      guard_diagonal(x1, x2);
      const Hyper h = hyper(alpha, x1 - x2);
      const double g = h.csch2;
      const double gp = -alpha * h.csch2 * h.coth;
      const double gpp = alpha * alpha * (h.csch2 * h.coth * h.coth + 0.5 * h.csch2 * h.csch2);
      j.v += kappa * g;
      j.d1 += kappa * gp;
      j.d2 -= kappa * gp;
      j.d11 += kappa * gpp;
      j.d12 -= kappa * gpp;
      j.d22 += kappa * gpp;
    }
    return j;
  };
  return AnalyticField(eval, 2, kappa != 0.0 ? diagonal_predicate() : AnalyticField::Predicate{});
}

double SuperchargeCoefficients::c_plus(double) const { return 4.0 * params_.a * params_.alpha(); }

double SuperchargeCoefficients::c_plus_prime(double) const { return 0.0; }

double SuperchargeCoefficients::c_minus(double x_minus) const {
  if (params_.a == 0.0) return 0.0;
  if (std::abs(x_minus) < kDiagonalGuard) {
    throw Error(ErrorKind::SingularPoint, "C- is singular at x_- = 0");
  }
  return 4.0 * params_.a * params_.alpha() * hyper(params_.alpha(), x_minus).coth;
}

double SuperchargeCoefficients::c_minus_prime(double x_minus) const {
  if (params_.a == 0.0) return 0.0;
  if (std::abs(x_minus) < kDiagonalGuard) {
    throw Error(ErrorKind::SingularPoint, "C- is singular at x_- = 0");
  }
  const double alpha = params_.alpha();
  return -2.0 * params_.a * alpha * alpha * hyper(alpha, x_minus).csch2;
}

double SuperchargeCoefficients::f1(double x1) const { return -params_.morse.potential(x1); }
double SuperchargeCoefficients::f2(double x2) const { return params_.morse.potential(x2); }

Jet2 SuperchargeCoefficients::c1(double x1, double x2) const {
  const double a = params_.a;
  const double alpha = params_.alpha();
  const double cp = 4.0 * a * alpha;
  if (a == 0.0) return Jet2{};
  guard_diagonal(x1, x2);
  const Hyper h = hyper(alpha, x1 - x2);
  const double cm = cp * h.coth;
  const double cm1 = -2.0 * a * alpha * alpha * h.csch2;
  const double cm2 = 2.0 * a * alpha * alpha * alpha * h.csch2 * h.coth;
  return Jet2{0.5 * (cp + cm), 0.5 * cm1, -0.5 * cm1, 0.5 * cm2, -0.5 * cm2, 0.5 * cm2};
}

Jet2 SuperchargeCoefficients::c2(double x1, double x2) const {
  Jet2 j = c1(x1, x2);
  j.v -= 4.0 * params_.a * params_.alpha();
  return j;
}

Jet2 SuperchargeCoefficients::b(double x1, double x2) const {
  const MorseJet m1 = morse_jet(params_.morse, x1);
  const MorseJet m2 = morse_jet(params_.morse, x2);
  Jet2 j{-m1.v + m2.v, -m1.d1, m2.d1, -m1.d2, 0.0, m2.d2};
  const double a = params_.a;
  if (a == 0.0) return j;
  guard_diagonal(x1, x2);
  const double alpha = params_.alpha();
  const Hyper h = hyper(alpha, x1 - x2);
  // C+ C- / 4 = a alpha C-(x_-)
  const double k = a * alpha;
  const double cm = 4.0 * a * alpha * h.coth;
  const double cm1 = -2.0 * a * alpha * alpha * h.csch2;
  const double cm2 = 2.0 * a * alpha * alpha * alpha * h.csch2 * h.coth;
  j.v += k * cm;
  j.d1 += k * cm1;
  j.d2 -= k * cm1;
  j.d11 += k * cm2;
  j.d12 -= k * cm2;
  j.d22 += k * cm2;
  return j;
}

Jet2 SuperchargeCoefficients::chi(double x1, double x2) const {
  const double a = params_.a;
  if (a == 0.0) return Jet2{};
  guard_diagonal(x1, x2);
  const double alpha = params_.alpha();
  const double u = 0.5 * alpha * (x1 - x2);
  const Hyper h = hyper(alpha, x1 - x2);
  const double half = 0.5 * a * alpha * alpha * h.csch2;
  return Jet2{-a * alpha * (x1 + x2) - 2.0 * a * std::log(std::abs(std::sinh(u))),
              -a * alpha * (1.0 + h.coth),
              -a * alpha * (1.0 - h.coth),
              half,
              -half,
              half};
}

DifferentialOperator2D supercharge(Sign sign, const ModelParams& params) {
  DifferentialOperator2D q;
  q.g11 = 1.0;
  q.g22 = -1.0;
  const SuperchargeCoefficients coeffs(params);
  const bool singular = params.a != 0.0;
  const AnalyticField::Predicate pred = singular ? diagonal_predicate() : AnalyticField::Predicate{};
  if (singular) {
    q.c1 = AnalyticField([coeffs](double x1, double x2) { return coeffs.c1(x1, x2); }, 2, pred);
    q.c2 = AnalyticField([coeffs](double x1, double x2) { return coeffs.c2(x1, x2); }, 2, pred);
  }
  q.b = AnalyticField([coeffs](double x1, double x2) { return coeffs.b(x1, x2); }, 2, pred);
  q.singular = pred;
  return sign == Sign::Plus ? q : adjoint(q);
}

DifferentialOperator2D gauged_supercharge(const ModelParams& params) {
  DifferentialOperator2D q;
  q.g11 = 1.0;
  q.g22 = -1.0;
  const MorseParams morse = params.morse;
  q.b = AnalyticField(
      [morse](double x1, double x2) {
        const MorseJet m1 = morse_jet(morse, x1);
        const MorseJet m2 = morse_jet(morse, x2);
        return Jet2{-m1.v + m2.v, -m1.d1, m2.d1, -m1.d2, 0.0, m2.d2};
      },
      2);
  return q;
}

DifferentialOperator2D hamiltonian(Branch branch, const ModelParams& params) {
  DifferentialOperator2D h;
  h.g11 = -1.0;
  h.g22 = -1.0;
  h.b = potential(branch, params);
  h.singular = h.b.singular_set();
  return h;
}

AnalyticField gauge_factor(const ModelParams& params) {
  const SuperchargeCoefficients coeffs(params);
  const bool singular = params.a != 0.0;
  return AnalyticField(
      [coeffs](double x1, double x2) {
        const Jet2 c = coeffs.chi(x1, x2);
        const double e = std::exp(c.v);
        return Jet2{e,
                    e * c.d1,
                    e * c.d2,
                    e * (c.d11 + c.d1 * c.d1),
                    e * (c.d12 + c.d1 * c.d2),
                    e * (c.d22 + c.d2 * c.d2)};
      },
      2, singular ? diagonal_predicate() : AnalyticField::Predicate{});
}

ShapeShift shape_invariance_shift(const ModelParams& params) {
  ModelParams shifted = params;
  shifted.a = params.a - 0.5;
  const double alpha = params.alpha();
  return ShapeShift{shifted, alpha * alpha * (4.0 * params.a - 1.0)};
}

}  // namespace susysep
