#include "susysep/special1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "susysep/error.hpp"

namespace susysep {

namespace {

constexpr double kDecayWindow = 40.0;

void check_series_denominator(int n, double b) {
  // (b)_j = b (b+1) ... (b+j-1) for j <= n vanishes iff b = -p, p integer, 0 <= p <= n-1.
  if (n <= 0) return;
  const double r = std::round(b);
  if (r == b && b <= 0.0 && -b <= n - 1) {
    throw Error(ErrorKind::InvalidParameter,
                "kummer series denominator vanishes for b = " + std::to_string(b));
  }
}

// Composite Simpson over [lo, hi] with an even number of intervals.
template <class F>
double simpson(F&& f, double lo, double hi, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (hi - lo) / intervals;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + i * h);
  return sum * h / 3.0;
}

int simpson_intervals(double lo, double hi, double alpha) {
  const double step = 0.005 / alpha;
  return std::clamp(static_cast<int>((hi - lo) / step), 4000, 200000);
}

}  // namespace

MorseParams MorseParams::make(double A, double alpha) {
  if (!(A > 0.0) || !std::isfinite(A)) {
    throw Error(ErrorKind::InvalidParameter, "Morse coupling A must be positive");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::InvalidParameter, "Morse inverse length alpha must be positive");
  }
  return MorseParams{A, alpha};
}

double MorseParams::depth_ratio() const { return std::sqrt(A) / alpha; }

double MorseParams::s(int n) const { return depth_ratio() - n - 0.5; }

double MorseParams::xi(double x) const { return 2.0 * depth_ratio() * std::exp(-alpha * x); }

double MorseParams::potential(double x) const {
  const double e = std::exp(-alpha * x);
  return A * (e * e - 2.0 * e);
}

double kummer_truncated(int n, double b, double x) {
  if (n < 0) throw Error(ErrorKind::InvalidParameter, "kummer index must be non-negative");
  check_series_denominator(n, b);
  double term = 1.0;
  double sum = 1.0;
  for (int j = 0; j < n; ++j) {
    term *= (-n + j) / (b + j) * x / (j + 1);
    sum += term;
  }
  return sum;
}

double kummer_abs_sum(int n, double b, double x) {
  if (n < 0) throw Error(ErrorKind::InvalidParameter, "kummer index must be non-negative");
  check_series_denominator(n, b);
  double term = 1.0;
  double sum = 1.0;
  for (int j = 0; j < n; ++j) {
    term *= std::abs((-n + j) / (b + j) * x / (j + 1));
    sum += term;
  }
  return sum;
}

MorseLevel morse_level(int n, const MorseParams& params) {
  if (n < 0) throw Error(ErrorKind::InvalidParameter, "level index must be non-negative");
  const double s = params.s(n);
  if (!(s > 0.0)) {
    throw Error(ErrorKind::NotBound,
                "level n = " + std::to_string(n) + " has s_n = " + std::to_string(s) + " <= 0");
  }
  return MorseLevel{n, s, -params.alpha * params.alpha * s * s};
}

int count_bound_states(const MorseParams& params) {
  // s_n > 0  <=>  n < depth_ratio - 1/2
  const double bound = params.depth_ratio() - 0.5;
  if (bound <= 0.0) return 0;
  int count = static_cast<int>(std::ceil(bound));
  while (count > 0 && !(params.s(count - 1) > 0.0)) --count;
  while (params.s(count) > 0.0) ++count;
  return count;
}

MorseEigenfunction::MorseEigenfunction(const MorseLevel& level, const MorseParams& params)
    : level_(level), params_(params) {
  const double alpha = params_.alpha;
  const double s = level_.s;
  const int n = level_.n;
  const double b = 2.0 * s + 1.0;

  // Log envelope of the integrand (exp(L) u)^2, as a function of x.
  auto log_envelope = [&](double x) {
    const double xi = params_.xi(x);
    return -xi + 2.0 * s * std::log(xi) + 2.0 * std::log(kummer_abs_sum(n, b, xi));
  };
  const double c = 2.0 * params_.depth_ratio();
  const double x_peak = -std::log(2.0 * s / c) / alpha;
  const double peak = log_envelope(x_peak);
  const double step = 0.05 / alpha;

  double lo = x_peak;
  while (log_envelope(lo) > peak - kDecayWindow) lo -= step;
  double hi = x_peak;
  while (log_envelope(hi) > peak - kDecayWindow) hi += step;
  domain_ = {lo, hi};

  // Integrate exp(2L - peak) u^2 so that nothing overflows.
  auto integrand = [&](double x) {
    const MorseLogJet j = log_jet(x);
    return std::exp(2.0 * j.L - peak) * j.u * j.u;
  };
  const double integral = simpson(integrand, lo, hi, simpson_intervals(lo, hi, alpha));
  log_norm_ = -0.5 * (std::log(integral) + peak);
}

MorseLogJet MorseEigenfunction::log_jet(double x) const {
  const double alpha = params_.alpha;
  const double s = level_.s;
  const int n = level_.n;
  const double b = 2.0 * s + 1.0;
  const double xi = params_.xi(x);

  MorseLogJet j;
  j.L = -0.5 * xi + s * std::log(xi);
  j.dL = alpha * (0.5 * xi - s);
  j.d2L = -0.5 * alpha * alpha * xi;

  const double p = kummer_truncated(n, b, xi);
  const double dp = n >= 1 ? (-n / b) * kummer_truncated(n - 1, b + 1.0, xi) : 0.0;
  const double d2p =
      n >= 2 ? (-n / b) * ((-n + 1.0) / (b + 1.0)) * kummer_truncated(n - 2, b + 2.0, xi) : 0.0;
  j.u = p;
  j.du = -alpha * xi * dp;
  j.d2u = alpha * alpha * (xi * xi * d2p + xi * dp);
  return j;
}

Jet1D MorseEigenfunction::jet(double x) const {
  const MorseLogJet j = log_jet(x);
  const double e = std::exp(log_norm_ + j.L);
  Jet1D out;
  out.v = e * j.u;
  out.d1 = e * (j.dL * j.u + j.du);
  out.d2 = e * ((j.d2L + j.dL * j.dL) * j.u + 2.0 * j.dL * j.du + j.d2u);
  return out;
}

double MorseEigenfunction::value(double x) const { return jet(x).v; }
double MorseEigenfunction::derivative(double x) const { return jet(x).d1; }
double MorseEigenfunction::second_derivative(double x) const { return jet(x).d2; }

MorseEigenfunction morse_eigenfunction(int n, const MorseParams& params) {
  return MorseEigenfunction(morse_level(n, params), params);
}

double morse_overlap(const MorseEigenfunction& a, const MorseEigenfunction& b) {
  const double lo = std::min(a.quadrature_domain().first, b.quadrature_domain().first);
  const double hi = std::max(a.quadrature_domain().second, b.quadrature_domain().second);
  auto f = [&](double x) { return a.value(x) * b.value(x); };
  return simpson(f, lo, hi, simpson_intervals(lo, hi, a.params().alpha));
}

}  // namespace susysep
