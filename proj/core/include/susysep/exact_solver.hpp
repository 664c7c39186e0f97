#pragma once

#include <optional>
#include <string>
#include <vector>

#include "susysep/field.hpp"
#include "susysep/grid.hpp"
#include "susysep/model2d.hpp"
#include "susysep/oracle.hpp"
#include "susysep/spectrum.hpp"

namespace susysep::exact {

/// The coupling at which the mixed term of H1 vanishes.
inline constexpr double kSeparableA = -0.5;

/// Throws Error{NotSeparable} unless params.a == -1/2.
void require_separable(const ModelParams& params);

/// Hierarchy coupling a_k = -(k + 1)/2.
double hierarchy_coupling(int k);

/// All pairs 0 <= n <= m of bound levels with E = eps_n + eps_m (relative to
/// the constant 4 a^2 alpha^2 of H1), ascending in E; degeneracy 2 for n != m.
SpectrumTable separable_spectrum(const ModelParams& params);

enum class Parity { S, A };

/// eta_n(x1) eta_m(x2) with analytic derivatives.
AnalyticField product_state(int n, int m, const ModelParams& params);

/// eta_n(x1) eta_m(x2) +- eta_m(x1) eta_n(x2) (not normalized).
/// Throws Error{InvalidParameter} for the antisymmetric combination with n == m.
AnalyticField separable_state(int n, int m, Parity parity, const ModelParams& params);

/// r_{n,m} = alpha^4 [(n - m)^2 - 1][(s_n + s_m)^2 - 1].
double sym_eigenvalue(int n, int m, const ModelParams& params);
/// (eps_n - eps_m)^2 + 2 alpha^2 (eps_n + eps_m) + alpha^4.
double sym_eigenvalue_from_levels(int n, int m, const ModelParams& params);

struct PartnerState {
  int n = 0;
  int m = 0;
  double energy = 0.0;  // eps_n + eps_m
  double r = 0.0;
  /// r <= 0: Q+ annihilates the antisymmetric state.
  bool vanishing = false;
  /// ||Q+ Psi^A||^2 / ||Psi^A||^2 on the production grid.
  double norm_ratio = 0.0;
  /// Norm ratios on successively refined grids (last entry = production).
  std::vector<double> ratio_history;
  std::vector<std::string> grids;
  /// ||odd part|| / ||Psi^(0)|| under x1 <-> x2.
  double antisymmetric_fraction = 0.0;
  /// ||(H0 - E) Psi^(0)|| / ||Psi^(0)||.
  double transport_residual = 0.0;
  /// Unit-norm Q+ Psi^A on the full square (empty when vanishing).
  SampledField field;
};

/// Q+ Psi^(1)A_{n,m} on a square GridSpec, applied on the grid. Vanishing
/// pairs are also evaluated on two coarser grids so that the decay of the
/// ratio under refinement can be inspected.
/// Throws Error{NotSeparable}, Error{InvalidParameter} for n == m,
/// Error{GridTooCoarse}.
PartnerState partner_state(int n, int m, const ModelParams& params, const oracle::GridSpec& spec);

/// Pairs n < m with m - n >= 2 (the non-degenerate, symmetric partner levels).
SpectrumTable partner_spectrum(const ModelParams& params);

struct HierarchyPair {
  int n = 0;
  int m = 0;
  double energy = 0.0;
  /// factors[j] = <Q-(a_j) Q+(a_j)> on the image after j steps.
  std::vector<double> factors;
  /// Product of the factors: ||chain image||^2 / ||Psi^A||^2.
  double norm_factor = 0.0;
  bool retained = false;        // every factor positive
  bool retained_stated = false; // |n - m| > k + 2
  /// Grid measurement of the same norm ratio, if requested.
  std::optional<double> grid_ratio;
};

struct HierarchyResult {
  int k = 0;
  double a_k = 0.0;
  SpectrumTable table;  // retained levels only
  std::vector<HierarchyPair> pairs;  // every bound n < m
  std::string computed_rule;  // "|n-m| > k+1" with k substituted
  std::string stated_rule;    // "|n-m| > k+2" with k substituted
  bool rules_agree = false;
};

/// Level k of the hierarchy a_k = -(k+1)/2 built on the separable point.
/// Retention follows the norm recursion
/// f_j = f_{j-1} + alpha^2 (2j+1) (2E + alpha^2 (2j^2 + 2j + 1)), f_0 = r_{n,m}.
/// `params.a` is ignored; A and alpha are taken from it. With `spec`, the chain
/// Q+(a_k)...Q+(a_0) is applied on the grid for every retained pair.
HierarchyResult hierarchy_spectrum(int k, const ModelParams& params,
                                   const std::optional<oracle::GridSpec>& spec = std::nullopt);

/// Relative L2 error of Q-Q+ f = r f for f = eta_n(x1) eta_m(x2) on a square
/// grid, restricted to |x1 - x2| >= band (the intermediate Q+ f is singular
/// on the diagonal). Returns ||Q-Q+ f - r f|| / (max(|r|, 1) ||f||).
double symmetry_identity_error(int n, int m, const ModelParams& params, const oracle::GridSpec& spec,
                               double band);

/// Same for the antisymmetric combination on the whole valid square.
double symmetry_identity_error_antisymmetric(int n, int m, const ModelParams& params,
                                             const oracle::GridSpec& spec);

/// ||Q- Psi0_hat - sqrt(r) PsiA_hat|| / sqrt(r) for the unit-norm partner state
/// Psi0_hat and unit-norm Psi^A: Q- maps the partner back to a finite multiple
/// of the original state.
double reverse_map_error(const PartnerState& state, const ModelParams& params);

}  // namespace susysep::exact
