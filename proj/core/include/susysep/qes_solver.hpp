#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "susysep/field.hpp"
#include "susysep/grid.hpp"
#include "susysep/model2d.hpp"
#include "susysep/oracle.hpp"
#include "susysep/spectrum.hpp"

namespace susysep::qes {

struct AdmissibleSet {
  std::vector<int> indices;
  /// Empty when `indices` is nonempty; otherwise the reason.
  std::string diagnostic;
};

/// Indices n with s_n > -2a > 0. Outside the window a < -1/4 - 1/(4 sqrt 2)
/// the set is empty and the diagnostic names the window.
AdmissibleSet admissible_indices(const ModelParams& params);

/// Zero mode Omega_n of Q+, in the closed form
/// ((alpha/sqrt A) xi1 xi2 / |xi2 - xi1|)^{2a} e^{-(xi1+xi2)/2} (xi1 xi2)^{s_n} F(xi1) F(xi2),
/// evaluated as exp(chi + L(x1) + L(x2)) u(x1) u(x2) with analytic first and
/// second derivatives. Not normalized. Throws Error{Inadmissible}.
AnalyticField zero_mode(int n, const ModelParams& params);

struct ZeroModeFamily {
  ModelParams params;
  std::vector<int> indices;
  std::vector<AnalyticField> modes;
};

ZeroModeFamily zero_modes(const ModelParams& params);

/// Which triangle of the coupling matrix vanishes.
enum class Orientation { Lower, Upper, Diagonal };

std::string to_string(Orientation o);

/// Row n holds the expansion H1 Omega_n = sum_k c_{nk} Omega_k over the
/// admissible indices (ascending).
struct CouplingMatrix {
  std::vector<int> indices;
  Eigen::MatrixXd c;
  Eigen::MatrixXd gram;
  Orientation orientation = Orientation::Diagonal;
  /// Largest entry of the vanishing triangle relative to max |c|.
  double off_triangle = 0.0;
  double gram_condition = 0.0;
  /// max_n ||H1 Omega_n - sum_k c_nk Omega_k|| / ||H1 Omega_n||.
  double reconstruction_error = 0.0;
  std::string grid;
  /// Raw matrices when `c` is a Richardson extrapolation of two grids.
  std::optional<Eigen::MatrixXd> c_fine;
  std::optional<Eigen::MatrixXd> c_coarse;
};

/// Galerkin projection on an UpperTriangle GridSpec: H1 Omega_n is applied on
/// the grid and fitted in the Omega basis by Householder least squares.
/// With `companion_points`, entries are Richardson-extrapolated from a second,
/// coarser grid. Throws Error{Inadmissible} for an empty admissible set and
/// Error{IllConditioned} if the Gram condition number exceeds 1e10.
CouplingMatrix coupling_matrix(const ModelParams& params, const oracle::GridSpec& spec,
                               std::optional<int> companion_points = std::nullopt);

/// E_k = -2 alpha^2 s_k (s_k + 2a) for the admissible k. The energies refer to
/// the full H1 including its constant 4 a^2 alpha^2.
SpectrumTable qes_spectrum(const ModelParams& params);

struct QesState {
  int k = 0;
  double energy = 0.0;
  /// Coefficients over the Omega basis (a row of B).
  Eigen::VectorXd coefficients;
  SampledField field;  // unit norm on its valid mask
  double residual = 0.0;
};

/// Back-substitution against the triangular coupling matrix; each state is
/// sampled on `spec`, normalized, and its H1 residual measured on the grid.
/// Throws Error{DegenerateDiagonal} when two diagonal entries agree to 1e-6.
std::vector<QesState> qes_eigenfunctions(const ModelParams& params, const oracle::GridSpec& spec,
                                         const CouplingMatrix& c);

struct DescendResult {
  SampledField field;  // unnormalized chained image
  double energy = 0.0;
  /// ||image|| / ||input||.
  double norm_ratio = 0.0;
  /// ||(H1(a) - energy) image|| / ||image||; the chain Q-(a)...Q-(a-(M-1)/2)
  /// lands on eigenstates of H1(a).
  double residual = 0.0;
};

/// Maps an eigenstate of H1(a - M/2) with energy `energy` through
/// Q-(a) Q-(a - 1/2) ... Q-(a - (M-1)/2); the energy grows by R(a_j) per step.
/// M = 0 returns the input. Throws Error{NullImage} when the image norm drops
/// below 1e-6 of the input norm, Error{GridTooCoarse} via apply_chain.
DescendResult shape_descend(const SampledField& state, double energy, const ModelParams& params, int M);

/// Same chain for an analytic input: the first supercharge is applied
/// pointwise with exact derivatives, later ones on the grid of `spec`.
/// Avoids differencing the 1/x_- coefficients against a sampled state.
DescendResult shape_descend(const AnalyticField& state, const oracle::GridSpec& spec, double energy,
                            const ModelParams& params, int M);

/// sum_j coefficients[j] Omega_{indices[j]} as an analytic field.
AnalyticField qes_state_field(const ModelParams& params, const std::vector<int>& indices,
                              const Eigen::VectorXd& coefficients);

}  // namespace susysep::qes
