#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "susysep/field.hpp"
#include "susysep/grid.hpp"

namespace susysep::oracle {

enum class Shape { Interval, Square, UpperTriangle };

/// Exchange-symmetry sector of a square-domain problem. Full keeps every
/// interior node; Symmetric/Antisymmetric solve on x2 >= x1 (resp. x2 > x1)
/// with the reflected stencil, which block-diagonalizes the square exactly.
enum class Sector { Full, Symmetric, Antisymmetric };

/// Default start-vector seed of the Lanczos iteration.
inline constexpr std::uint64_t kDefaultSeed = 0x5eed2010ULL;

/// Discretization request. All outer boundaries are Dirichlet; the
/// UpperTriangle shape is also Dirichlet on the nodes with
/// x2 - x1 < diagonal_offset * h.
struct GridSpec {
  Shape shape = Shape::Square;
  Sector sector = Sector::Full;
  double lo1 = 0.0;
  double hi1 = 0.0;
  double lo2 = 0.0;
  double hi2 = 0.0;
  int n1 = 0;
  int n2 = 0;
  int diagonal_offset = 1;

  static GridSpec interval(double lo, double hi, int n);
  static GridSpec square(double lo, double hi, int n, Sector sector = Sector::Full);
  static GridSpec triangle(double lo, double hi, int n, int diagonal_offset = 1);

  /// Same region with `n` nodes per axis.
  GridSpec with_points(int n) const;
  double h1() const;
  double h2() const;
  /// Tensor grid of all nodes (n2 = 1 and h2 = 1 for intervals).
  Grid2D grid() const;
  std::string describe() const;
};

/// -Laplacian + V on the unknown nodes of a GridSpec, second-order 5-point
/// (3-point in 1D) stencil, stored both as a stencil (matrix-free apply) and
/// as a sparse matrix for factorizations. In the Symmetric sector unknowns
/// are scaled by sqrt(multiplicity) so that the operator stays symmetric.
class DiscreteHamiltonian {
 public:
  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return nodes_.size(); }
  /// Grid index (Grid2D::index) of unknown k.
  std::size_t node(std::size_t k) const { return nodes_[k]; }
  double potential_at(std::size_t k) const { return potential_[k]; }
  double min_potential() const;
  /// Gershgorin bound on the spectral radius.
  double norm_estimate() const;

  /// y = H x, evaluated from the stencil.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }

  /// Continuum-normalized samples of an eigenvector on the full tensor grid
  /// (sectors are extended by reflection; Dirichlet nodes are valid zeros).
  SampledField to_field(const Eigen::VectorXd& v) const;
  /// Continuum-normalized samples of a 1D eigenvector at the interior nodes.
  std::vector<double> to_samples_1d(const Eigen::VectorXd& v) const;
  /// Fraction of |v|^2 at nodes with max(x1, x2) > x_far.
  double far_weight(const Eigen::VectorXd& v, double x_far) const;

  /// Sylvester inertia of H - e: the number of eigenvalues below e.
  int count_below(double e) const;

 private:
  friend DiscreteHamiltonian assemble(const AnalyticField&, const GridSpec&);
  friend DiscreteHamiltonian assemble_1d(const std::function<double(double)>&, const GridSpec&);

  struct Link {
    std::size_t target;
    double coefficient;
  };

  void build_matrix();

  GridSpec spec_;
  std::vector<std::size_t> nodes_;
  std::vector<double> potential_;
  std::vector<double> diagonal_;
  std::vector<double> scale_;  // sqrt(multiplicity) of each unknown
  std::vector<std::vector<Link>> links_;
  Eigen::SparseMatrix<double> matrix_;
};

/// Throws Error{SingularNode} if the potential is singular or non-finite at an
/// unknown node, Error{InvalidParameter} for inconsistent specs.
DiscreteHamiltonian assemble(const AnalyticField& potential, const GridSpec& spec);
DiscreteHamiltonian assemble_1d(const std::function<double(double)>& potential,
                                const GridSpec& spec);

struct EigenResult {
  std::vector<double> eigenvalues;
  std::vector<Eigen::VectorXd> eigenvectors;
  std::vector<double> residuals;
  int iterations = 0;
  double norm_estimate = 0.0;
};

struct SolverOptions {
  /// Residual bound ||Hv - lambda v||; 0 selects 1e-8 * norm_estimate.
  double tolerance = 0.0;
  std::uint64_t seed = kDefaultSeed;
  /// Upper limit on eigenpairs per shift-invert window; larger ranges are split.
  int max_per_window = 14;
  int max_restarts = 8;
};

/// k lowest eigenpairs, ascending. Throws Error{NoConvergence} (message lists
/// the best residuals) if the iteration cap is hit.
EigenResult lowest_eigenpairs(const DiscreteHamiltonian& h, int k, const SolverOptions& options = {});

/// Every eigenpair with eigenvalue in [lo, hi), ascending; completeness is
/// checked against inertia counts.
EigenResult eigenpairs_in_range(const DiscreteHamiltonian& h, double lo, double hi,
                                const SolverOptions& options = {});

/// Richardson extrapolation of a quantity with O(h^2) error.
double richardson(double fine, double h_fine, double coarse, double h_coarse);

/// Eigenvectors whose weight beyond x_far stays below max_far_weight are
/// treated as bound states; discretized continuum states spread over the box.
struct BoundFilter {
  /// x_far = hi - far_fraction * (hi - lo) on the upper axis bound.
  double far_fraction = 0.4;
  double max_far_weight = 1e-2;
};

struct BoundLevel {
  double energy = 0.0;       // extrapolated when a companion grid was used
  double energy_fine = 0.0;  // raw production-grid eigenvalue
  std::optional<double> energy_coarse;
  double far_weight = 0.0;
  double residual = 0.0;
  Sector sector = Sector::Full;
};

struct BoundSpectrum {
  std::vector<BoundLevel> levels;  // ascending in energy
  /// Every eigenvalue found in the range, bound or not, at the production grid.
  std::vector<double> all_eigenvalues;
  std::vector<double> all_far_weights;
  std::string grid;
  std::optional<std::string> companion_grid;
};

/// Bound part of the spectrum of -Laplacian + V in [lo, hi).
///
/// Square specs with Sector::Full are solved as Symmetric + Antisymmetric
/// sectors. With `companion_points` set, the same computation runs on a
/// coarser grid and each bound level is Richardson-extrapolated.
BoundSpectrum bound_spectrum(const AnalyticField& potential, const GridSpec& spec, double lo,
                             double hi, std::optional<int> companion_points = std::nullopt,
                             const BoundFilter& filter = {}, const SolverOptions& options = {});

}  // namespace susysep::oracle
