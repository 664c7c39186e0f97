#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "susysep/field.hpp"

namespace susysep {

/// Uniform tensor grid; node (i, j) sits at (lo1 + i h1, lo2 + j h2).
/// Storage is row-major with x1 as the slow index.
struct Grid2D {
  double lo1 = 0.0;
  double lo2 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  int n1 = 0;
  int n2 = 0;

  /// n nodes per axis covering [lo, hi] with both endpoints on the grid.
  static Grid2D square(double lo, double hi, int n);

  double x1(int i) const { return lo1 + i * h1; }
  double x2(int j) const { return lo2 + j * h2; }
  std::size_t size() const { return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(j);
  }
  /// Trapezoidal weight of node (i, j) on the full rectangle.
  double weight(int i, int j) const;
  /// Same grid with spacing halved (2n - 1 nodes per axis, old nodes retained).
  Grid2D refined() const;
};

enum class DomainShape { Square, UpperTriangle };

/// Nodes of `shape`: every node for Square; nodes with x2 - x1 >= offset_cells * h1
/// for UpperTriangle (the triangle needs h1 == h2 and lo1 == lo2).
std::vector<std::uint8_t> domain_mask(const Grid2D& grid, DomainShape shape, int offset_cells = 1);

/// Grid samples with a validity mask. Invalid nodes hold 0 and are ignored by
/// every reduction.
struct SampledField {
  Grid2D grid;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;

  SampledField() = default;
  explicit SampledField(const Grid2D& g)
      : grid(g), values(g.size(), 0.0), mask(g.size(), std::uint8_t{0}) {}

  double at(int i, int j) const { return values[grid.index(i, j)]; }
  bool valid(int i, int j) const { return mask[grid.index(i, j)] != 0; }
  std::size_t valid_count() const;
};

/// Samples `field` at every node where it is defined and finite.
SampledField sample(const AnalyticField& field, const Grid2D& grid);
SampledField sample(const std::function<double(double, double)>& f, const Grid2D& grid);

/// Copy of `f` with its mask intersected with `mask`.
SampledField restrict_to(const SampledField& f, const std::vector<std::uint8_t>& mask);

/// Pointwise a f + b g on the common valid mask. Grids must match.
SampledField lincomb(double a, const SampledField& f, double b, const SampledField& g);
SampledField scaled(const SampledField& f, double factor);

/// Pointwise f(x1, x2) -> f(x2, x1). Needs a square grid with lo1 == lo2.
SampledField reflected(const SampledField& f);

/// Trapezoidal quadrature of f g over the common valid mask.
/// Throws Error{EmptyMask} if the masks share no node.
double inner_product(const SampledField& f, const SampledField& g);
double norm(const SampledField& f);

}  // namespace susysep
