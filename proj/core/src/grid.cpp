#include "susysep/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "susysep/error.hpp"

namespace susysep {

namespace {

void require_same_grid(const Grid2D& a, const Grid2D& b) {
  if (a.n1 != b.n1 || a.n2 != b.n2 || a.h1 != b.h1 || a.h2 != b.h2 || a.lo1 != b.lo1 ||
      a.lo2 != b.lo2) {
    throw Error(ErrorKind::InvalidParameter, "sampled fields live on different grids");
  }
}

}  // namespace

Grid2D Grid2D::square(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) throw Error(ErrorKind::InvalidParameter, "bad grid extent");
  const double h = (hi - lo) / (n - 1);
  return Grid2D{lo, lo, h, h, n, n};
}

double Grid2D::weight(int i, int j) const {
  double w = h1 * h2;
  if (i == 0 || i == n1 - 1) w *= 0.5;
  if (j == 0 || j == n2 - 1) w *= 0.5;
  return w;
}

Grid2D Grid2D::refined() const {
  return Grid2D{lo1, lo2, 0.5 * h1, 0.5 * h2, 2 * n1 - 1, 2 * n2 - 1};
}

std::vector<std::uint8_t> domain_mask(const Grid2D& grid, DomainShape shape, int offset_cells) {
  std::vector<std::uint8_t> mask(grid.size(), std::uint8_t{1});
  if (shape == DomainShape::Square) return mask;
  if (grid.h1 != grid.h2 || grid.lo1 != grid.lo2) {
    throw Error(ErrorKind::InvalidParameter, "triangle domain needs identical axes");
  }
  for (int i = 0; i < grid.n1; ++i) {
    for (int j = 0; j < grid.n2; ++j) {
      mask[grid.index(i, j)] = (j - i >= offset_cells) ? 1 : 0;
    }
  }
  return mask;
}

std::size_t SampledField::valid_count() const {
  std::size_t count = 0;
  for (auto m : mask) count += m != 0;
  return count;
}

SampledField sample(const AnalyticField& field, const Grid2D& grid) {
  SampledField out(grid);
  for (int i = 0; i < grid.n1; ++i) {
    const double x1 = grid.x1(i);
    for (int j = 0; j < grid.n2; ++j) {
      const double x2 = grid.x2(j);
      if (field.is_singular_at(x1, x2)) continue;
      const double v = field.value(x1, x2);
      if (!std::isfinite(v)) continue;
      out.values[grid.index(i, j)] = v;
      out.mask[grid.index(i, j)] = 1;
    }
  }
  return out;
}

SampledField sample(const std::function<double(double, double)>& f, const Grid2D& grid) {
  SampledField out(grid);
  for (int i = 0; i < grid.n1; ++i) {
    for (int j = 0; j < grid.n2; ++j) {
      const double v = f(grid.x1(i), grid.x2(j));
      if (!std::isfinite(v)) continue;
      out.values[grid.index(i, j)] = v;
      out.mask[grid.index(i, j)] = 1;
    }
  }
  return out;
}

SampledField restrict_to(const SampledField& f, const std::vector<std::uint8_t>& mask) {
  if (mask.size() != f.values.size()) {
    throw Error(ErrorKind::InvalidParameter, "mask size does not match grid");
  }
  SampledField out = f;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    if (!(out.mask[k] && mask[k])) {
      out.mask[k] = 0;
      out.values[k] = 0.0;
    }
  }
  return out;
}

SampledField lincomb(double a, const SampledField& f, double b, const SampledField& g) {
  require_same_grid(f.grid, g.grid);
  SampledField out(f.grid);
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    if (f.mask[k] && g.mask[k]) {
      out.mask[k] = 1;
      out.values[k] = a * f.values[k] + b * g.values[k];
    }
  }
  return out;
}

SampledField scaled(const SampledField& f, double factor) {
  SampledField out = f;
  for (auto& v : out.values) v *= factor;
  return out;
}

SampledField reflected(const SampledField& f) {
  const Grid2D& g = f.grid;
  if (g.n1 != g.n2 || g.h1 != g.h2 || g.lo1 != g.lo2) {
    throw Error(ErrorKind::InvalidParameter, "reflection needs identical axes");
  }
  SampledField out(g);
  for (int i = 0; i < g.n1; ++i) {
    for (int j = 0; j < g.n2; ++j) {
      out.values[g.index(i, j)] = f.values[g.index(j, i)];
      out.mask[g.index(i, j)] = f.mask[g.index(j, i)];
    }
  }
  return out;
}

double inner_product(const SampledField& f, const SampledField& g) {
  require_same_grid(f.grid, g.grid);
  const Grid2D& grid = f.grid;
  double sum = 0.0;
  bool any = false;
  for (int i = 0; i < grid.n1; ++i) {
    for (int j = 0; j < grid.n2; ++j) {
      const std::size_t k = grid.index(i, j);
      if (f.mask[k] && g.mask[k]) {
        sum += grid.weight(i, j) * f.values[k] * g.values[k];
        any = true;
      }
    }
  }
  if (!any) throw Error(ErrorKind::EmptyMask, "inner product over an empty mask");
  return sum;
}

double norm(const SampledField& f) { return std::sqrt(inner_product(f, f)); }

}  // namespace susysep
