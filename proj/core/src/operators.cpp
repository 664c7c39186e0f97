#include "susysep/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "susysep/error.hpp"

namespace susysep {

namespace {

double coefficient_value(const AnalyticField& c, double x1, double x2) {
  return c ? c.value(x1, x2) : 0.0;
}

}  // namespace

double apply_analytic(const DifferentialOperator2D& op, const AnalyticField& field, double x1,
                      double x2) {
  if (op.is_singular_at(x1, x2) || field.is_singular_at(x1, x2)) {
    throw Error(ErrorKind::SingularPoint, "operator applied on its singular set");
  }
  if (field.order() < 2) {
    throw Error(ErrorKind::MissingDerivative, "field supplies derivatives only to order " +
                                                  std::to_string(field.order()));
  }
  const Jet2 f = field(x1, x2);
  return op.g11 * f.d11 + op.g22 * f.d22 + coefficient_value(op.c1, x1, x2) * f.d1 +
         coefficient_value(op.c2, x1, x2) * f.d2 + coefficient_value(op.b, x1, x2) * f.v;
}

SampledField apply_pointwise(const DifferentialOperator2D& op, const AnalyticField& field,
                             const Grid2D& grid) {
  SampledField out(grid);
  for (int i = 0; i < grid.n1; ++i) {
    for (int j = 0; j < grid.n2; ++j) {
      const double x1 = grid.x1(i);
      const double x2 = grid.x2(j);
      if (op.is_singular_at(x1, x2) || field.is_singular_at(x1, x2)) continue;
      const double v = apply_analytic(op, field, x1, x2);
      if (!std::isfinite(v)) continue;
      const std::size_t k = grid.index(i, j);
      out.values[k] = v;
      out.mask[k] = 1;
    }
  }
  return out;
}

DifferentialOperator2D adjoint(const DifferentialOperator2D& op) {
  for (const AnalyticField* c : {&op.c1, &op.c2}) {
    if (*c && c->order() < 1) {
      throw Error(ErrorKind::MissingDerivative, "adjoint needs first derivatives of c1, c2");
    }
  }
  DifferentialOperator2D out;
  out.g11 = op.g11;
  out.g22 = op.g22;
  out.singular = op.singular;

  auto negate = [](const AnalyticField& c) -> AnalyticField {
    if (!c) return {};
    return AnalyticField(
        [c](double x1, double x2) {
          Jet2 j = c(x1, x2);
          j.v = -j.v;
          j.d1 = -j.d1;
          j.d2 = -j.d2;
          j.d11 = -j.d11;
          j.d12 = -j.d12;
          j.d22 = -j.d22;
          return j;
        },
        c.order(), c.singular_set());
  };
  out.c1 = negate(op.c1);
  out.c2 = negate(op.c2);

  if (!op.has_first_order()) {
    out.b = op.b;
    return out;
  }
  int order = op.b ? op.b.order() : 2;
  if (op.c1) order = std::min(order, op.c1.order() - 1);
  if (op.c2) order = std::min(order, op.c2.order() - 1);
  const AnalyticField b = op.b;
  const AnalyticField c1 = op.c1;
  const AnalyticField c2 = op.c2;
  out.b = AnalyticField(
      [b, c1, c2, order](double x1, double x2) {
        Jet2 r = b ? b(x1, x2) : Jet2{};
        if (c1) {
          const Jet2 j = c1(x1, x2);
          r.v -= j.d1;
          if (order >= 1) {
            r.d1 -= j.d11;
            r.d2 -= j.d12;
          }
        }
        if (c2) {
          const Jet2 j = c2(x1, x2);
          r.v -= j.d2;
          if (order >= 1) {
            r.d1 -= j.d12;
            r.d2 -= j.d22;
          }
        }
        if (order < 1) r.d1 = r.d2 = 0.0;
        r.d11 = r.d12 = r.d22 = 0.0;
        return r;
      },
      std::min(order, 1), op.singular);
  return out;
}

SampledField apply_grid(const DifferentialOperator2D& op, const SampledField& field) {
  const Grid2D& g = field.grid;
  if (g.n1 < 5 || g.n2 < 5) {
    throw Error(ErrorKind::GridTooCoarse, "need at least 5 nodes per axis");
  }
  const bool first_order = op.has_first_order();
  const double inv_h1sq = 1.0 / (g.h1 * g.h1);
  const double inv_h2sq = 1.0 / (g.h2 * g.h2);
  SampledField out(g);
  const auto& f = field.values;
  const auto& m = field.mask;

  for (int i = 1; i < g.n1 - 1; ++i) {
    const double x1 = g.x1(i);
    for (int j = 1; j < g.n2 - 1; ++j) {
      const std::size_t c = g.index(i, j);
      const std::size_t e = g.index(i + 1, j);
      const std::size_t w = g.index(i - 1, j);
      const std::size_t n = g.index(i, j + 1);
      const std::size_t s = g.index(i, j - 1);
      if (!(m[c] && m[e] && m[w] && m[n] && m[s])) continue;
      const double x2 = g.x2(j);
      if (op.is_singular_at(x1, x2)) continue;

      double value = op.g11 * (f[e] - 2.0 * f[c] + f[w]) * inv_h1sq +
                     op.g22 * (f[n] - 2.0 * f[c] + f[s]) * inv_h2sq;
      if (first_order) {
        const std::size_t ne = g.index(i + 1, j + 1);
        const std::size_t sw = g.index(i - 1, j - 1);
        const std::size_t se = g.index(i + 1, j - 1);
        const std::size_t nw = g.index(i - 1, j + 1);
        if (!(m[ne] && m[sw] && m[se] && m[nw])) continue;
        const double d_plus = 0.5 * (f[ne] - f[sw]);
        const double d_minus = 0.5 * (f[se] - f[nw]);
        const double d1 = (d_plus + d_minus) / (2.0 * g.h1);
        const double d2 = (d_plus - d_minus) / (2.0 * g.h2);
        value += coefficient_value(op.c1, x1, x2) * d1 + coefficient_value(op.c2, x1, x2) * d2;
      }
      if (op.b) value += op.b.value(x1, x2) * f[c];
      out.values[c] = value;
      out.mask[c] = 1;
    }
  }
  return out;
}

SampledField apply_chain(const OperatorChain& chain, const SampledField& field,
                         double min_valid_fraction) {
  if (chain.ops.empty()) throw Error(ErrorKind::InvalidParameter, "empty operator chain");
  SampledField current = field;
  for (auto it = chain.ops.rbegin(); it != chain.ops.rend(); ++it) {
    current = apply_grid(*it, current);
  }
  const double kept = static_cast<double>(current.valid_count());
  const double before = static_cast<double>(field.valid_count());
  if (before == 0.0 || kept < min_valid_fraction * before) {
    throw Error(ErrorKind::GridTooCoarse,
                "operator chain leaves too few valid nodes (" + std::to_string(kept) + " of " +
                    std::to_string(before) + ")");
  }
  return current;
}

}  // namespace susysep
