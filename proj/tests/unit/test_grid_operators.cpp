#include <doctest.h>

#include <cmath>
#include <random>

#include "susysep/error.hpp"
#include "susysep/grid.hpp"
#include "susysep/model2d.hpp"
#include "susysep/operators.hpp"

using namespace susysep;

namespace {

AnalyticField bump(double c1, double c2, double w) {
  return AnalyticField(
      [=](double x1, double x2) {
        const double s = 1.0 / (w * w);
        const double u = x1 - c1;
        const double v = x2 - c2;
        const double g = std::exp(-0.5 * s * (u * u + v * v));
        return Jet2{g, -s * u * g, -s * v * g, (s * s * u * u - s) * g, s * s * u * v * g, (s * s * v * v - s) * g};
      },
      2);
}

AnalyticField constant_field(double c) {
  return AnalyticField([c](double, double) { return Jet2{c, 0, 0, 0, 0, 0}; }, 2);
}

DifferentialOperator2D laplacian_like() {
  DifferentialOperator2D op;
  op.g11 = 1.0;
  op.g22 = 1.0;
  return op;
}

double max_abs(const SampledField& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (f.mask[i]) m = std::max(m, std::abs(f.values[i]));
  return m;
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid2D g = Grid2D::square(-1.0, 1.0, 5);
  CHECK(g.h1 == doctest::Approx(0.5));
  CHECK(g.size() == 25);
  CHECK(g.x1(4) == doctest::Approx(1.0));
  const Grid2D r = g.refined();
  CHECK(r.n1 == 9);
  CHECK(r.h1 == doctest::Approx(0.25));
  double total = 0.0;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) total += g.weight(i, j);
  CHECK(total == doctest::Approx(4.0));
}

TEST_CASE("triangle mask keeps x2 - x1 >= offset cells") {
  const Grid2D g = Grid2D::square(0.0, 1.0, 11);
  const auto m1 = domain_mask(g, DomainShape::UpperTriangle, 1);
  const auto m0 = domain_mask(g, DomainShape::UpperTriangle, 0);
  std::size_t c1 = 0;
  std::size_t c0 = 0;
  for (std::size_t i = 0; i < m1.size(); ++i) {
    c1 += m1[i];
    c0 += m0[i];
  }
  CHECK(c1 == 55);
  CHECK(c0 == 66);
  CHECK(m1[g.index(3, 3)] == 0);
  CHECK(m1[g.index(3, 4)] == 1);
  CHECK(m1[g.index(4, 3)] == 0);
}

TEST_CASE("inner products and reductions") {
  const Grid2D g = Grid2D::square(0.0, 1.0, 21);
  const SampledField one = sample([](double, double) { return 1.0; }, g);
  CHECK(inner_product(one, one) == doctest::Approx(1.0));
  const SampledField x = sample([](double x1, double) { return x1; }, g);
  CHECK(inner_product(one, x) == doctest::Approx(0.5));
  CHECK(norm(scaled(one, 3.0)) == doctest::Approx(3.0));
  const SampledField f = sample([](double x1, double x2) { return x1 - 2 * x2; }, g);
  const SampledField r = reflected(f);
  CHECK(r.at(3, 7) == doctest::Approx(f.at(7, 3)));
  const SampledField empty(g);
  CHECK_THROWS_AS(inner_product(empty, one), Error);
}

TEST_CASE("apply_analytic on a quadratic") {
  const AnalyticField f([](double x1, double x2) { return Jet2{x1 * x1 + x2 * x2, 2 * x1, 2 * x2, 2, 0, 2}; }, 2);
  CHECK(apply_analytic(laplacian_like(), f, 0.3, -1.7) == doctest::Approx(4.0));
  CHECK(apply_analytic(laplacian_like(), f, 5.0, 2.0) == doctest::Approx(4.0));
}

TEST_CASE("apply_analytic errors") {
  const AnalyticField first_order([](double x1, double) { return Jet2{x1, 1, 0, 0, 0, 0}; }, 1);
  try {
    apply_analytic(laplacian_like(), first_order, 0.0, 1.0);
    FAIL("expected MissingDerivative");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingDerivative);
  }
  const auto q = supercharge(Sign::Plus, ModelParams::make(30.25, 1.0, -1.0));
  try {
    apply_analytic(q, bump(0, 0, 1), 0.5, 0.5);
    FAIL("expected SingularPoint");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularPoint);
  }
}

TEST_CASE("second-derivative stencil converges at second order") {
  DifferentialOperator2D d11;
  d11.g11 = 1.0;
  double prev = 0.0;
  for (int n : {41, 81, 161}) {
    const Grid2D g = Grid2D::square(0.0, 3.0, n);
    const SampledField f = sample([](double x1, double) { return std::sin(x1); }, g);
    const SampledField out = apply_grid(d11, f);
    const SampledField exact = restrict_to(sample([](double x1, double) { return -std::sin(x1); }, g), out.mask);
    const double err = max_abs(lincomb(1.0, out, -1.0, exact));
    if (prev > 0.0) {
      const double order = std::log2(prev / err);
      CHECK(order >= 1.9);
      CHECK(order <= 2.1);
    }
    prev = err;
  }
}

TEST_CASE("constant field under an operator without b is zero") {
  const Grid2D g = Grid2D::square(0.0, 1.0, 11);
  const auto q = gauged_supercharge(ModelParams::make(30.25, 1.0, -1.0));
  DifferentialOperator2D op = q;
  op.b = AnalyticField();
  op.c1 = constant_field(2.5);
  const SampledField out = apply_grid(op, sample(constant_field(1.0), g));
  CHECK(max_abs(out) == 0.0);
  CHECK(out.valid(0, 5) == false);
  CHECK(out.valid(5, 5) == true);
}

TEST_CASE("apply_grid rejects grids under five points") {
  const Grid2D g = Grid2D::square(0.0, 1.0, 4);
  try {
    apply_grid(laplacian_like(), sample(constant_field(1.0), g));
    FAIL("expected GridTooCoarse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GridTooCoarse);
  }
}

TEST_CASE("linearity of apply_grid") {
  const auto p = ModelParams::make(30.25, 1.0, -1.0);
  const auto q = supercharge(Sign::Plus, p);
  const Grid2D g = Grid2D::square(-1.0, 11.0, 81);
  const SampledField f = sample(bump(2, 8, 0.6), g);
  const SampledField h = sample(bump(8, 1.5, 0.6), g);
  const SampledField lhs = apply_grid(q, lincomb(2.0, f, -0.5, h));
  const SampledField rhs = lincomb(2.0, apply_grid(q, f), -0.5, apply_grid(q, h));
  CHECK(norm(lincomb(1.0, lhs, -1.0, rhs)) <= 1e-12 * norm(rhs));
}

TEST_CASE("adjoint flips first-order terms and is an involution") {
  DifferentialOperator2D op = laplacian_like();
  op.c1 = constant_field(1.5);
  op.b = constant_field(-0.25);
  const auto adj = adjoint(op);
  CHECK(adj.c1(0.3, 0.4).v == doctest::Approx(-1.5));
  CHECK(adj.b(0.3, 0.4).v == doctest::Approx(-0.25));

  const auto q = supercharge(Sign::Plus, ModelParams::make(30.25, 1.0, -1.0));
  const auto qq = adjoint(adjoint(q));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 8.0);
  for (int i = 0; i < 100; ++i) {
    const double x1 = u(rng);
    const double x2 = u(rng);
    if (std::abs(x1 - x2) < 1e-3) continue;
    CHECK(std::abs(qq.c1(x1, x2).v - q.c1(x1, x2).v) < 1e-12);
    CHECK(std::abs(qq.c2(x1, x2).v - q.c2(x1, x2).v) < 1e-12);
    CHECK(std::abs(qq.b(x1, x2).v - q.b(x1, x2).v) < 1e-12 * std::max(1.0, std::abs(q.b(x1, x2).v)));
  }
}

TEST_CASE("adjoint satisfies the bilinear identity under quadrature") {
  const auto p = ModelParams::make(30.25, 1.0, -1.0);
  const auto q = supercharge(Sign::Plus, p);
  const auto qa = adjoint(q);
  for (int n : {121, 241}) {
    const Grid2D g = Grid2D::square(-1.0, 11.0, n);
    const SampledField f = sample(bump(2.0, 8.5, 0.6), g);
    const SampledField h = sample(bump(2.5, 9.0, 0.7), g);
    const double lhs = inner_product(f, apply_grid(q, h));
    const double rhs = inner_product(apply_grid(qa, f), h);
    const double gap = std::abs(lhs - rhs) / std::abs(lhs);
    CHECK(gap < 1e-5);
  }
}

TEST_CASE("apply_chain") {
  const auto p = ModelParams::make(30.25, 1.0, -1.0);
  const auto q = supercharge(Sign::Plus, p);
  const Grid2D g = Grid2D::square(-1.0, 11.0, 61);
  const SampledField f = sample(bump(2, 8, 0.6), g);
  const SampledField one = apply_chain(OperatorChain{{q}}, f);
  const SampledField direct = apply_grid(q, f);
  CHECK(one.values == direct.values);
  CHECK(one.mask == direct.mask);
  try {
    apply_chain(OperatorChain{}, f);
    FAIL("expected InvalidParameter");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParameter);
  }
  const Grid2D tiny = Grid2D::square(-1.0, 11.0, 9);
  CHECK_THROWS_AS(apply_chain(OperatorChain{{q, q, q}}, sample(bump(2, 8, 0.6), tiny)), Error);
}

TEST_CASE("apply_pointwise skips singular nodes") {
  const auto p = ModelParams::make(30.25, 1.0, -1.0);
  const Grid2D g = Grid2D::square(0.0, 2.0, 21);
  const SampledField out = apply_pointwise(supercharge(Sign::Plus, p), bump(0.5, 1.5, 0.5), g);
  CHECK(out.valid(4, 4) == false);
  CHECK(out.valid(4, 6) == true);
}

TEST_CASE("apply_grid agrees with exact application at second order") {
  const auto p = ModelParams::make(30.25, 1.0, -1.0);
  const auto q = supercharge(Sign::Plus, p);
  const AnalyticField f = bump(2.0, 8.5, 0.6);
  double prev = 0.0;
  for (int n : {101, 201, 401}) {
    const Grid2D g = Grid2D::square(-1.0, 11.0, n);
    const SampledField grid = apply_grid(q, sample(f, g));
    const SampledField exact = restrict_to(apply_pointwise(q, f, g), grid.mask);
    const double err = norm(lincomb(1.0, grid, -1.0, exact)) / norm(exact);
    if (prev > 0.0) CHECK(std::log2(prev / err) >= 1.9);
    prev = err;
  }
}
