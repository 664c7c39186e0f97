#include <doctest.h>

#include <cmath>
#include <random>

#include "susysep/error.hpp"
#include "susysep/operators.hpp"
#include "susysep/qes_solver.hpp"

using namespace susysep;
using oracle::GridSpec;

namespace {

const ModelParams kA1 = ModelParams::make(30.25, 1.0, -1.0);

double zero_mode_residual(int n, int points) {
  const Grid2D g = GridSpec::triangle(-2.0, 12.0, points).grid();
  const SampledField om =
      restrict_to(sample(qes::zero_mode(n, kA1), g), domain_mask(g, DomainShape::UpperTriangle, 1));
  return norm(apply_grid(supercharge(Sign::Plus, kA1), om)) / norm(om);
}

}  // namespace

TEST_CASE("admissible indices") {
  CHECK(qes::admissible_indices(kA1).indices == std::vector<int>{0, 1, 2});
  const auto out = qes::admissible_indices(ModelParams::make(30.25, 1.0, -0.3));
  CHECK(out.indices.empty());
  CHECK(out.diagnostic == "a outside QES window (−∞, −0.426777)");
  const auto deep = qes::admissible_indices(ModelParams::make(30.25, 1.0, -3.0));
  CHECK(deep.indices.empty());
  CHECK_FALSE(deep.diagnostic.empty());
}

TEST_CASE("zero modes reject inadmissible indices") {
  try {
    qes::zero_mode(3, kA1);
    FAIL("expected Inadmissible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Inadmissible);
  }
}

TEST_CASE("zero modes are symmetric and vanish on the diagonal") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 8.0);
  for (int n = 0; n < 3; ++n) {
    const auto om = qes::zero_mode(n, kA1);
    for (int i = 0; i < 50; ++i) {
      const double x1 = u(rng);
      const double x2 = u(rng);
      CHECK(om.value(x1, x2) == doctest::Approx(om.value(x2, x1)).epsilon(1e-13));
      CHECK(om.value(x1, x1) == 0.0);
    }
  }
}

TEST_CASE("Q+ annihilates zero modes pointwise") {
  const auto q = supercharge(Sign::Plus, kA1);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 8.0);
  for (int n = 0; n < 3; ++n) {
    const auto om = qes::zero_mode(n, kA1);
    double peak = 0.0;
    for (double x1 = -1.0; x1 < 8.0; x1 += 0.05)
      for (double x2 = x1 + 0.05; x2 < 8.0; x2 += 0.05) peak = std::max(peak, std::abs(om.value(x1, x2)));
    for (int i = 0; i < 100; ++i) {
      const double x1 = u(rng);
      const double x2 = u(rng);
      if (std::abs(x1 - x2) < 1e-3) continue;
      CHECK(std::abs(apply_analytic(q, om, x1, x2)) < 1e-8 * peak);
    }
  }
}

TEST_CASE("grid residual of Q+ Omega_n converges at second order") {
  for (int n = 0; n < 3; ++n) {
    const double r1 = zero_mode_residual(n, 200);
    const double r2 = zero_mode_residual(n, 400);
    const double r3 = zero_mode_residual(n, 800);
    CAPTURE(n);
    CHECK(r3 < r2);
    CHECK(r2 < r1);
    CHECK(std::log2(r1 / r3) / 2.0 >= 1.9);
  }
}

TEST_CASE("closed-form QES energies") {
  const auto t = qes::qes_spectrum(kA1);
  REQUIRE(t.levels.size() == 3);
  CHECK(t.levels[0].energy == -30.0);
  CHECK(t.levels[1].energy == -16.0);
  CHECK(t.levels[2].energy == -6.0);
  CHECK(t.metadata_value("spectrum") == std::optional<std::string>("partial"));
}

TEST_CASE("coupling matrix on a coarse grid") {
  const auto spec = GridSpec::triangle(-2.0, 12.0, 200);
  const auto cm = qes::coupling_matrix(kA1, spec, 100);
  // frozen Richardson values for 200 + 100 points
  CHECK(cm.c(0, 0) == doctest::Approx(-29.9997586454199).epsilon(1e-8));
  CHECK(cm.c(1, 1) == doctest::Approx(-16.0004815994109).epsilon(1e-8));
  CHECK(cm.c(2, 2) == doctest::Approx(-6.00111317737637).epsilon(1e-8));
  CHECK(cm.c(2, 0) == doctest::Approx(0.000283499847691617).epsilon(1e-4));
  CHECK(cm.gram_condition < 1e10);
  CHECK(cm.c_fine.has_value());
}

TEST_CASE("coupling matrix is lower triangular after refinement") {
  const auto spec = GridSpec::triangle(-2.0, 12.0, 800);
  const auto cm = qes::coupling_matrix(kA1, spec, 400);
  CHECK(cm.orientation == qes::Orientation::Lower);
  CHECK(cm.off_triangle < 1e-3);
  CHECK(cm.reconstruction_error < 1e-2);
  const auto t = qes::qes_spectrum(kA1);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(cm.c(k, k) / t.levels[k].energy - 1.0) < 1e-3);

  const auto states = qes::qes_eigenfunctions(kA1, spec, cm);
  REQUIRE(states.size() == 3);
  // lowest state is Omega_0 alone for a lower triangular C
  CHECK(states[0].coefficients[1] == 0.0);
  CHECK(states[0].coefficients[2] == 0.0);
  for (const auto& s : states) {
    CHECK(s.residual < 1e-2);
    CHECK(norm(s.field) == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) CHECK(std::abs(inner_product(states[i].field, states[j].field)) < 1e-2);
}

TEST_CASE("single-mode coupling matrix") {
  // s_n > -2a = 4.6 keeps only n = 0
  const auto p = ModelParams::make(30.25, 1.0, -2.3);
  REQUIRE(qes::admissible_indices(p).indices.size() == 1);
  const auto cm = qes::coupling_matrix(p, GridSpec::triangle(-2.0, 12.0, 200));
  CHECK(cm.c.rows() == 1);
  CHECK(cm.orientation == qes::Orientation::Diagonal);
  CHECK(cm.off_triangle == 0.0);
}

TEST_CASE("degenerate diagonal is reported") {
  const auto spec = GridSpec::triangle(-2.0, 12.0, 200);
  auto cm = qes::coupling_matrix(kA1, spec);
  cm.c(1, 1) = cm.c(0, 0);
  try {
    qes::qes_eigenfunctions(kA1, spec, cm);
    FAIL("expected DegenerateDiagonal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateDiagonal);
  }
}

TEST_CASE("shape descend") {
  const auto spec = GridSpec::triangle(-2.0, 12.0, 800);
  const auto lower = ModelParams::make(30.25, 1.0, -1.5);
  const auto cm = qes::coupling_matrix(lower, spec, 400);
  const auto states = qes::qes_eigenfunctions(lower, spec, cm);
  REQUIRE(states.size() == 2);
  const double expected[] = {-25.0, -13.0};
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto f = qes::qes_state_field(lower, cm.indices, states[i].coefficients);
    const auto d = qes::shape_descend(f, spec, states[i].energy, kA1, 1);
    CHECK(d.energy - states[i].energy == doctest::Approx(-5.0));
    CHECK(d.energy == doctest::Approx(expected[i]).epsilon(1e-3));
    CHECK(d.residual < 1e-2);
  }
  const auto m0 = qes::shape_descend(states[0].field, states[0].energy, kA1, 0);
  CHECK(m0.energy == states[0].energy);
  CHECK(m0.field.values == states[0].field.values);
}
