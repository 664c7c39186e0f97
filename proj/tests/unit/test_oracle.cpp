#include <doctest.h>

#include <cmath>
#include <random>

#include "susysep/error.hpp"
#include "susysep/exact_solver.hpp"
#include "susysep/model2d.hpp"
#include "susysep/oracle.hpp"

using namespace susysep;
using oracle::GridSpec;

namespace {

const MorseParams kMorse = MorseParams::make(30.25, 1.0);
const ModelParams kHalf = ModelParams::make(30.25, 1.0, -0.5);

double morse(double x) { return kMorse.potential(x); }

}  // namespace

TEST_CASE("grid spec geometry") {
  const auto s = GridSpec::interval(-2.0, 16.0, 2000);
  CHECK(s.h1() == doctest::Approx(18.0 / 1999.0));
  CHECK(s.with_points(1000).n1 == 1000);
  const auto t = GridSpec::triangle(-2.0, 12.0, 101);
  CHECK(t.shape == oracle::Shape::UpperTriangle);
  CHECK(t.h1() == doctest::Approx(0.14));
  CHECK(t.describe().find("triangle") != std::string::npos);
}

TEST_CASE("particle in a box converges to pi^2/L^2 at second order") {
  double prev = 0.0;
  for (int n : {101, 201, 401}) {
    const auto h = oracle::assemble_1d([](double) { return 0.0; }, GridSpec::interval(0.0, 2.0, n));
    const auto e = oracle::lowest_eigenpairs(h, 1);
    const double err = std::abs(e.eigenvalues[0] - M_PI * M_PI / 4.0);
    if (prev > 0.0) CHECK(std::log2(prev / err) >= 1.9);
    prev = err;
  }
}

TEST_CASE("1D Morse calibration on 2000 points") {
  const auto h = oracle::assemble_1d(morse, GridSpec::interval(-2.0, 16.0, 2000));
  const auto e = oracle::lowest_eigenpairs(h, 5);
  const double exact[] = {-25, -16, -9, -4, -1};
  // frozen oracle values
  const double frozen[] = {-25.0001351392263, -16.000466244668, -9.00077035176167, -4.00081432850219,
                           -1.00052718156405};
  for (int n = 0; n < 5; ++n) {
    CHECK(std::abs(e.eigenvalues[n] - exact[n]) < 1e-3);
    CHECK(e.eigenvalues[n] == doctest::Approx(frozen[n]).epsilon(1e-10));
    CHECK(e.residuals[n] <= 1e-8 * e.norm_estimate);
  }
  CHECK(std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end()));
  CHECK(h.count_below(-8.5) == 3);
}

TEST_CASE("harmonic ground level") {
  const auto h = oracle::assemble_1d([](double x) { return x * x; }, GridSpec::interval(-8.0, 8.0, 2000));
  CHECK(oracle::lowest_eigenpairs(h, 1).eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("determinism across repeats and window partitions") {
  const auto h = oracle::assemble_1d(morse, GridSpec::interval(-2.0, 16.0, 800));
  const auto a = oracle::lowest_eigenpairs(h, 5);
  const auto b = oracle::lowest_eigenpairs(h, 5);
  oracle::SolverOptions split;
  split.max_per_window = 2;
  const auto c = oracle::lowest_eigenpairs(h, 5, split);
  for (int n = 0; n < 5; ++n) {
    CHECK(a.eigenvalues[n] == b.eigenvalues[n]);
    CHECK(std::abs(a.eigenvalues[n] - c.eigenvalues[n]) < 1e-12);
  }
}

TEST_CASE("2D operator is symmetric") {
  const auto h = oracle::assemble(potential(Branch::H1, kHalf), GridSpec::square(-2.0, 16.0, 41));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  Eigen::VectorXd f(h.size());
  Eigen::VectorXd v(h.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    f[i] = g(rng);
    v[i] = g(rng);
  }
  CHECK(std::abs(f.dot(h.apply(v)) - h.apply(f).dot(v)) < 1e-12 * h.norm_estimate() * f.norm() * v.norm());
  const Eigen::VectorXd sparse = h.matrix() * v;
  CHECK((sparse - h.apply(v)).norm() < 1e-12 * sparse.norm());
}

TEST_CASE("separable 2D levels equal sums of 1D levels on the same spacing") {
  const auto h2 = oracle::assemble(potential(Branch::H1, kHalf), GridSpec::square(-2.0, 16.0, 121));
  const auto h1 = oracle::assemble_1d(morse, GridSpec::interval(-2.0, 16.0, 121));
  const auto e2 = oracle::lowest_eigenpairs(h2, 6);
  const auto e1 = oracle::lowest_eigenpairs(h1, 3);
  const double off = kHalf.energy_offset();
  const double sums[] = {2 * e1.eigenvalues[0], e1.eigenvalues[0] + e1.eigenvalues[1],
                         e1.eigenvalues[0] + e1.eigenvalues[1], e1.eigenvalues[0] + e1.eigenvalues[2],
                         e1.eigenvalues[0] + e1.eigenvalues[2], 2 * e1.eigenvalues[1]};
  const double frozen[] = {-50.0756505275113, -41.1694809950279, -41.1694809950279,
                           -34.258180687011,  -34.258180687011,  -32.2633114625446};
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(e2.eigenvalues[i] - off - sums[i]) < 1e-8);
    CHECK(e2.eigenvalues[i] - off == doctest::Approx(frozen[i]).epsilon(1e-9));
  }
}

TEST_CASE("sector split reproduces the full square") {
  const auto v = potential(Branch::H1, kHalf);
  const auto full = oracle::lowest_eigenpairs(oracle::assemble(v, GridSpec::square(-2.0, 16.0, 61)), 6);
  const auto sym = oracle::lowest_eigenpairs(
      oracle::assemble(v, GridSpec::square(-2.0, 16.0, 61, oracle::Sector::Symmetric)), 4);
  const auto anti = oracle::lowest_eigenpairs(
      oracle::assemble(v, GridSpec::square(-2.0, 16.0, 61, oracle::Sector::Antisymmetric)), 2);
  std::vector<double> merged(sym.eigenvalues);
  merged.insert(merged.end(), anti.eigenvalues.begin(), anti.eigenvalues.end());
  std::sort(merged.begin(), merged.end());
  for (int i = 0; i < 6; ++i) CHECK(merged[i] == doctest::Approx(full.eigenvalues[i]).epsilon(1e-10));
}

TEST_CASE("eigenpairs_in_range is complete against inertia") {
  const auto h = oracle::assemble_1d(morse, GridSpec::interval(-2.0, 16.0, 600));
  const auto r = oracle::eigenpairs_in_range(h, -30.0, -3.0);
  CHECK(static_cast<int>(r.eigenvalues.size()) == h.count_below(-3.0) - h.count_below(-30.0));
  CHECK(r.eigenvalues.size() == 4);
}

TEST_CASE("singular nodes are rejected") {
  const auto p = ModelParams::make(30.25, 1.0, -1.0);
  try {
    oracle::assemble(potential(Branch::H1, p), GridSpec::square(-2.0, 16.0, 41));
    FAIL("expected SingularNode");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularNode);
  }
  CHECK_NOTHROW(oracle::assemble(potential(Branch::H1, p), GridSpec::triangle(-2.0, 16.0, 41)));
}

TEST_CASE("richardson removes the h^2 term") {
  const double fine = 1.0 + 3.0 * 0.01 * 0.01;
  const double coarse = 1.0 + 3.0 * 0.02 * 0.02;
  CHECK(oracle::richardson(fine, 0.01, coarse, 0.02) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("triangle norm of an antisymmetric state is half the square norm") {
  const auto spec = GridSpec::square(-2.0, 14.0, 401);
  const Grid2D g = spec.grid();
  const SampledField full = sample(exact::separable_state(0, 2, exact::Parity::A, kHalf), g);
  const SampledField tri = restrict_to(full, domain_mask(g, DomainShape::UpperTriangle, 0));
  CHECK(std::abs(std::pow(norm(tri) / norm(full), 2) - 0.5) < 1e-4);
}

TEST_CASE("bound filter separates localized levels from box states") {
  const auto v = potential(Branch::H0, kHalf);
  const auto bs = oracle::bound_spectrum(v, GridSpec::triangle(-2.0, 16.0, 161), -55.0 + 1.0, -20.0 + 1.0);
  REQUIRE(bs.levels.size() >= 2);
  CHECK(bs.levels[0].energy - 1.0 == doctest::Approx(-34.0).epsilon(2e-2));
  CHECK(bs.all_eigenvalues.size() > bs.levels.size());
  for (const auto& l : bs.levels) CHECK(l.far_weight <= 1e-2);
}
