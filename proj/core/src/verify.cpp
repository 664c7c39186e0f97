#include "susysep/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "susysep/error.hpp"
#include "susysep/exact_solver.hpp"
#include "susysep/operators.hpp"
#include "susysep/oracle.hpp"
#include "susysep/qes_solver.hpp"
#include "susysep/special1d.hpp"
#include "susysep/spectrum.hpp"

namespace susysep::verify {

namespace {

using json = nlohmann::ordered_json;

const std::vector<Tolerance> kTolerances = {
    {"roundoff", 1e-10, "algebraic identities evaluated in floating point"},
    {"order_min", 1.9, "minimum measured convergence order"},
    {"orthonormality", 1e-6, "1D eigenfunction overlaps against the Kronecker delta"},
    {"oracle_1d_abs", 1e-3, "1D oracle eigenvalues against closed-form levels"},
    {"oracle_2d_abs", 1e-2, "2D oracle eigenvalues against predicted levels"},
    {"excluded_gap", 0.5, "minimum distance of oracle levels from excluded energies"},
    {"residual_rel", 1e-8, "eigenpair residual relative to the operator norm estimate"},
    {"determinism", 1e-12, "eigenvalue spread across repeated or repartitioned runs"},
    {"separable_sum", 1e-8, "2D separable eigenvalues against sums of 1D eigenvalues"},
    {"triangle_halving", 1e-4, "triangle against half-square norm of an antisymmetric state"},
    {"galerkin_diag_rel", 1e-3, "Galerkin diagonal against closed-form QES energies"},
    {"off_triangle", 1e-3, "vanishing triangle of the coupling matrix relative to its max"},
    {"closure", 1e-2, "Galerkin reconstruction error of H1 acting on zero modes"},
    {"gram_condition", 1e10, "condition number of the equilibrated zero-mode Gram matrix"},
    {"level_match", 1e-2, "distance of a closed-form level to the nearest oracle level"},
    {"eigen_residual", 1e-2, "relative grid residual of constructed eigenfunctions"},
    {"orthogonality", 1e-2, "overlap of distinct constructed eigenfunctions"},
    {"norm_stability", 1e-3, "relative norm change under 20% domain enlargement"},
    {"norm_ratio_rel", 1e-2, "supercharge norm ratio against r(n, m)"},
    {"vanishing_ratio", 1e-3, "norm ratio of supercharge images that must vanish"},
    {"symmetry_fraction", 1e-3, "odd part of a partner state under coordinate exchange"},
    {"reverse_map", 2e-2, "Q- image of a partner state against sqrt(r) times the original"},
    {"transport", 1e-2, "relative H0 residual of partner states"},
    {"operator_identity", 1e-2, "Q-Q+ on product states against r(n, m) times the input"},
};

constexpr double kReferenceLevels[] = {-25.0, -16.0, -9.0, -4.0, -1.0};

std::string fmt(double x) { return format_double(x); }

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out;
}

bool evaluate(Compare cmp, double measured, double target, double tol) {
  if (!std::isfinite(measured)) return false;
  switch (cmp) {
    case Compare::AbsDiff: return std::abs(measured - target) <= tol;
    case Compare::RelDiff: return std::abs(measured - target) <= tol * std::abs(target);
    case Compare::AtMost: return measured <= tol;
    case Compare::AtLeast: return measured >= tol;
  }
  return false;
}

std::string_view to_string(Compare cmp) {
  switch (cmp) {
    case Compare::AbsDiff: return "abs";
    case Compare::RelDiff: return "rel";
    case Compare::AtMost: return "max";
    case Compare::AtLeast: return "min";
  }
  return "?";
}

struct CheckBuilder {
  Check c;

  CheckBuilder(std::string id, std::string description, std::string anchor, Tag tag) {
    c.id = std::move(id);
    c.description = std::move(description);
    c.anchor = std::move(anchor);
    c.tag = tag;
  }
  CheckBuilder& grid(std::string g) {
    c.grid = std::move(g);
    return *this;
  }
  CheckBuilder& trend(std::vector<double> t) {
    c.trend = std::move(t);
    return *this;
  }
  CheckBuilder& order(std::optional<double> o) {
    c.order = o;
    return *this;
  }
  CheckBuilder& detail(std::string key, std::string value) {
    c.details.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  Check done(double measured, double target, std::string_view tol_id, Compare cmp) {
    c.measured = measured;
    c.target = target;
    c.tol = tolerance(tol_id);
    c.compare = cmp;
    c.pass = evaluate(cmp, measured, target, c.tol);
    return std::move(c);
  }
  Check skip(std::string reason) {
    c.skipped = true;
    c.pass = false;
    c.measured = std::numeric_limits<double>::quiet_NaN();
    c.reason = std::move(reason);
    return std::move(c);
  }
};

double order_between(double coarse, double fine, double ratio = 2.0) {
  return std::log(coarse / fine) / std::log(ratio);
}

// ---------------------------------------------------------------------------
// Shared measurements

struct Bump {
  double c1, c2, w;
};

std::vector<Bump> random_bumps(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(1.5, 9.5);
  std::vector<Bump> out;
  while (static_cast<int>(out.size()) < count) {
    const double c1 = pos(rng);
    const double c2 = pos(rng);
    if (std::abs(c1 - c2) < 6.0) continue;
    out.push_back({c1, c2, 0.6});
  }
  return out;
}

AnalyticField bump_field(const Bump& b) {
  return AnalyticField(
      [b](double x1, double x2) {
        const double s = 1.0 / (b.w * b.w);
        const double u = x1 - b.c1;
        const double v = x2 - b.c2;
        const double g = std::exp(-0.5 * s * (u * u + v * v));
        return Jet2{g, -s * u * g, -s * v * g, (s * s * u * u - s) * g, s * s * u * v * g,
                    (s * s * v * v - s) * g};
      },
      2);
}

constexpr double kBumpLo = -1.0;
constexpr double kBumpHi = 11.0;

double intertwining_residual(const ModelParams& p, const Bump& b, int points) {
  const Grid2D grid = Grid2D::square(kBumpLo, kBumpHi, points);
  const SampledField g = sample(bump_field(b), grid);
  const auto h0 = hamiltonian(Branch::H0, p);
  const auto h1 = hamiltonian(Branch::H1, p);
  const auto qp = supercharge(Sign::Plus, p);
  const SampledField left = apply_chain(OperatorChain{{h0, qp}}, g);
  const SampledField right = apply_chain(OperatorChain{{qp, h1}}, g);
  return norm(lincomb(1.0, left, -1.0, right)) / norm(g);
}

double analytic_vs_grid(const ModelParams& p, const Bump& b, int points) {
  const Grid2D grid = Grid2D::square(kBumpLo, kBumpHi, points);
  const AnalyticField f = bump_field(b);
  const auto qp = supercharge(Sign::Plus, p);
  const SampledField on_grid = apply_grid(qp, sample(f, grid));
  const SampledField exact = restrict_to(apply_pointwise(qp, f, grid), on_grid.mask);
  return norm(lincomb(1.0, on_grid, -1.0, exact)) / norm(exact);
}

constexpr double kZeroModeLo = -2.0;
constexpr double kZeroModeHi = 12.0;

double zero_mode_residual(const ModelParams& p, int n, int points, double lo = kZeroModeLo,
                          double hi = kZeroModeHi) {
  const auto spec = oracle::GridSpec::triangle(lo, hi, points);
  const Grid2D grid = spec.grid();
  const SampledField om =
      restrict_to(sample(qes::zero_mode(n, p), grid), domain_mask(grid, DomainShape::UpperTriangle, 1));
  const SampledField q = apply_grid(supercharge(Sign::Plus, p), om);
  return norm(q) / norm(om);
}

struct ShapeSample {
  double max_delta = 0.0;
  double max_scale = 0.0;
};

ShapeSample shape_identity(const ModelParams& p, std::uint64_t seed, int count) {
  const ShapeShift shift = shape_invariance_shift(p);
  const AnalyticField v0 = potential(Branch::H0, p);
  const AnalyticField v1 = potential(Branch::H1, shift.shifted);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-1.0, 8.0);
  ShapeSample out;
  int taken = 0;
  while (taken < count) {
    const double x1 = pos(rng);
    const double x2 = pos(rng);
    if (std::abs(x1 - x2) < 0.5) continue;
    const double a0 = v0.value(x1, x2);
    const double a1 = v1.value(x1, x2);
    out.max_delta = std::max(out.max_delta, std::abs(a0 - a1 - shift.R));
    out.max_scale = std::max(out.max_scale, std::abs(a0));
    ++taken;
  }
  return out;
}

double resolve_a(const SuiteConfig& config, double fallback) { return config.a.value_or(fallback); }

std::pair<double, double> resolve_domain(const SuiteConfig& config, double lo, double hi) {
  return config.domain.value_or(std::make_pair(lo, hi));
}

int resolve_points(const SuiteConfig& config, int fallback) { return config.nx.value_or(fallback); }

void add_params(Report& r, const ModelParams& p) {
  r.metadata.emplace_back("A", fmt(p.morse.A));
  r.metadata.emplace_back("alpha", fmt(p.alpha()));
  r.metadata.emplace_back("a", fmt(p.a));
}

double nearest_distance(double e, const std::vector<double>& levels) {
  double best = std::numeric_limits<double>::infinity();
  for (double l : levels) best = std::min(best, std::abs(e - l));
  return best;
}

std::vector<double> bound_energies(const oracle::BoundSpectrum& s, double shift) {
  std::vector<double> out;
  for (const auto& l : s.levels) out.push_back(l.energy - shift);
  return out;
}

// ---------------------------------------------------------------------------
// Suites

Report suite_shape(const SuiteConfig& config) {
  const ModelParams p = ModelParams::make(config.A, config.alpha, resolve_a(config, -1.0));
  Report r;
  r.suite = "shape";
  add_params(r, p);
  const ShapeSample s = shape_identity(p, config.seed, 10000);
  r.checks.push_back(CheckBuilder("shape.identity",
                                  "max |V0(a) - V1(a - 1/2) - alpha^2 (4a - 1)| over 10^4 random "
                                  "off-diagonal points",
                                  "shape invariance of the partner potentials", Tag::Analytic)
                         .grid("random points in [-1, 8]^2 with |x1 - x2| >= 0.5")
                         .detail("R", fmt(shape_invariance_shift(p).R))
                         .detail("max |V0|", fmt(s.max_scale))
                         .done(s.max_delta, 0.0, "roundoff", Compare::AtMost));
  return r;
}

Report suite_oracle_calibration(const SuiteConfig& config) {
  const ModelParams p = ModelParams::make(config.A, config.alpha, resolve_a(config, -0.5));
  const MorseParams& mp = p.morse;
  Report r;
  r.suite = "oracle-calibration";
  add_params(r, p);
  oracle::SolverOptions opts;
  opts.seed = config.seed;

  const int bound = count_bound_states(mp);
  std::vector<double> eps;
  for (int n = 0; n < bound; ++n) eps.push_back(morse_level(n, mp).epsilon);

  // special1d
  {
    std::vector<MorseEigenfunction> fs;
    for (int n = 0; n < bound; ++n) fs.push_back(morse_eigenfunction(n, mp));
    double worst = 0.0;
    for (int i = 0; i < bound; ++i)
      for (int j = i; j < bound; ++j)
        worst = std::max(worst, std::abs(morse_overlap(fs[i], fs[j]) - (i == j ? 1.0 : 0.0)));
    r.checks.push_back(CheckBuilder("special1d.orthonormality",
                                    "max |<eta_n, eta_m> - delta_nm| over all bound pairs",
                                    "Morse bound states", Tag::Analytic)
                           .grid("composite Simpson on each quadrature domain")
                           .done(worst, 0.0, "orthonormality", Compare::AtMost));

    const double h = 0.02;
    double e_coarse = 0.0;
    double e_fine = 0.0;
    for (const auto& f : fs) {
      for (double x = -1.0; x <= 8.0; x += 0.25) {
        const double d = f.derivative(x);
        const double c1 = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
        const double c2 = (f.value(x + h / 2) - f.value(x - h / 2)) / h;
        e_coarse = std::max(e_coarse, std::abs(c1 - d));
        e_fine = std::max(e_fine, std::abs(c2 - d));
      }
    }
    const double ord = order_between(e_coarse, e_fine);
    r.checks.push_back(CheckBuilder("special1d.derivative_order",
                                    "order of central differences against the analytic derivative",
                                    "Morse bound states", Tag::Numerical)
                           .grid("h = 0.02, 0.01 on [-1, 8]")
                           .trend({e_coarse, e_fine})
                           .order(ord)
                           .done(ord, 2.0, "order_min", Compare::AtLeast));

    bool monotone = true;
    for (int n = 1; n < bound; ++n) monotone = monotone && eps[n] > eps[n - 1];
    r.checks.push_back(CheckBuilder("special1d.monotone", "eps_0 < eps_1 < ... strictly",
                                    "Morse bound-state energies", Tag::Analytic)
                           .detail("levels", join(eps))
                           .done(monotone ? 1.0 : 0.0, 1.0, "roundoff", Compare::AbsDiff));
  }

  // 1D Morse levels, residuals, order, determinism
  const auto morse = [mp](double x) { return mp.potential(x); };
  const auto spec1d = oracle::GridSpec::interval(-2.0, 16.0, 2000);
  const auto h1d = oracle::assemble_1d(morse, spec1d);
  const int k = std::min(bound, 5);
  const auto res = oracle::lowest_eigenpairs(h1d, k, opts);
  {
    double worst = 0.0;
    for (int n = 0; n < k; ++n) worst = std::max(worst, std::abs(res.eigenvalues[n] - eps[n]));
    auto b = CheckBuilder("oracle.morse_levels", "lowest five 1D Morse eigenvalues against eps_n",
                          "one-dimensional Morse spectrum", Tag::Numerical)
                 .grid(spec1d.describe());
    for (int n = 0; n < k; ++n)
      b.detail("level " + std::to_string(n),
               "oracle " + fmt(res.eigenvalues[n]) + ", exact " + fmt(eps[n]));
    r.checks.push_back(b.done(worst, 0.0, "oracle_1d_abs", Compare::AtMost));

    double worst_res = 0.0;
    for (double rr : res.residuals) worst_res = std::max(worst_res, rr / res.norm_estimate);
    r.checks.push_back(CheckBuilder("oracle.residual_bound", "max ||Hv - lambda v|| / ||H||_est",
                                    "eigensolver contract", Tag::Numerical)
                           .grid(spec1d.describe())
                           .done(worst_res, 0.0, "residual_rel", Compare::AtMost));

    const auto half = oracle::lowest_eigenpairs(oracle::assemble_1d(morse, spec1d.with_points(1000)), k, opts);
    const auto quarter = oracle::lowest_eigenpairs(oracle::assemble_1d(morse, spec1d.with_points(500)), k, opts);
    double min_order = std::numeric_limits<double>::infinity();
    std::vector<double> trend;
    auto b2 = CheckBuilder("oracle.morse_order",
                           "minimum convergence order of the five 1D levels between 1000 and 2000 points",
                           "one-dimensional Morse spectrum", Tag::Numerical)
                  .grid("500, 1000, 2000 points on [-2, 16]");
    for (int n = 0; n < k; ++n) {
      const double ec = std::abs(half.eigenvalues[n] - eps[n]);
      const double ef = std::abs(res.eigenvalues[n] - eps[n]);
      const double hf = spec1d.h1();
      const double hc = spec1d.with_points(1000).h1();
      min_order = std::min(min_order, std::log(ec / ef) / std::log(hc / hf));
      trend.push_back(ef);
      b2.detail("level " + std::to_string(n),
                "errors " + fmt(std::abs(quarter.eigenvalues[n] - eps[n])) + ", " + fmt(ec) + ", " +
                    fmt(ef) + "; richardson " + fmt(oracle::richardson(res.eigenvalues[n], hf, half.eigenvalues[n], hc)));
    }
    r.checks.push_back(b2.trend(trend).order(min_order).done(min_order, 2.0, "order_min", Compare::AtLeast));

    oracle::SolverOptions split = opts;
    split.max_per_window = 2;
    const auto again = oracle::lowest_eigenpairs(h1d, k, opts);
    const auto parted = oracle::lowest_eigenpairs(h1d, k, split);
    double spread = 0.0;
    for (int n = 0; n < k; ++n) {
      spread = std::max(spread, std::abs(again.eigenvalues[n] - res.eigenvalues[n]));
      spread = std::max(spread, std::abs(parted.eigenvalues[n] - res.eigenvalues[n]));
    }
    r.checks.push_back(CheckBuilder("oracle.determinism",
                                    "eigenvalue spread over a repeated run and a run with windows of two",
                                    "eigensolver contract", Tag::Analytic)
                           .grid(spec1d.describe())
                           .done(spread, 0.0, "determinism", Compare::AtMost));
  }

  // particle in a box and harmonic well
  {
    std::vector<double> hs;
    std::vector<double> errs;
    for (int n : {101, 201, 401}) {
      const auto s = oracle::GridSpec::interval(0.0, M_PI, n);
      const auto e = oracle::lowest_eigenpairs(oracle::assemble_1d([](double) { return 0.0; }, s), 1, opts);
      hs.push_back(s.h1());
      errs.push_back(std::abs(e.eigenvalues[0] - 1.0));
    }
    const auto fit = fit_order(hs, errs);
    r.checks.push_back(CheckBuilder("oracle.box_order", "ground level of a free particle on [0, pi]",
                                    "particle in a box", Tag::Analytic)
                           .grid("101, 201, 401 points on [0, pi]")
                           .trend(errs)
                           .order(fit.order)
                           .done(fit.order.value_or(0.0), 2.0, "order_min", Compare::AtLeast));

    const auto s = oracle::GridSpec::interval(-8.0, 8.0, 2000);
    const auto e = oracle::lowest_eigenpairs(oracle::assemble_1d([](double x) { return x * x; }, s), 1, opts);
    r.checks.push_back(CheckBuilder("oracle.harmonic", "ground level of V = x^2", "harmonic oscillator",
                                    Tag::Analytic)
                           .grid(s.describe())
                           .done(e.eigenvalues[0], 1.0, "oracle_1d_abs", Compare::AbsDiff));
  }

  // 2D: symmetry, separable sums, triangle halving
  if (bound >= 3) {
    const ModelParams sep = ModelParams::make(config.A, config.alpha, exact::kSeparableA);
    const auto spec = oracle::GridSpec::square(-2.0, 16.0, 61);
    const auto h2 = oracle::assemble(potential(Branch::H1, sep), spec);
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd f(h2.size());
    Eigen::VectorXd g(h2.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      f[i] = gauss(rng);
      g[i] = gauss(rng);
    }
    const double lhs = f.dot(h2.apply(g));
    const double rhs = h2.apply(f).dot(g);
    const double sym = std::abs(lhs - rhs) / (h2.norm_estimate() * f.norm() * g.norm());
    r.checks.push_back(CheckBuilder("oracle.symmetry", "|<f, Hg> - <Hf, g>| / (||H|| ||f|| ||g||) for random f, g",
                                    "discrete Hamiltonian construction", Tag::Analytic)
                           .grid(spec.describe())
                           .done(sym, 0.0, "roundoff", Compare::AtMost));

    const int m = 6;
    const auto e2 = oracle::lowest_eigenpairs(h2, m, opts);
    const auto e1 = oracle::lowest_eigenpairs(
        oracle::assemble_1d(morse, oracle::GridSpec::interval(-2.0, 16.0, 61)), 4, opts);
    std::vector<double> sums;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) sums.push_back(e1.eigenvalues[i] + e1.eigenvalues[j] + sep.energy_offset());
    std::sort(sums.begin(), sums.end());
    double worst = 0.0;
    for (int i = 0; i < m; ++i) worst = std::max(worst, std::abs(e2.eigenvalues[i] - sums[i]));
    r.checks.push_back(CheckBuilder("oracle.separable_sums",
                                    "lowest six 2D eigenvalues of H1(-1/2) against sums of 1D eigenvalues "
                                    "on the same spacing",
                                    "separable limit of the model", Tag::Numerical)
                           .grid(spec.describe())
                           .detail("2D", join(e2.eigenvalues))
                           .done(worst, 0.0, "separable_sum", Compare::AtMost));

    const auto sq = oracle::GridSpec::square(-2.0, 14.0, 401);
    const Grid2D grid = sq.grid();
    const SampledField full = sample(exact::separable_state(0, 2, exact::Parity::A, sep), grid);
    const SampledField tri = restrict_to(full, domain_mask(grid, DomainShape::UpperTriangle, 0));
    const double ratio = std::pow(norm(tri) / norm(full), 2);
    r.checks.push_back(CheckBuilder("oracle.triangle_halving",
                                    "triangle norm^2 of the antisymmetric (0,2) state over its square norm^2",
                                    "trapezoidal quadrature", Tag::Analytic)
                           .grid(sq.describe())
                           .done(ratio, 0.5, "triangle_halving", Compare::AbsDiff));
  } else {
    r.checks.push_back(CheckBuilder("oracle.separable_sums", "2D separable eigenvalues against 1D sums",
                                    "separable limit of the model", Tag::Numerical)
                           .skip("fewer than three bound 1D levels"));
  }
  return r;
}

Report suite_intertwining(const SuiteConfig& config) {
  const double a_cfg = resolve_a(config, -1.0);
  const ModelParams p = ModelParams::make(config.A, config.alpha, a_cfg);
  Report r;
  r.suite = "intertwining";
  add_params(r, p);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> pos(-1.0, 8.0);
  std::uniform_real_distribution<double> shift(-3.0, 3.0);
  const SuperchargeCoefficients co(p);
  const double alpha = p.alpha();

  double cplus = 0.0;
  double cminus = 0.0;
  double bdiff = 0.0;
  double vdiff = 0.0;
  double adj = 0.0;
  const auto v0 = potential(Branch::H0, p);
  const auto v1 = potential(Branch::H1, p);
  const auto qadj = adjoint(supercharge(Sign::Plus, p));
  int taken = 0;
  while (taken < 100) {
    const double x1 = pos(rng);
    const double x2 = pos(rng);
    if (std::abs(x1 - x2) < 0.5) continue;
    const double xp = x1 + x2;
    const double xm = x1 - x2;
    const double d = shift(rng);
    // same x_- with shifted x_+, same x_+ with shifted x_- (kept off the diagonal)
    const double xm2 = xm + (xm > 0 ? std::abs(d) : -std::abs(d));
    const auto cp_at = [&](double sp, double sm) {
      return co.c1(0.5 * (sp + sm), 0.5 * (sp - sm)).v - co.c2(0.5 * (sp + sm), 0.5 * (sp - sm)).v;
    };
    const auto cm_at = [&](double sp, double sm) {
      return co.c1(0.5 * (sp + sm), 0.5 * (sp - sm)).v + co.c2(0.5 * (sp + sm), 0.5 * (sp - sm)).v;
    };
    cplus = std::max(cplus, std::abs(cp_at(xp, xm) - cp_at(xp, xm2)));
    cminus = std::max(cminus, std::abs(cm_at(xp, xm) - cm_at(xp + d, xm)) / std::max(1.0, std::abs(cm_at(xp, xm))));

    const double b = co.b(x1, x2).v;
    const double expected = 0.25 * co.c_plus(xp) * co.c_minus(xm) - p.morse.potential(x1) + p.morse.potential(x2);
    bdiff = std::max(bdiff, std::abs(b - expected) / std::max(1.0, std::abs(b)));

    const double dv = v0.value(x1, x2) - v1.value(x1, x2);
    const double cprime = co.c_plus_prime(xp) + co.c_minus_prime(xm);
    vdiff = std::max(vdiff, std::abs(dv - cprime) / std::max(1.0, std::abs(dv)));

    // Hand expansion: C1 = (C+ + C-)/2, C2 = (C- - C+)/2, with x_- = x1 - x2,
    // d1 C1 + d2 C2 = C-'/2 - C-'/2 = 0, so Q- = d1^2 - d2^2 - C1 d1 - C2 d2 + B.
    const double s = 1.0 / std::sinh(0.5 * alpha * xm);
    const double dcm = 4.0 * p.a * alpha * (-0.5 * alpha * s * s);
    const double div = 0.5 * dcm - 0.5 * dcm;
    const double hc1 = -0.5 * (co.c_plus(xp) + co.c_minus(xm));
    const double hc2 = -0.5 * (co.c_minus(xm) - co.c_plus(xp));
    const double hb = b - div;
    adj = std::max({adj, std::abs(qadj.c1(x1, x2).v - hc1), std::abs(qadj.c2(x1, x2).v - hc2),
                    std::abs(qadj.b(x1, x2).v - hb) / std::max(1.0, std::abs(hb))});
    ++taken;
  }
  r.checks.push_back(CheckBuilder("model2d.cplus_profile", "max change of C+ = C1 - C2 under shifts of x_-",
                                  "supercharge coefficient profiles", Tag::Analytic)
                         .grid("100 random points")
                         .done(cplus, 0.0, "roundoff", Compare::AtMost));
  r.checks.push_back(CheckBuilder("model2d.cminus_profile",
                                  "max relative change of C- = C1 + C2 under shifts of x_+",
                                  "supercharge coefficient profiles", Tag::Analytic)
                         .grid("100 random points")
                         .done(cminus, 0.0, "roundoff", Compare::AtMost));
  r.checks.push_back(CheckBuilder("model2d.b_identity",
                                  "B - (C+ C- / 4 + f1(x1) + f2(x2)) relative to max(|B|, 1)",
                                  "zeroth-order part of the supercharge", Tag::Analytic)
                         .grid("100 random points")
                         .done(bdiff, 0.0, "roundoff", Compare::AtMost));
  r.checks.push_back(CheckBuilder("model2d.potential_difference",
                                  "V0 - V1 - (C+' + C-') relative to max(|V0 - V1|, 1)",
                                  "partner potentials", Tag::Analytic)
                         .grid("100 random points")
                         .done(vdiff, 0.0, "roundoff", Compare::AtMost));
  r.checks.push_back(CheckBuilder("operators.adjoint_expansion",
                                  "adjoint(Q+) coefficients against the hand-differentiated Q- expansion",
                                  "formal adjoint of the supercharge", Tag::Analytic)
                         .grid("100 random points")
                         .done(adj, 0.0, "roundoff", Compare::AtMost));

  const auto bumps = random_bumps(config.seed, 10);
  {
    const Grid2D grid = Grid2D::square(kBumpLo, kBumpHi, 101);
    const SampledField f = sample(bump_field(bumps[0]), grid);
    const SampledField g = sample(bump_field(bumps[1]), grid);
    const auto qp = supercharge(Sign::Plus, p);
    const double s1 = 0.7;
    const double s2 = -1.3;
    const SampledField lhs = apply_grid(qp, lincomb(s1, f, s2, g));
    const SampledField rhs = lincomb(s1, apply_grid(qp, f), s2, apply_grid(qp, g));
    const double lin = norm(lincomb(1.0, lhs, -1.0, rhs)) / norm(rhs);
    r.checks.push_back(CheckBuilder("operators.linearity",
                                    "||Q+(s f + t g) - s Q+ f - t Q+ g|| / ||s Q+ f + t Q+ g||",
                                    "grid operator application", Tag::Analytic)
                           .grid("square [-1, 11], 101 points")
                           .done(lin, 0.0, "roundoff", Compare::AtMost));
  }
  {
    const std::vector<int> levels = {101, 201, 401};
    std::vector<double> hs;
    for (int n : levels) hs.push_back((kBumpHi - kBumpLo) / (n - 1));
    std::vector<double> errs;
    for (int n : levels) errs.push_back(analytic_vs_grid(p, bumps[0], n));
    const auto fit = fit_order(hs, errs);
    r.checks.push_back(CheckBuilder("operators.analytic_vs_grid",
                                    "order of apply_grid(Q+) against pointwise Q+ on a Gaussian bump",
                                    "grid operator application", Tag::Numerical)
                           .grid("square [-1, 11], 101, 201, 401 points")
                           .trend(errs)
                           .order(fit.order)
                           .done(fit.order.value_or(0.0), 2.0, "order_min", Compare::AtLeast));
  }

  std::vector<double> couplings = {a_cfg, -0.5, -1.0};
  std::sort(couplings.begin(), couplings.end());
  couplings.erase(std::unique(couplings.begin(), couplings.end()), couplings.end());
  const std::vector<int> levels = {101, 201, 401};
  std::vector<double> hs;
  for (int n : levels) hs.push_back((kBumpHi - kBumpLo) / (n - 1));
  for (double a : couplings) {
    const ModelParams pa = ModelParams::make(config.A, config.alpha, a);
    double worst_order = std::numeric_limits<double>::infinity();
    std::vector<double> worst_trend(levels.size(), 0.0);
    for (const Bump& b : bumps) {
      std::vector<double> errs;
      for (int n : levels) errs.push_back(intertwining_residual(pa, b, n));
      for (std::size_t i = 0; i < errs.size(); ++i) worst_trend[i] = std::max(worst_trend[i], errs[i]);
      const auto fit = fit_order(hs, errs);
      worst_order = std::min(worst_order, fit.exact ? std::numeric_limits<double>::infinity() : *fit.order);
    }
    r.checks.push_back(CheckBuilder("intertwining.residual[a=" + fmt(a) + "]",
                                    "minimum order of ||(H0 Q+ - Q+ H1) g|| / ||g|| over 10 random "
                                    "off-diagonal Gaussian bumps",
                                    "intertwining relation H0 Q+ = Q+ H1", Tag::Numerical)
                           .grid("square [-1, 11], 101, 201, 401 points")
                           .trend(worst_trend)
                           .order(worst_order)
                           .done(worst_order, 2.0, "order_min", Compare::AtLeast));
  }
  return r;
}

Report suite_zeromodes(const SuiteConfig& config) {
  const ModelParams p = ModelParams::make(config.A, config.alpha, resolve_a(config, -1.0));
  Report r;
  r.suite = "zeromodes";
  add_params(r, p);
  const auto adm = qes::admissible_indices(p);
  const auto [lo, hi] = resolve_domain(config, kZeroModeLo, kZeroModeHi);
  const int fine = resolve_points(config, 800);
  const std::vector<int> levels = {fine / 4, fine / 2, fine};
  if (adm.indices.empty()) {
    for (const char* id : {"zeromodes.residual", "zeromodes.exchange_symmetry", "zeromodes.diagonal",
                           "zeromodes.norm_stability"})
      r.checks.push_back(CheckBuilder(id, "zero-mode property", "zero modes of Q+", Tag::Numerical)
                             .skip(adm.diagnostic));
    return r;
  }
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> pos(-1.0, 8.0);
  for (int n : adm.indices) {
    const std::string tag = "[n=" + std::to_string(n) + "]";
    std::vector<double> hs;
    std::vector<double> errs;
    for (int pts : levels) {
      hs.push_back((hi - lo) / (pts - 1));
      errs.push_back(zero_mode_residual(p, n, pts, lo, hi));
    }
    const auto fit = fit_order(hs, errs);
    r.checks.push_back(CheckBuilder("zeromodes.residual" + tag, "order of ||Q+ Omega_n|| / ||Omega_n|| on the grid",
                                    "zero modes of Q+", Tag::Numerical)
                           .grid("triangle [" + fmt(lo) + ", " + fmt(hi) + "], " + std::to_string(levels[0]) +
                                 ", " + std::to_string(levels[1]) + ", " + std::to_string(levels[2]) + " points")
                           .trend(errs)
                           .order(fit.order)
                           .done(fit.order.value_or(0.0), 2.0, "order_min", Compare::AtLeast));

    const AnalyticField om = qes::zero_mode(n, p);
    double asym = 0.0;
    double near = 0.0;
    double peak = 0.0;
    for (int t = 0; t < 200; ++t) {
      const double x1 = pos(rng);
      const double x2 = pos(rng);
      if (on_diagonal(x1, x2)) continue;
      const double u = om.value(x1, x2);
      const double v = om.value(x2, x1);
      asym = std::max(asym, std::abs(u - v) / std::max(std::abs(u), 1e-300));
      peak = std::max(peak, std::abs(u));
      near = std::max(near, std::abs(om.value(x1, x1 + 1e-6)));
      near = std::max(near, std::abs(om(x1, x1).v));
    }
    r.checks.push_back(CheckBuilder("zeromodes.exchange_symmetry" + tag,
                                    "max relative |Omega_n(x1, x2) - Omega_n(x2, x1)|", "zero modes of Q+",
                                    Tag::Analytic)
                           .grid("200 random points in [-1, 8]^2")
                           .done(asym, 0.0, "roundoff", Compare::AtMost));
    r.checks.push_back(CheckBuilder("zeromodes.diagonal" + tag,
                                    "max |Omega_n| on and 1e-6 off the diagonal relative to its sampled peak",
                                    "zero modes of Q+", Tag::Analytic)
                           .grid("200 random diagonal points in [-1, 8]")
                           .done(near / peak, 0.0, "roundoff", Compare::AtMost));

    const double h = (hi - lo) / (fine - 1);
    const double grow = 0.1 * (hi - lo);
    const int big = static_cast<int>(std::lround((hi - lo + 2 * grow) / h)) + 1;
    const auto s1 = oracle::GridSpec::triangle(lo, hi, fine);
    const auto s2 = oracle::GridSpec::triangle(lo - grow, hi + grow, big);
    const auto norm_on = [&](const oracle::GridSpec& s) {
      const Grid2D g = s.grid();
      return norm(restrict_to(sample(om, g), domain_mask(g, DomainShape::UpperTriangle, 1)));
    };
    const double n1 = norm_on(s1);
    const double n2 = norm_on(s2);
    const double change = std::abs(n2 * n2 - n1 * n1) / (n1 * n1);
    r.checks.push_back(CheckBuilder("zeromodes.norm_stability" + tag,
                                    "relative change of ||Omega_n||^2 when the domain grows by 20%",
                                    "normalizability of zero modes", Tag::Numerical)
                           .grid(s1.describe() + " vs " + s2.describe())
                           .trend({n1 * n1, n2 * n2})
                           .done(change, 0.0, "norm_stability", Compare::AtMost));
  }
  return r;
}

Report suite_qes(const SuiteConfig& config) {
  const ModelParams p = ModelParams::make(config.A, config.alpha, resolve_a(config, -1.0));
  Report r;
  r.suite = "qes";
  add_params(r, p);
  const auto adm = qes::admissible_indices(p);
  const char* ids[] = {"qes.galerkin_diagonal", "qes.off_triangle", "qes.closure", "qes.gram_condition",
                       "qes.oracle_match",      "qes.offset_hypothesis", "qes.eigen_residual",
                       "qes.orthogonality",     "qes.shape_descend"};
  if (adm.indices.empty()) {
    for (const char* id : ids)
      r.checks.push_back(CheckBuilder(id, "QES construction", "quasi-exactly solvable sector", Tag::Numerical)
                             .skip(adm.diagnostic));
    return r;
  }
  const auto [lo, hi] = resolve_domain(config, kZeroModeLo, kZeroModeHi);
  const int fine = resolve_points(config, 800);
  const auto spec = oracle::GridSpec::triangle(lo, hi, fine);
  const auto cm = qes::coupling_matrix(p, spec, fine / 2);
  const auto table = qes::qes_spectrum(p);
  r.metadata.emplace_back("orientation", qes::to_string(cm.orientation));
  r.metadata.emplace_back("grid", cm.grid);

  const std::string grid_text = spec.describe() + " with " + std::to_string(fine / 2) + "-point companion";
  for (std::size_t i = 0; i < cm.indices.size(); ++i) {
    const double ek = table.levels[i].energy;
    const double rel = std::abs(cm.c(i, i) - ek) / std::abs(ek);
    auto b = CheckBuilder("qes.galerkin_diagonal[k=" + std::to_string(cm.indices[i]) + "]",
                          "relative deviation of the Galerkin diagonal from E_k",
                          "QES energies E_k = -2 alpha^2 s_k (s_k + 2a)", Tag::Numerical)
                 .grid(grid_text)
                 .detail("E_k", fmt(ek))
                 .detail("C_kk", fmt(cm.c(i, i)));
    if (cm.c_fine && cm.c_coarse) b.trend({std::abs((*cm.c_coarse)(i, i) - ek) / std::abs(ek),
                                           std::abs((*cm.c_fine)(i, i) - ek) / std::abs(ek), rel});
    r.checks.push_back(b.done(rel, 0.0, "galerkin_diag_rel", Compare::AtMost));
  }
  r.checks.push_back(CheckBuilder("qes.off_triangle",
                                  "largest entry of the vanishing triangle of C relative to max |C|",
                                  "triangular action of H1 on zero modes", Tag::Numerical)
                         .grid(grid_text)
                         .detail("orientation", qes::to_string(cm.orientation))
                         .done(cm.off_triangle, 0.0, "off_triangle", Compare::AtMost));
  r.checks.push_back(CheckBuilder("qes.closure",
                                  "max ||H1 Omega_n - sum_k c_nk Omega_k|| / ||H1 Omega_n||",
                                  "closure of the zero-mode space under H1", Tag::Numerical)
                         .grid(spec.describe())
                         .done(cm.reconstruction_error, 0.0, "closure", Compare::AtMost));
  r.checks.push_back(CheckBuilder("qes.gram_condition", "condition number of the equilibrated Gram matrix",
                                  "zero-mode basis", Tag::Numerical)
                         .grid(spec.describe())
                         .done(cm.gram_condition, 0.0, "gram_condition", Compare::AtMost));

  // oracle comparison of both energy hypotheses
  std::vector<double> ek;
  for (const auto& l : table.levels) ek.push_back(l.energy);
  const double off = p.energy_offset();
  const double e_lo = std::min(*std::min_element(ek.begin(), ek.end()), *std::min_element(ek.begin(), ek.end()) + off);
  const double e_hi = std::max(*std::max_element(ek.begin(), ek.end()), *std::max_element(ek.begin(), ek.end()) + off);
  const auto ospec = oracle::GridSpec::triangle(-2.0, 16.0, 400);
  oracle::SolverOptions opts;
  opts.seed = config.seed;
  const auto bs = oracle::bound_spectrum(potential(Branch::H1, p), ospec, e_lo - 2.0, e_hi + 1.0, 200, {}, opts);
  const auto levels = bound_energies(bs, 0.0);
  double worst = 0.0;
  double worst_shifted = std::numeric_limits<double>::infinity();
  for (double e : ek) {
    worst = std::max(worst, nearest_distance(e, levels));
    worst_shifted = std::min(worst_shifted, nearest_distance(e + off, levels));
  }
  r.checks.push_back(CheckBuilder("qes.oracle_match",
                                  "max distance of E_k to the nearest bound oracle level of H1(a)",
                                  "QES energies E_k = -2 alpha^2 s_k (s_k + 2a)", Tag::Numerical)
                         .grid(bs.grid + (bs.companion_grid ? " + " + *bs.companion_grid : ""))
                         .detail("E_k", join(ek))
                         .detail("oracle bound levels", join(levels))
                         .done(worst, 0.0, "level_match", Compare::AtMost));
  r.checks.push_back(CheckBuilder("qes.offset_hypothesis",
                                  "min distance of E_k + 4 a^2 alpha^2 to the oracle levels; the shifted "
                                  "hypothesis is rejected when this exceeds the match tolerance",
                                  "energy reference of E_k", Tag::Numerical)
                         .grid(bs.grid)
                         .detail("hypothesis E_k", worst <= tolerance("level_match") ? "matches" : "fails")
                         .detail("hypothesis E_k + 4 a^2 alpha^2",
                                 worst_shifted <= tolerance("level_match") ? "matches" : "rejected")
                         .done(worst_shifted, 0.0, "level_match", Compare::AtLeast));

  const auto states = qes::qes_eigenfunctions(p, spec, cm);
  double worst_res = 0.0;
  std::vector<double> res;
  for (const auto& s : states) {
    worst_res = std::max(worst_res, s.residual);
    res.push_back(s.residual);
  }
  r.checks.push_back(CheckBuilder("qes.eigen_residual", "max ||(H1 - E_k) psi_k|| / ||psi_k|| on the grid",
                                  "QES eigenfunctions", Tag::Numerical)
                         .grid(spec.describe())
                         .detail("residuals", join(res))
                         .done(worst_res, 0.0, "eigen_residual", Compare::AtMost));
  double worst_overlap = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = i + 1; j < states.size(); ++j)
      worst_overlap = std::max(worst_overlap, std::abs(inner_product(states[i].field, states[j].field)));
  r.checks.push_back(CheckBuilder("qes.orthogonality", "max |<psi_j, psi_k>| for j != k",
                                  "QES eigenfunctions", Tag::Numerical)
                         .grid(spec.describe())
                         .done(worst_overlap, 0.0, "orthogonality", Compare::AtMost));

  const ModelParams lower = ModelParams::make(config.A, config.alpha, p.a - 0.5);
  const auto cml = qes::coupling_matrix(lower, spec, fine / 2);
  const auto sl = qes::qes_eigenfunctions(lower, spec, cml);
  double worst_desc = 0.0;
  std::vector<double> energies;
  std::vector<double> dres;
  for (const auto& s : sl) {
    const auto f = qes::qes_state_field(lower, cml.indices, s.coefficients);
    const auto d = qes::shape_descend(f, spec, s.energy, p, 1);
    worst_desc = std::max(worst_desc, d.residual);
    energies.push_back(d.energy);
    dres.push_back(d.residual);
  }
  r.checks.push_back(CheckBuilder("qes.shape_descend",
                                  "max ||(H1(a) - E) Q-(a) psi|| / ||Q-(a) psi|| for QES states of H1(a - 1/2)",
                                  "shape-invariant chain of partner Hamiltonians", Tag::Numerical)
                         .grid(spec.describe())
                         .detail("energies", join(energies))
                         .detail("residuals", join(dres))
                         .done(worst_desc, 0.0, "eigen_residual", Compare::AtMost));
  return r;
}

Report suite_exact(const SuiteConfig& config) {
  const ModelParams p = ModelParams::make(config.A, config.alpha, resolve_a(config, exact::kSeparableA));
  Report r;
  r.suite = "exact";
  add_params(r, p);
  const char* ids[] = {"exact.sym_identity", "exact.selection", "exact.qminus_window",
                       "exact.norm_ratio",   "exact.vanishing", "exact.partner_symmetry",
                       "exact.reverse_map",  "exact.transport", "exact.operator_identity",
                       "exact.separable_oracle", "exact.partner_oracle", "exact.excluded_levels"};
  if (p.a != exact::kSeparableA) {
    for (const char* id : ids)
      r.checks.push_back(CheckBuilder(id, "separable branch", "separable point a = -1/2", Tag::Numerical)
                             .skip("exact branch requires a = -0.5 (got a = " + fmt(p.a) + ")"));
    return r;
  }
  const int bound = count_bound_states(p.morse);
  const double alpha4 = std::pow(p.alpha(), 4);

  double worst_identity = 0.0;
  int mismatches = 0;
  for (int n = 0; n < bound; ++n)
    for (int m = n; m < bound; ++m) {
      const double rr = exact::sym_eigenvalue(n, m, p);
      const double rl = exact::sym_eigenvalue_from_levels(n, m, p);
      worst_identity = std::max(worst_identity, std::abs(rr - rl) / std::max(alpha4, std::abs(rr)));
      if ((rr > 0) != (std::abs(n - m) > 1)) ++mismatches;
    }
  r.checks.push_back(CheckBuilder("exact.sym_identity",
                                  "max |r(n,m) - [(eps_n - eps_m)^2 + 2 alpha^2 (eps_n + eps_m) + alpha^4]| "
                                  "relative to max(|r|, alpha^4) over all bound pairs",
                                  "symmetry-operator eigenvalue", Tag::Analytic)
                         .done(worst_identity, 0.0, "roundoff", Compare::AtMost));
  r.checks.push_back(CheckBuilder("exact.selection", "pairs where r(n,m) > 0 disagrees with |n - m| > 1",
                                  "selection rule of the partner spectrum", Tag::Analytic)
                         .done(mismatches, 0.0, "roundoff", Compare::AtMost));
  r.checks.push_back(CheckBuilder("exact.qminus_window",
                                  "a = -1/2 lies outside the window where Q- zero modes are normalizable",
                                  "zero modes of Q-", Tag::Analytic)
                         .detail("window edge", fmt(qminus_window_edge()))
                         .done(p.qminus_zero_mode_window() ? 1.0 : 0.0, 0.0, "roundoff", Compare::AbsDiff));

  const auto [lo, hi] = resolve_domain(config, -2.0, 12.0);
  const int fine = resolve_points(config, 800);
  const auto spec = oracle::GridSpec::square(lo, hi, fine);
  for (int n = 0; n < bound; ++n)
    for (int m = n + 1; m < bound; ++m) {
      const std::string tag = "[" + std::to_string(n) + "," + std::to_string(m) + "]";
      const auto ps = exact::partner_state(n, m, p, spec);
      if (ps.vanishing) {
        bool decreasing = true;
        for (std::size_t i = 1; i < ps.ratio_history.size(); ++i)
          decreasing = decreasing && ps.ratio_history[i] < ps.ratio_history[i - 1];
        auto b = CheckBuilder("exact.vanishing" + tag,
                              "||Q+ Psi^A||^2 / ||Psi^A||^2 for a pair with r = 0; must decrease under refinement",
                              "vanishing supercharge images", Tag::Numerical)
                     .grid(spec.describe())
                     .trend(ps.ratio_history)
                     .detail("decreasing", decreasing ? "yes" : "no");
        Check c = b.done(ps.norm_ratio, 0.0, "vanishing_ratio", Compare::AtMost);
        c.pass = c.pass && decreasing;
        r.checks.push_back(std::move(c));
        continue;
      }
      r.checks.push_back(CheckBuilder("exact.norm_ratio" + tag,
                                      "||Q+ Psi^A||^2 / ||Psi^A||^2 against r(n,m)",
                                      "norm identity of the partner states", Tag::Numerical)
                             .grid(spec.describe())
                             .done(ps.norm_ratio, ps.r, "norm_ratio_rel", Compare::RelDiff));
      r.checks.push_back(CheckBuilder("exact.partner_symmetry" + tag,
                                      "odd part of Q+ Psi^A under x1 <-> x2 relative to its norm",
                                      "only exchange-symmetric partner states survive", Tag::Published)
                             .grid(spec.describe())
                             .done(ps.antisymmetric_fraction, 0.0, "symmetry_fraction", Compare::AtMost));
      r.checks.push_back(CheckBuilder("exact.reverse_map" + tag,
                                      "||Q- psi0 - sqrt(r) psiA|| / sqrt(r) for unit-norm states",
                                      "Q- maps partner states back to normalizable states", Tag::Numerical)
                             .grid(spec.describe())
                             .done(exact::reverse_map_error(ps, p), 0.0, "reverse_map", Compare::AtMost));
      r.checks.push_back(CheckBuilder("exact.transport" + tag, "||(H0 - E) psi0|| / ||psi0||",
                                      "intertwining carries eigenstates to the partner", Tag::Numerical)
                             .grid(spec.describe())
                             .detail("E", fmt(ps.energy))
                             .done(ps.transport_residual, 0.0, "transport", Compare::AtMost));
    }

  for (auto [n, m] : std::vector<std::pair<int, int>>{{0, 2}, {1, 3}, {0, 3}}) {
    if (m >= bound) continue;
    const std::string tag = "[" + std::to_string(n) + "," + std::to_string(m) + "]";
    const double band = exact::symmetry_identity_error(n, m, p, spec, 1.0);
    const double anti = exact::symmetry_identity_error_antisymmetric(n, m, p, spec);
    r.checks.push_back(CheckBuilder("exact.operator_identity" + tag,
                                    "||Q- Q+ f - r f|| / (max(|r|, 1) ||f||) for f = eta_n(x1) eta_m(x2), "
                                    "|x1 - x2| >= 1",
                                    "symmetry operator Q- Q+", Tag::Numerical)
                           .grid(spec.describe())
                           .detail("antisymmetric combination", fmt(anti))
                           .done(std::max(band, anti), 0.0, "operator_identity", Compare::AtMost));
  }

  oracle::SolverOptions opts;
  opts.seed = config.seed;
  const double off = p.energy_offset();
  {
    const auto table = exact::separable_spectrum(p);
    std::vector<double> predicted;
    for (const auto& l : table.levels)
      for (int d = 0; d < l.degeneracy; ++d) predicted.push_back(l.energy);
    const auto ospec = oracle::GridSpec::square(-2.0, 16.0, 400);
    const double top = predicted.back();
    const auto bs = oracle::bound_spectrum(potential(Branch::H1, p), ospec, predicted.front() - 2.0 + off,
                                           top + 0.5 + off, 200, {}, opts);
    const auto found = bound_energies(bs, off);
    double worst = 0.0;
    const std::size_t shared = std::min(found.size(), predicted.size());
    for (std::size_t i = 0; i < shared; ++i) worst = std::max(worst, std::abs(found[i] - predicted[i]));
    if (found.size() != predicted.size()) worst = std::numeric_limits<double>::infinity();
    r.checks.push_back(CheckBuilder("exact.separable_oracle",
                                    "max |oracle - eps_n - eps_m| over the separable table of H1(-1/2), "
                                    "degeneracies included",
                                    "separable spectrum", Tag::Numerical)
                           .grid(bs.grid + (bs.companion_grid ? " + " + *bs.companion_grid : ""))
                           .detail("predicted", join(predicted))
                           .detail("oracle", join(found))
                           .done(worst, 0.0, "oracle_2d_abs", Compare::AtMost));
  }
  {
    const auto table = exact::partner_spectrum(p);
    const auto all = exact::separable_spectrum(p);
    std::vector<double> predicted = table.energies();
    std::vector<double> excluded;
    for (const auto& l : all.levels) {
      const bool kept = std::any_of(table.levels.begin(), table.levels.end(),
                                    [&](const SpectrumLevel& t) { return t.energy == l.energy; });
      if (!kept) excluded.push_back(l.energy);
    }
    const auto ospec = oracle::GridSpec::triangle(-2.0, 16.0, 400);
    const double lo_e = all.levels.front().energy - 2.0;
    const double hi_e = predicted.back() + 0.5;
    const auto bs = oracle::bound_spectrum(potential(Branch::H0, p), ospec, lo_e + off, hi_e + off, 200, {}, opts);
    const auto found = bound_energies(bs, off);
    double worst = 0.0;
    for (double e : predicted) worst = std::max(worst, nearest_distance(e, found));
    if (found.size() != predicted.size()) worst = std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    std::vector<double> in_range;
    for (double e : excluded)
      if (e < hi_e) {
        gap = std::min(gap, nearest_distance(e, found));
        in_range.push_back(e);
      }
    const std::string grid = bs.grid + (bs.companion_grid ? " + " + *bs.companion_grid : "");
    r.checks.push_back(CheckBuilder("exact.partner_oracle",
                                    "max distance of the retained partner levels to the bound oracle levels of "
                                    "H0(-1/2), counts equal",
                                    "partner spectrum |n - m| > 1", Tag::Numerical)
                           .grid(grid)
                           .detail("predicted", join(predicted))
                           .detail("oracle", join(found))
                           .done(worst, 0.0, "oracle_2d_abs", Compare::AtMost));
    r.checks.push_back(CheckBuilder("exact.excluded_levels",
                                    "min distance of excluded energies to the bound oracle levels of H0(-1/2)",
                                    "partner spectrum |n - m| > 1", Tag::Numerical)
                           .grid(grid)
                           .detail("excluded", join(in_range))
                           .done(gap, 0.0, "excluded_gap", Compare::AtLeast));
  }
  return r;
}

Report suite_hierarchy(const SuiteConfig& config) {
  const ModelParams base = ModelParams::make(config.A, config.alpha, exact::kSeparableA);
  const int k = config.k;
  if (k < 0) throw Error(ErrorKind::InvalidParameter, "hierarchy depth k must be >= 0");
  Report r;
  r.suite = "hierarchy";
  add_params(r, base);
  r.metadata.emplace_back("k", std::to_string(k));
  const double alpha4 = std::pow(base.alpha(), 4);

  const auto [lo, hi] = resolve_domain(config, -2.0, 14.0);
  const auto spec = oracle::GridSpec::square(lo, hi, resolve_points(config, 400));
  const auto res = exact::hierarchy_spectrum(k, base, spec);
  r.metadata.emplace_back("a_k", fmt(res.a_k));
  r.metadata.emplace_back("computed_rule", res.computed_rule);
  r.metadata.emplace_back("stated_rule", res.stated_rule);

  double worst_closed = 0.0;
  for (const auto& q : res.pairs) {
    const double d = q.m - q.n;
    const double sig = base.morse.s(q.n) + base.morse.s(q.m);
    const double closed = alpha4 * (d * d - (k + 1.0) * (k + 1.0)) * (sig * sig - (k + 1.0) * (k + 1.0));
    const double last = q.factors.empty() ? 0.0 : q.factors.back();
    worst_closed = std::max(worst_closed, std::abs(last - closed) / std::max(alpha4, std::abs(closed)));
  }
  r.checks.push_back(CheckBuilder("hierarchy.recursion_closed_form",
                                  "last recursion factor against alpha^4 (d^2 - (k+1)^2)(sigma^2 - (k+1)^2)",
                                  "hierarchy norm recursion", Tag::Analytic)
                         .done(worst_closed, 0.0, "roundoff", Compare::AtMost));

  const auto k0 = exact::hierarchy_spectrum(0, base);
  const auto partner = exact::partner_spectrum(base);
  double k0_diff = k0.table.levels.size() == partner.levels.size() ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; std::isfinite(k0_diff) && i < partner.levels.size(); ++i) {
    const auto& a = k0.table.levels[i];
    const auto& b = partner.levels[i];
    if (a.n != b.n || a.m != b.m) k0_diff = std::numeric_limits<double>::infinity();
    else k0_diff = std::max(k0_diff, std::abs(a.energy - b.energy));
  }
  r.checks.push_back(CheckBuilder("hierarchy.k0_reduces", "k = 0 retained set and energies against the partner spectrum",
                                  "hierarchy of partner Hamiltonians", Tag::Analytic)
                         .done(k0_diff, 0.0, "roundoff", Compare::AtMost));

  bool nested = true;
  if (k > 0) {
    const auto prev = exact::hierarchy_spectrum(k - 1, base);
    for (const auto& q : res.pairs) {
      if (!q.retained) continue;
      const auto it = std::find_if(prev.pairs.begin(), prev.pairs.end(),
                                   [&](const exact::HierarchyPair& p) { return p.n == q.n && p.m == q.m; });
      nested = nested && it != prev.pairs.end() && it->retained;
    }
  }
  r.checks.push_back(CheckBuilder("hierarchy.nested", "retained set at k is a subset of the set at k - 1",
                                  "hierarchy of partner Hamiltonians", Tag::Analytic)
                         .done(nested ? 1.0 : 0.0, 1.0, "roundoff", Compare::AbsDiff));

  for (const auto& q : res.pairs) {
    if (!q.retained) continue;
    const std::string tag = "[" + std::to_string(q.n) + "," + std::to_string(q.m) + "]";
    if (!q.grid_ratio) {
      r.checks.push_back(CheckBuilder("hierarchy.grid_norm" + tag, "chain norm ratio on the grid",
                                      "hierarchy norm recursion", Tag::Numerical)
                             .skip("grid chain not evaluated"));
      continue;
    }
    r.checks.push_back(CheckBuilder("hierarchy.grid_norm" + tag,
                                    "||Q+(a_k)...Q+(a_0) Psi^A||^2 / ||Psi^A||^2 against the recursion product",
                                    "hierarchy norm recursion", Tag::Numerical)
                           .grid(spec.describe())
                           .done(*q.grid_ratio, q.norm_factor, "norm_ratio_rel", Compare::RelDiff));
  }

  // oracle adjudication of the two retention rules
  const ModelParams pk = ModelParams::make(config.A, config.alpha, res.a_k);
  const double off = pk.energy_offset();
  std::vector<double> computed;
  std::vector<double> stated;
  std::vector<double> all;
  for (const auto& q : res.pairs) {
    all.push_back(q.energy);
    if (q.retained) computed.push_back(q.energy);
    if (q.retained_stated) stated.push_back(q.energy);
  }
  std::sort(computed.begin(), computed.end());
  std::sort(stated.begin(), stated.end());
  if (all.empty()) return r;
  const double e_lo = *std::min_element(all.begin(), all.end()) - 2.0;
  const double e_top = computed.empty() ? (stated.empty() ? e_lo + 1.0 : stated.back()) : computed.back();
  const double e_hi = std::max(e_top, stated.empty() ? e_top : stated.back()) + 0.5;
  oracle::SolverOptions opts;
  opts.seed = config.seed;
  const auto ospec = oracle::GridSpec::triangle(-2.0, 16.0, 400);
  const auto bs = oracle::bound_spectrum(potential(Branch::H0, pk), ospec, e_lo + off, e_hi + off, 200, {}, opts);
  const auto found = bound_energies(bs, off);
  const auto mismatch = [&](const std::vector<double>& predicted) {
    if (predicted.size() != found.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) worst = std::max(worst, std::abs(predicted[i] - found[i]));
    return worst;
  };
  const double dc = mismatch(computed);
  const double ds = mismatch(stated);
  const double tol = tolerance("level_match");
  std::string verdict;
  if (dc <= tol && ds > tol) verdict = res.computed_rule + " (recursion) matches the oracle";
  else if (ds <= tol && dc > tol) verdict = res.stated_rule + " (stated rule) matches the oracle";
  else if (dc <= tol && ds <= tol) verdict = "both rules match the oracle";
  else verdict = "neither rule matches the oracle";
  r.metadata.emplace_back("adjudication", verdict);
  const std::string grid = bs.grid + (bs.companion_grid ? " + " + *bs.companion_grid : "");
  r.checks.push_back(CheckBuilder("hierarchy.oracle_rule",
                                  "max level distance between the bound oracle spectrum of H0(a_k) and the "
                                  "levels retained by the recursion (counts equal)",
                                  "retention rule of the hierarchy", Tag::Numerical)
                         .grid(grid)
                         .detail("oracle", join(found))
                         .detail(res.computed_rule, join(computed) + "; distance " + fmt(dc))
                         .detail(res.stated_rule, join(stated) + "; distance " + fmt(ds))
                         .detail("verdict", verdict)
                         .done(dc, 0.0, "level_match", Compare::AtMost));
  return r;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string_view to_string(Tag tag) {
  switch (tag) {
    case Tag::Analytic: return "analytic";
    case Tag::Numerical: return "numerical";
    case Tag::Published: return "published";
  }
  return "?";
}

const std::vector<Tolerance>& tolerance_table() { return kTolerances; }

double tolerance(std::string_view id) {
  for (const auto& t : kTolerances)
    if (t.id == id) return t.value;
  throw Error(ErrorKind::InvalidParameter, "unknown tolerance id '" + std::string(id) + "'");
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.skipped || c.pass; });
}

std::string Report::to_json() const {
  json j;
  j["suite"] = suite;
  json meta = json::object();
  for (const auto& [k, v] : metadata) meta[k] = v;
  j["metadata"] = meta;
  json tol = json::object();
  for (const auto& t : kTolerances) tol[std::string(t.id)] = t.value;
  j["tolerances"] = tol;
  j["pass"] = passed();
  json arr = json::array();
  for (const auto& c : checks) {
    json o;
    o["id"] = c.id;
    o["description"] = c.description;
    o["anchor"] = c.anchor;
    o["tag"] = std::string(verify::to_string(c.tag));
    o["measured"] = number_or_null(c.measured);
    o["target"] = number_or_null(c.target);
    o["tol"] = c.tol;
    o["comparison"] = std::string(to_string(c.compare));
    o["pass"] = c.pass;
    if (!c.grid.empty()) o["grid"] = c.grid;
    if (c.order) o["order"] = number_or_null(*c.order);
    if (!c.trend.empty()) {
      json t = json::array();
      for (double x : c.trend) t.push_back(number_or_null(x));
      o["trend"] = t;
    }
    if (c.skipped) {
      o["skipped"] = true;
      o["reason"] = c.reason;
    }
    if (!c.details.empty()) {
      json d = json::object();
      for (const auto& [k, v] : c.details) d[k] = v;
      o["details"] = d;
    }
    arr.push_back(o);
  }
  j["checks"] = arr;
  return j.dump(2) + "\n";
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"intertwining", "zeromodes", "qes",
                                                 "exact",        "hierarchy", "shape",
                                                 "oracle-calibration"};
  return names;
}

Report run_suite(std::string_view name, const SuiteConfig& config) {
  if (name == "shape") return suite_shape(config);
  if (name == "oracle-calibration") return suite_oracle_calibration(config);
  if (name == "intertwining") return suite_intertwining(config);
  if (name == "zeromodes") return suite_zeromodes(config);
  if (name == "qes") return suite_qes(config);
  if (name == "exact") return suite_exact(config);
  if (name == "hierarchy") return suite_hierarchy(config);
  std::string known;
  for (const auto& s : suite_names()) known += (known.empty() ? "" : ", ") + s;
  throw Error(ErrorKind::UnknownSuite, "unknown suite '" + std::string(name) + "' (known: " + known + ")");
}

ConvergenceResult fit_order(const std::vector<double>& h, const std::vector<double>& error, double roundoff) {
  if (h.size() != error.size()) throw Error(ErrorKind::InvalidParameter, "h and error sizes differ");
  if (h.size() < 3)
    throw Error(ErrorKind::InsufficientLevels,
                "convergence study needs at least 3 grid levels (got " + std::to_string(h.size()) + ")");
  ConvergenceResult out;
  out.h = h;
  out.error = error;
  out.exact = std::all_of(error.begin(), error.end(), [&](double e) { return std::abs(e) <= roundoff; });
  if (out.exact) return out;
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(std::max(std::abs(error[i]), std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nn = static_cast<double>(n);
  out.order = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  return out;
}

ConvergenceResult convergence_study(std::string_view check_id, const std::vector<int>& points,
                                    const SuiteConfig& config) {
  if (points.size() < 3)
    throw Error(ErrorKind::InsufficientLevels,
                "convergence study needs at least 3 grid levels (got " + std::to_string(points.size()) + ")");
  const ModelParams p = ModelParams::make(config.A, config.alpha, resolve_a(config, -1.0));
  std::vector<double> hs;
  std::vector<double> errs;
  if (check_id == "intertwining.residual" || check_id == "operators.analytic_vs_grid") {
    const Bump b = random_bumps(config.seed, 1).front();
    for (int n : points) {
      hs.push_back((kBumpHi - kBumpLo) / (n - 1));
      errs.push_back(check_id == "intertwining.residual" ? intertwining_residual(p, b, n)
                                                         : analytic_vs_grid(p, b, n));
    }
  } else if (check_id == "zeromodes.residual") {
    const auto adm = qes::admissible_indices(p);
    if (adm.indices.empty()) throw Error(ErrorKind::Inadmissible, adm.diagnostic);
    for (int n : points) {
      hs.push_back((kZeroModeHi - kZeroModeLo) / (n - 1));
      errs.push_back(zero_mode_residual(p, adm.indices.front(), n));
    }
  } else if (check_id == "shape.identity") {
    // pointwise identity: the sample count plays the role of the grid
    for (int n : points) {
      hs.push_back(1.0 / n);
      const ShapeSample s = shape_identity(p, config.seed, n);
      errs.push_back(s.max_delta / std::max(1.0, s.max_scale));
    }
    return fit_order(hs, errs, 1e-14);
  } else {
    throw Error(ErrorKind::InvalidParameter, "no convergence study for check '" + std::string(check_id) + "'");
  }
  return fit_order(hs, errs);
}

}  // namespace susysep::verify
