#include "susysep/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "susysep/error.hpp"

namespace susysep::oracle {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidParameter, what);
}

bool is_2d(const GridSpec& s) { return s.shape != Shape::Interval; }

/// LDL^T factorization of H - sigma I. Eigen's simplicial LDL^T does no
/// pivoting, so an exactly vanishing pivot is handled by nudging the shift.
class ShiftedFactor {
 public:
  ShiftedFactor(const SpMat& m, double sigma, double scale) {
    SpMat id(m.rows(), m.cols());
    id.setIdentity();
    solver_.analyzePattern(m);
    double nudge = 1e-11 * std::max(1.0, scale);
    for (int attempt = 0; attempt < 6; ++attempt) {
      solver_.factorize(m - sigma * id);
      if (solver_.info() == Eigen::Success) {
        sigma_ = sigma;
        return;
      }
      sigma += nudge;
      nudge *= 10.0;
    }
    throw Error(ErrorKind::NoConvergence, "shifted factorization failed");
  }

  double sigma() const { return sigma_; }
  VectorXd solve(const VectorXd& x) const { return solver_.solve(x); }
  int negative_pivots() const {
    const VectorXd& d = solver_.vectorD();
    return static_cast<int>((d.array() < 0.0).count());
  }

 private:
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> solver_;
  double sigma_ = 0.0;
};

VectorXd random_unit(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
  return v.normalized();
}

void orthogonalize(VectorXd& w, const std::vector<VectorXd>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) w -= b.dot(w) * b;
  }
}

double residual_of(const DiscreteHamiltonian& h, const VectorXd& v, double lambda) {
  return (h.apply(v) - lambda * v).norm();
}

/// Eigenpairs of H in [lo, hi) when exactly `count` of them are known to lie
/// there. Shift-invert Lanczos about the window centre with full
/// reorthogonalization; converged vectors are locked and the iteration is
/// restarted from a fresh random vector, which also resolves degeneracies.
EigenResult window_solve(const DiscreteHamiltonian& h, double lo, double hi, int count,
                         double tol, int max_restarts, std::mt19937_64& rng) {
  EigenResult out;
  out.norm_estimate = h.norm_estimate();
  const std::size_t n = h.size();
  if (count <= 0) return out;
  const ShiftedFactor factor(h.matrix(), 0.5 * (lo + hi), out.norm_estimate);
  const double sigma = factor.sigma();
  const double slack = 1e-10 * std::max(1.0, out.norm_estimate);

  std::vector<VectorXd> locked;
  std::vector<double> locked_values;
  std::vector<double> locked_residuals;
  std::size_t m_max = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(2 * count + 30, 60)));
  double best_pending = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart <= max_restarts && static_cast<int>(locked.size()) < count; ++restart) {
    const int need = count - static_cast<int>(locked.size());
    const std::size_t m_cap = std::min(m_max, n - locked.size());
    std::vector<VectorXd> V;
    std::vector<double> alpha;
    std::vector<double> beta;
    VectorXd v = random_unit(n, rng);
    orthogonalize(v, locked);
    v.normalize();
    V.push_back(v);

    Eigen::SelfAdjointEigenSolver<MatrixXd> tri;
    auto ritz_ready = [&](std::size_t m, double beta_last) {
      MatrixXd T = MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i < m; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      tri.compute(T);
      std::vector<Eigen::Index> order(m);
      for (std::size_t i = 0; i < m; ++i) order[i] = static_cast<Eigen::Index>(i);
      std::sort(order.begin(), order.end(), [&](auto x, auto y) {
        return std::abs(tri.eigenvalues()[x]) > std::abs(tri.eigenvalues()[y]);
      });
      const double theta_max = std::abs(tri.eigenvalues()[order[0]]);
      int converged = 0;
      for (int r = 0; r < need && r < static_cast<int>(m); ++r) {
        const auto idx = order[static_cast<std::size_t>(r)];
        const double est = std::abs(beta_last * tri.eigenvectors()(static_cast<Eigen::Index>(m) - 1, idx));
        if (est <= 1e-11 * theta_max) ++converged;
      }
      return converged >= need;
    };

    std::size_t m = 0;
    bool done = false;
    while (!done) {
      VectorXd w = factor.solve(V[m]);
      ++out.iterations;
      const double a = V[m].dot(w);
      alpha.push_back(a);
      w -= a * V[m];
      if (m > 0) w -= beta[m - 1] * V[m - 1];
      orthogonalize(w, V);
      orthogonalize(w, locked);
      const double b = w.norm();
      beta.push_back(b);
      ++m;
      const bool exhausted = m >= m_cap || b <= 1e-14 * std::abs(a);
      if (exhausted || m % 5 == 0) {
        if (ritz_ready(m, b) || exhausted) done = true;
      }
      if (!done) V.push_back(w / b);
    }

    std::vector<Eigen::Index> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = static_cast<Eigen::Index>(i);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) {
      return std::abs(tri.eigenvalues()[x]) > std::abs(tri.eigenvalues()[y]);
    });
    int newly = 0;
    for (std::size_t r = 0; r < order.size() && r < static_cast<std::size_t>(need) + 2; ++r) {
      const auto idx = order[r];
      VectorXd x = VectorXd::Zero(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < m; ++i) x += tri.eigenvectors()(static_cast<Eigen::Index>(i), idx) * V[i];
      orthogonalize(x, locked);
      const double xn = x.norm();
      if (xn < 0.5) continue;
      x /= xn;
      const double lambda = x.dot(h.apply(x));
      if (lambda < lo - slack || lambda >= hi + slack) continue;
      const double res = residual_of(h, x, lambda);
      if (res <= tol) {
        locked.push_back(x);
        locked_values.push_back(lambda);
        locked_residuals.push_back(res);
        ++newly;
        if (static_cast<int>(locked.size()) >= count) break;
      } else {
        best_pending = std::min(best_pending, res);
      }
    }
    if (newly == 0) m_max = std::min<std::size_t>(n, 2 * m_max);
  }

  if (static_cast<int>(locked.size()) < count) {
    std::ostringstream msg;
    msg << "found " << locked.size() << " of " << count << " eigenpairs in [" << lo << ", " << hi
        << ") about shift " << sigma << "; best pending residual " << best_pending
        << ", tolerance " << tol;
    throw Error(ErrorKind::NoConvergence, msg.str());
  }
  out.eigenvalues = std::move(locked_values);
  out.eigenvectors = std::move(locked);
  out.residuals = std::move(locked_residuals);
  return out;
}

void append(EigenResult& into, EigenResult&& part) {
  for (std::size_t i = 0; i < part.eigenvalues.size(); ++i) {
    into.eigenvalues.push_back(part.eigenvalues[i]);
    into.eigenvectors.push_back(std::move(part.eigenvectors[i]));
    into.residuals.push_back(part.residuals[i]);
  }
  into.iterations += part.iterations;
}

void sort_result(EigenResult& r) {
  std::vector<std::size_t> order(r.eigenvalues.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return r.eigenvalues[x] < r.eigenvalues[y]; });
  EigenResult s;
  s.iterations = r.iterations;
  s.norm_estimate = r.norm_estimate;
  for (auto i : order) {
    s.eigenvalues.push_back(r.eigenvalues[i]);
    s.eigenvectors.push_back(std::move(r.eigenvectors[i]));
    s.residuals.push_back(r.residuals[i]);
  }
  r = std::move(s);
}

void solve_range(const DiscreteHamiltonian& h, double lo, int count_lo, double hi, int count_hi,
                 const SolverOptions& options, double tol, std::mt19937_64& rng, EigenResult& out,
                 int depth) {
  const int count = count_hi - count_lo;
  if (count <= 0) return;
  const double min_width = 1e-9 * std::max(1.0, h.norm_estimate());
  if (count > options.max_per_window && hi - lo > min_width && depth < 60) {
    const double mid = 0.5 * (lo + hi);
    const int count_mid = h.count_below(mid);
    solve_range(h, lo, count_lo, mid, count_mid, options, tol, rng, out, depth + 1);
    solve_range(h, mid, count_mid, hi, count_hi, options, tol, rng, out, depth + 1);
    return;
  }
  append(out, window_solve(h, lo, hi, count, tol, options.max_restarts, rng));
}

std::string format_sector(Sector s) {
  switch (s) {
    case Sector::Full: return "full";
    case Sector::Symmetric: return "symmetric";
    case Sector::Antisymmetric: return "antisymmetric";
  }
  return "full";
}

}  // namespace

GridSpec GridSpec::interval(double lo, double hi, int n) {
  require(n >= 3 && hi > lo, "interval needs n >= 3 and hi > lo");
  GridSpec s;
  s.shape = Shape::Interval;
  s.lo1 = lo;
  s.hi1 = hi;
  s.lo2 = 0.0;
  s.hi2 = 0.0;
  s.n1 = n;
  s.n2 = 1;
  return s;
}

GridSpec GridSpec::square(double lo, double hi, int n, Sector sector) {
  require(n >= 3 && hi > lo, "square needs n >= 3 and hi > lo");
  GridSpec s;
  s.shape = Shape::Square;
  s.sector = sector;
  s.lo1 = s.lo2 = lo;
  s.hi1 = s.hi2 = hi;
  s.n1 = s.n2 = n;
  return s;
}

GridSpec GridSpec::triangle(double lo, double hi, int n, int diagonal_offset) {
  require(n >= 3 && hi > lo, "triangle needs n >= 3 and hi > lo");
  require(diagonal_offset >= 1, "diagonal offset must be at least one cell");
  GridSpec s = square(lo, hi, n);
  s.shape = Shape::UpperTriangle;
  s.diagonal_offset = diagonal_offset;
  return s;
}

GridSpec GridSpec::with_points(int n) const {
  GridSpec s = *this;
  s.n1 = n;
  s.n2 = shape == Shape::Interval ? 1 : n;
  return s;
}

double GridSpec::h1() const { return (hi1 - lo1) / (n1 - 1); }
double GridSpec::h2() const { return shape == Shape::Interval ? 1.0 : (hi2 - lo2) / (n2 - 1); }

Grid2D GridSpec::grid() const { return Grid2D{lo1, lo2, h1(), h2(), n1, n2}; }

std::string GridSpec::describe() const {
  std::ostringstream os;
  switch (shape) {
    case Shape::Interval: os << "interval [" << lo1 << ", " << hi1 << "], " << n1 << " nodes"; break;
    case Shape::Square:
      os << "square [" << lo1 << ", " << hi1 << "]^2, " << n1 << "^2 nodes, " << format_sector(sector)
         << " sector";
      break;
    case Shape::UpperTriangle:
      os << "triangle x2 > x1 on [" << lo1 << ", " << hi1 << "]^2, " << n1 << "^2 nodes, offset "
         << diagonal_offset;
      break;
  }
  return os.str();
}

double DiscreteHamiltonian::min_potential() const {
  return *std::min_element(potential_.begin(), potential_.end());
}

double DiscreteHamiltonian::norm_estimate() const {
  double best = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    double row = std::abs(diagonal_[k]);
    for (const auto& l : links_[k]) row += std::abs(l.coefficient);
    best = std::max(best, row);
  }
  return best;
}

Eigen::VectorXd DiscreteHamiltonian::apply(const Eigen::VectorXd& x) const {
  require(static_cast<std::size_t>(x.size()) == nodes_.size(), "vector size does not match operator");
  VectorXd y(x.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    double acc = diagonal_[k] * x[static_cast<Eigen::Index>(k)];
    for (const auto& l : links_[k]) acc += l.coefficient * x[static_cast<Eigen::Index>(l.target)];
    y[static_cast<Eigen::Index>(k)] = acc;
  }
  return y;
}

void DiscreteHamiltonian::build_matrix() {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(nodes_.size() * 5);
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const auto r = static_cast<int>(k);
    trips.emplace_back(r, r, diagonal_[k]);
    for (const auto& l : links_[k]) trips.emplace_back(r, static_cast<int>(l.target), l.coefficient);
  }
  const auto n = static_cast<Eigen::Index>(nodes_.size());
  matrix_.resize(n, n);
  matrix_.setFromTriplets(trips.begin(), trips.end());
  matrix_.makeCompressed();
}

int DiscreteHamiltonian::count_below(double e) const {
  const ShiftedFactor f(matrix_, e, norm_estimate());
  return f.negative_pivots();
}

double DiscreteHamiltonian::far_weight(const Eigen::VectorXd& v, double x_far) const {
  const Grid2D g = spec_.grid();
  double far = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const auto i = static_cast<int>(nodes_[k] / static_cast<std::size_t>(g.n2));
    const auto j = static_cast<int>(nodes_[k] % static_cast<std::size_t>(g.n2));
    const double w = v[static_cast<Eigen::Index>(k)] * v[static_cast<Eigen::Index>(k)];
    total += w;
    const double reach = is_2d(spec_) ? std::max(g.x1(i), g.x2(j)) : g.x1(i);
    if (reach > x_far) far += w;
  }
  return total > 0.0 ? far / total : 0.0;
}

SampledField DiscreteHamiltonian::to_field(const Eigen::VectorXd& v) const {
  require(is_2d(spec_), "to_field needs a two-dimensional spec");
  const Grid2D g = spec_.grid();
  SampledField f(g);
  std::fill(f.mask.begin(), f.mask.end(), std::uint8_t{1});
  const double parity = spec_.sector == Sector::Antisymmetric ? -1.0 : 1.0;
  const bool mirror = spec_.shape == Shape::Square && spec_.sector != Sector::Full;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const auto i = static_cast<int>(nodes_[k] / static_cast<std::size_t>(g.n2));
    const auto j = static_cast<int>(nodes_[k] % static_cast<std::size_t>(g.n2));
    const double psi = v[static_cast<Eigen::Index>(k)] / scale_[k];
    f.values[g.index(i, j)] = psi;
    if (mirror && i != j) f.values[g.index(j, i)] = parity * psi;
  }
  const double nrm = norm(f);
  if (nrm > 0.0) {
    for (auto& x : f.values) x /= nrm;
  }
  return f;
}

std::vector<double> DiscreteHamiltonian::to_samples_1d(const Eigen::VectorXd& v) const {
  require(!is_2d(spec_), "to_samples_1d needs an interval spec");
  const double c = 1.0 / (v.norm() * std::sqrt(spec_.h1()));
  std::vector<double> out(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) out[k] = c * v[static_cast<Eigen::Index>(k)];
  return out;
}

DiscreteHamiltonian assemble(const AnalyticField& potential, const GridSpec& spec) {
  require(is_2d(spec), "assemble needs a two-dimensional spec; use assemble_1d");
  require(spec.n1 >= 3 && spec.n2 >= 3, "grid needs at least three nodes per axis");
  require(static_cast<bool>(potential), "potential is empty");
  const bool folded = spec.shape == Shape::UpperTriangle || spec.sector != Sector::Full;
  if (folded) {
    require(spec.lo1 == spec.lo2 && spec.hi1 == spec.hi2 && spec.n1 == spec.n2,
            "triangle and sector grids need identical axes");
  }
  require(!(spec.shape == Shape::UpperTriangle && spec.sector == Sector::Symmetric),
          "triangle domain carries no symmetric sector");

  const Grid2D g = spec.grid();
  const int offset = spec.shape == Shape::UpperTriangle ? spec.diagonal_offset
                     : spec.sector == Sector::Antisymmetric ? 1
                     : spec.sector == Sector::Symmetric     ? 0
                                                            : std::numeric_limits<int>::min() / 2;
  const bool reflect = spec.shape == Shape::Square && spec.sector == Sector::Symmetric;
  auto is_unknown = [&](int i, int j) {
    return i >= 1 && j >= 1 && i <= g.n1 - 2 && j <= g.n2 - 2 && j - i >= offset;
  };

  DiscreteHamiltonian h;
  h.spec_ = spec;
  std::vector<long> lookup(g.size(), -1);
  for (int i = 1; i <= g.n1 - 2; ++i) {
    for (int j = 1; j <= g.n2 - 2; ++j) {
      if (!is_unknown(i, j)) continue;
      const double x1 = g.x1(i);
      const double x2 = g.x2(j);
      double v = std::numeric_limits<double>::quiet_NaN();
      if (!potential.is_singular_at(x1, x2)) {
        try {
          v = potential.value(x1, x2);
        } catch (const Error&) {
        }
      }
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "potential undefined at unknown node (" << x1 << ", " << x2 << ")";
        throw Error(ErrorKind::SingularNode, msg.str());
      }
      lookup[g.index(i, j)] = static_cast<long>(h.nodes_.size());
      h.nodes_.push_back(g.index(i, j));
      h.potential_.push_back(v);
      h.scale_.push_back(reflect && i != j ? std::sqrt(2.0) : 1.0);
    }
  }
  if (h.nodes_.empty()) throw Error(ErrorKind::InvalidParameter, "grid has no unknown nodes");

  const double k1 = 1.0 / (g.h1 * g.h1);
  const double k2 = 1.0 / (g.h2 * g.h2);
  h.diagonal_.resize(h.nodes_.size());
  h.links_.resize(h.nodes_.size());
  for (std::size_t k = 0; k < h.nodes_.size(); ++k) {
    const auto i = static_cast<int>(h.nodes_[k] / static_cast<std::size_t>(g.n2));
    const auto j = static_cast<int>(h.nodes_[k] % static_cast<std::size_t>(g.n2));
    h.diagonal_[k] = 2.0 * (k1 + k2) + h.potential_[k];
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int s = 0; s < 4; ++s) {
      int p = i + di[s];
      int q = j + dj[s];
      if (reflect && q < p) std::swap(p, q);
      if (p < 0 || q < 0 || p >= g.n1 || q >= g.n2) continue;
      const long t = lookup[g.index(p, q)];
      if (t < 0) continue;
      const auto target = static_cast<std::size_t>(t);
      const double c = -(s < 2 ? k1 : k2) * h.scale_[k] / h.scale_[target];
      auto& links = h.links_[k];
      auto it = std::find_if(links.begin(), links.end(), [&](const auto& l) { return l.target == target; });
      if (it == links.end()) {
        links.push_back({target, c});
      } else {
        it->coefficient += c;
      }
    }
  }
  h.build_matrix();
  return h;
}

DiscreteHamiltonian assemble_1d(const std::function<double(double)>& potential, const GridSpec& spec) {
  require(spec.shape == Shape::Interval, "assemble_1d needs an interval spec");
  require(static_cast<bool>(potential), "potential is empty");
  DiscreteHamiltonian h;
  h.spec_ = spec;
  const double hh = spec.h1();
  const double k1 = 1.0 / (hh * hh);
  const int n = spec.n1 - 2;
  for (int i = 1; i <= n; ++i) {
    const double x = spec.lo1 + i * hh;
    const double v = potential(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "potential undefined at unknown node " << x;
      throw Error(ErrorKind::SingularNode, msg.str());
    }
    h.nodes_.push_back(static_cast<std::size_t>(i));
    h.potential_.push_back(v);
    h.scale_.push_back(1.0);
    h.diagonal_.push_back(2.0 * k1 + v);
    std::vector<DiscreteHamiltonian::Link> links;
    if (i > 1) links.push_back({static_cast<std::size_t>(i - 2), -k1});
    if (i < n) links.push_back({static_cast<std::size_t>(i), -k1});
    h.links_.push_back(std::move(links));
  }
  h.build_matrix();
  return h;
}

EigenResult eigenpairs_in_range(const DiscreteHamiltonian& h, double lo, double hi,
                                const SolverOptions& options) {
  require(hi > lo, "empty energy range");
  EigenResult out;
  out.norm_estimate = h.norm_estimate();
  const double tol = options.tolerance > 0.0 ? options.tolerance : 1e-8 * out.norm_estimate;
  std::mt19937_64 rng(options.seed);
  const int count_lo = h.count_below(lo);
  const int count_hi = h.count_below(hi);
  solve_range(h, lo, count_lo, hi, count_hi, options, tol, rng, out, 0);
  sort_result(out);
  if (static_cast<int>(out.eigenvalues.size()) != count_hi - count_lo) {
    std::ostringstream msg;
    msg << "inertia predicts " << count_hi - count_lo << " eigenvalues in [" << lo << ", " << hi
        << "), solver returned " << out.eigenvalues.size();
    throw Error(ErrorKind::NoConvergence, msg.str());
  }
  return out;
}

EigenResult lowest_eigenpairs(const DiscreteHamiltonian& h, int k, const SolverOptions& options) {
  require(k >= 1, "need k >= 1");
  require(static_cast<std::size_t>(k) <= h.size(), "k exceeds the number of unknowns");
  // -Laplacian is positive definite, so every eigenvalue exceeds min V.
  const double lo = h.min_potential() - 1.0;
  double below = lo;
  double step = 1.0;
  double hi = lo + step;
  int c = h.count_below(hi);
  while (c < k) {
    below = hi;
    step *= 2.0;
    hi = lo + step;
    c = h.count_below(hi);
  }
  const int spare = std::max(4, k / 2);
  for (int it = 0; it < 40 && c > k + spare; ++it) {
    const double mid = 0.5 * (below + hi);
    const int cm = h.count_below(mid);
    if (cm >= k) {
      hi = mid;
      c = cm;
    } else {
      below = mid;
    }
  }
  EigenResult all = eigenpairs_in_range(h, lo, hi, options);
  all.eigenvalues.resize(static_cast<std::size_t>(k));
  all.eigenvectors.resize(static_cast<std::size_t>(k));
  all.residuals.resize(static_cast<std::size_t>(k));
  return all;
}

double richardson(double fine, double h_fine, double coarse, double h_coarse) {
  require(h_coarse > h_fine && h_fine > 0.0, "Richardson needs h_coarse > h_fine > 0");
  const double f2 = h_fine * h_fine;
  return fine + (fine - coarse) * f2 / (h_coarse * h_coarse - f2);
}

BoundSpectrum bound_spectrum(const AnalyticField& potential, const GridSpec& spec, double lo,
                             double hi, std::optional<int> companion_points, const BoundFilter& filter,
                             const SolverOptions& options) {
  std::vector<Sector> sectors;
  if (spec.shape == Shape::Square && spec.sector == Sector::Full) {
    sectors = {Sector::Symmetric, Sector::Antisymmetric};
  } else {
    sectors = {spec.sector};
  }
  const double top = is_2d(spec) ? std::max(spec.hi1, spec.hi2) : spec.hi1;
  const double bottom = is_2d(spec) ? std::min(spec.lo1, spec.lo2) : spec.lo1;
  const double x_far = top - filter.far_fraction * (top - bottom);

  BoundSpectrum out;
  out.grid = spec.describe();
  struct Found {
    double e;
    double far;
    double res;
  };
  auto run = [&](const GridSpec& s, double upper, bool record) {
    std::vector<std::vector<Found>> per_sector;
    for (Sector sector : sectors) {
      GridSpec ss = s;
      ss.sector = sector;
      const DiscreteHamiltonian h = assemble(potential, ss);
      const EigenResult r = eigenpairs_in_range(h, lo, upper, options);
      std::vector<Found> bound;
      for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
        const double fw = h.far_weight(r.eigenvectors[i], x_far);
        if (record) {
          out.all_eigenvalues.push_back(r.eigenvalues[i]);
          out.all_far_weights.push_back(fw);
        }
        if (fw <= filter.max_far_weight) bound.push_back({r.eigenvalues[i], fw, r.residuals[i]});
      }
      per_sector.push_back(std::move(bound));
    }
    return per_sector;
  };

  const auto fine = run(spec, hi, true);
  std::vector<std::vector<Found>> coarse;
  GridSpec coarse_spec;
  if (companion_points) {
    require(*companion_points >= 3 && *companion_points < spec.n1, "companion grid must be coarser");
    coarse_spec = spec.with_points(*companion_points);
    out.companion_grid = coarse_spec.describe();
    coarse = run(coarse_spec, hi + 0.1 * (hi - lo), false);
  }

  for (std::size_t s = 0; s < sectors.size(); ++s) {
    std::vector<bool> used(coarse.empty() ? 0 : coarse[s].size(), false);
    for (const auto& f : fine[s]) {
      BoundLevel level;
      level.energy = level.energy_fine = f.e;
      level.far_weight = f.far;
      level.residual = f.res;
      level.sector = sectors[s];
      if (!coarse.empty()) {
        std::size_t best = used.size();
        for (std::size_t c = 0; c < used.size(); ++c) {
          if (used[c]) continue;
          if (best == used.size() || std::abs(coarse[s][c].e - f.e) < std::abs(coarse[s][best].e - f.e)) best = c;
        }
        if (best < used.size()) {
          used[best] = true;
          level.energy_coarse = coarse[s][best].e;
          level.energy = richardson(f.e, spec.h1(), coarse[s][best].e, coarse_spec.h1());
        }
      }
      out.levels.push_back(level);
    }
  }
  std::sort(out.levels.begin(), out.levels.end(),
            [](const BoundLevel& x, const BoundLevel& y) { return x.energy < y.energy; });
  std::vector<std::size_t> order(out.all_eigenvalues.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](auto x, auto y) { return out.all_eigenvalues[x] < out.all_eigenvalues[y]; });
  std::vector<double> ev;
  std::vector<double> fw;
  for (auto i : order) {
    ev.push_back(out.all_eigenvalues[i]);
    fw.push_back(out.all_far_weights[i]);
  }
  out.all_eigenvalues = std::move(ev);
  out.all_far_weights = std::move(fw);
  return out;
}

}  // namespace susysep::oracle
