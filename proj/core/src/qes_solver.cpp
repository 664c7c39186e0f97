#include "susysep/qes_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "susysep/error.hpp"
#include "susysep/operators.hpp"

namespace susysep::qes {

namespace {

std::string fixed6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s(buf);
  if (!s.empty() && s[0] == '-') s = "−" + s.substr(1);
  return s;
}

struct Sampled {
  std::vector<SampledField> modes;
  std::vector<SampledField> images;  // H1 Omega_n
  std::vector<std::uint8_t> mask;    // common valid mask of the images
};

Sampled sample_family(const ZeroModeFamily& fam, const oracle::GridSpec& spec) {
  if (spec.shape != oracle::Shape::UpperTriangle) {
    throw Error(ErrorKind::InvalidParameter, "QES numerics run on the upper-triangle domain");
  }
  const Grid2D grid = spec.grid();
  const auto dmask = domain_mask(grid, DomainShape::UpperTriangle, spec.diagonal_offset);
  const DifferentialOperator2D h1 = hamiltonian(Branch::H1, fam.params);
  Sampled out;
  out.mask.assign(grid.size(), std::uint8_t{1});
  for (const auto& mode : fam.modes) {
    SampledField f = restrict_to(sample(mode, grid), dmask);
    SampledField hf = apply_grid(h1, f);
    for (std::size_t i = 0; i < out.mask.size(); ++i) out.mask[i] &= hf.mask[i];
    out.modes.push_back(std::move(f));
    out.images.push_back(std::move(hf));
  }
  return out;
}

struct Projection {
  Eigen::MatrixXd c;
  Eigen::MatrixXd gram;
  double condition = 0.0;
  double reconstruction = 0.0;
};

Projection project(const Sampled& s) {
  const Grid2D& g = s.modes.front().grid;
  std::vector<std::size_t> rows;
  std::vector<double> sqrt_w;
  for (int i = 0; i < g.n1; ++i) {
    for (int j = 0; j < g.n2; ++j) {
      if (s.mask[g.index(i, j)]) {
        rows.push_back(g.index(i, j));
        sqrt_w.push_back(std::sqrt(g.weight(i, j)));
      }
    }
  }
  if (rows.empty()) throw Error(ErrorKind::EmptyMask, "no node supports the Galerkin projection");
  const auto N = static_cast<Eigen::Index>(rows.size());
  const auto K = static_cast<Eigen::Index>(s.modes.size());
  Eigen::MatrixXd phi(N, K);
  Eigen::MatrixXd rhs(N, K);
  for (Eigen::Index r = 0; r < N; ++r) {
    const std::size_t node = rows[static_cast<std::size_t>(r)];
    const double w = sqrt_w[static_cast<std::size_t>(r)];
    for (Eigen::Index k = 0; k < K; ++k) {
      phi(r, k) = w * s.modes[static_cast<std::size_t>(k)].values[node];
      rhs(r, k) = w * s.images[static_cast<std::size_t>(k)].values[node];
    }
  }
  Projection p;
  p.gram = phi.transpose() * phi;
  // Column scaling does not change the fitted span, so the condition number is
  // taken after equilibration.
  const Eigen::VectorXd d = p.gram.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd equilibrated = d.asDiagonal() * p.gram * d.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ev(equilibrated);
  const double lo = ev.eigenvalues().minCoeff();
  const double hi = ev.eigenvalues().maxCoeff();
  p.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(p.condition <= 1e10)) {
    std::ostringstream msg;
    msg << "Gram matrix of the zero-mode basis has condition number " << p.condition;
    throw Error(ErrorKind::IllConditioned, msg.str());
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(phi);
  const Eigen::MatrixXd x = qr.solve(rhs);  // column n = coefficients of H1 Omega_n
  p.c = x.transpose();
  for (Eigen::Index n = 0; n < K; ++n) {
    const double rel = (rhs.col(n) - phi * x.col(n)).norm() / rhs.col(n).norm();
    p.reconstruction = std::max(p.reconstruction, rel);
  }
  return p;
}

void classify(CouplingMatrix& cm) {
  const Eigen::Index K = cm.c.rows();
  if (K == 1) {
    cm.orientation = Orientation::Diagonal;
    cm.off_triangle = 0.0;
    return;
  }
  double upper = 0.0;
  double lower = 0.0;
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = 0; j < K; ++j) {
      if (j > i) upper = std::max(upper, std::abs(cm.c(i, j)));
      if (j < i) lower = std::max(lower, std::abs(cm.c(i, j)));
    }
  }
  const double scale = cm.c.cwiseAbs().maxCoeff();
  cm.orientation = upper <= lower ? Orientation::Lower : Orientation::Upper;
  cm.off_triangle = std::min(upper, lower) / scale;
}

}  // namespace

AdmissibleSet admissible_indices(const ModelParams& params) {
  AdmissibleSet out;
  if (!params.qes_admissible()) {
    out.diagnostic = "a outside QES window (−∞, " + fixed6(qes_window_edge()) + ")";
    return out;
  }
  const double bound = -2.0 * params.a;
  for (int n = 0; params.morse.s(n) > bound; ++n) out.indices.push_back(n);
  if (out.indices.empty()) {
    std::ostringstream msg;
    msg << "no level with s_n > -2a = " << bound << " (s_0 = " << params.morse.s(0) << ")";
    out.diagnostic = msg.str();
  }
  return out;
}

AnalyticField zero_mode(int n, const ModelParams& params) {
  const AdmissibleSet set = admissible_indices(params);
  if (std::find(set.indices.begin(), set.indices.end(), n) == set.indices.end()) {
    std::ostringstream msg;
    msg << "n = " << n << " is not admissible at a = " << params.a;
    if (!set.diagnostic.empty()) msg << ": " << set.diagnostic;
    throw Error(ErrorKind::Inadmissible, msg.str());
  }
  const MorseEigenfunction eta = morse_eigenfunction(n, params.morse);
  const SuperchargeCoefficients coeffs(params);
  return AnalyticField(
      [eta, coeffs](double x1, double x2) {
        if (on_diagonal(x1, x2)) return Jet2{};
        const Jet2 chi = coeffs.chi(x1, x2);
        const MorseLogJet p = eta.log_jet(x1);
        const MorseLogJet q = eta.log_jet(x2);
        const double e = std::exp(chi.v + p.L + q.L);
        const double g1 = chi.d1 + p.dL;
        const double g2 = chi.d2 + q.dL;
        const double g11 = chi.d11 + p.d2L;
        const double g22 = chi.d22 + q.d2L;
        const double P = p.u * q.u;
        const double P1 = p.du * q.u;
        const double P2 = p.u * q.du;
        return Jet2{e * P,
                    e * (g1 * P + P1),
                    e * (g2 * P + P2),
                    e * ((g11 + g1 * g1) * P + 2.0 * g1 * P1 + p.d2u * q.u),
                    e * ((chi.d12 + g1 * g2) * P + g1 * P2 + g2 * P1 + p.du * q.du),
                    e * ((g22 + g2 * g2) * P + 2.0 * g2 * P2 + p.u * q.d2u)};
      },
      2, [](double x1, double x2) { return on_diagonal(x1, x2); });
}

ZeroModeFamily zero_modes(const ModelParams& params) {
  ZeroModeFamily fam;
  fam.params = params;
  fam.indices = admissible_indices(params).indices;
  for (int n : fam.indices) fam.modes.push_back(zero_mode(n, params));
  return fam;
}

std::string to_string(Orientation o) {
  switch (o) {
    case Orientation::Lower: return "lower";
    case Orientation::Upper: return "upper";
    case Orientation::Diagonal: return "diagonal";
  }
  return "diagonal";
}

CouplingMatrix coupling_matrix(const ModelParams& params, const oracle::GridSpec& spec,
                               std::optional<int> companion_points) {
  const ZeroModeFamily fam = zero_modes(params);
  if (fam.indices.empty()) {
    throw Error(ErrorKind::Inadmissible, admissible_indices(params).diagnostic);
  }
  const Projection fine = project(sample_family(fam, spec));
  CouplingMatrix cm;
  cm.indices = fam.indices;
  cm.gram = fine.gram;
  cm.gram_condition = fine.condition;
  cm.reconstruction_error = fine.reconstruction;
  cm.grid = spec.describe();
  cm.c = fine.c;
  if (companion_points) {
    const oracle::GridSpec coarse_spec = spec.with_points(*companion_points);
    const Projection coarse = project(sample_family(fam, coarse_spec));
    cm.c_fine = fine.c;
    cm.c_coarse = coarse.c;
    for (Eigen::Index i = 0; i < cm.c.rows(); ++i) {
      for (Eigen::Index j = 0; j < cm.c.cols(); ++j) {
        cm.c(i, j) = oracle::richardson(fine.c(i, j), spec.h1(), coarse.c(i, j), coarse_spec.h1());
      }
    }
    cm.grid += "; Richardson with " + coarse_spec.describe();
  }
  classify(cm);
  return cm;
}

SpectrumTable qes_spectrum(const ModelParams& params) {
  SpectrumTable t;
  t.branch = "qes";
  const AdmissibleSet set = admissible_indices(params);
  t.add_metadata("A", format_double(params.morse.A));
  t.add_metadata("alpha", format_double(params.alpha()));
  t.add_metadata("a", format_double(params.a));
  t.add_metadata("spectrum", "partial");
  t.add_metadata("energy_reference", "H1 including 4 a^2 alpha^2");
  if (!set.diagnostic.empty()) t.add_metadata("diagnostic", set.diagnostic);
  const double a2 = params.alpha() * params.alpha();
  for (int k : set.indices) {
    const double s = params.morse.s(k);
    SpectrumLevel l;
    l.n = k;
    l.energy = -2.0 * a2 * s * (s + 2.0 * params.a);
    l.notes = "algebraic level of the zero-mode space";
    l.provenance = "closed-form";
    t.levels.push_back(l);
  }
  return t;
}

std::vector<QesState> qes_eigenfunctions(const ModelParams& params, const oracle::GridSpec& spec,
                                         const CouplingMatrix& cm) {
  const Eigen::Index K = cm.c.rows();
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(cm.c(i, i) - cm.c(j, j)) < 1e-6 * std::abs(cm.c(i, i))) {
        throw Error(ErrorKind::DegenerateDiagonal, "coincident diagonal entries of the coupling matrix");
      }
    }
  }
  const ZeroModeFamily fam = zero_modes(params);
  const Grid2D grid = spec.grid();
  const auto dmask = domain_mask(grid, DomainShape::UpperTriangle, spec.diagonal_offset);
  std::vector<SampledField> modes;
  for (const auto& m : fam.modes) modes.push_back(restrict_to(sample(m, grid), dmask));
  const DifferentialOperator2D h1 = hamiltonian(Branch::H1, params);

  std::vector<QesState> out;
  for (Eigen::Index k = 0; k < K; ++k) {
    const double E = cm.c(k, k);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(K);
    b[k] = 1.0;
    // Left eigenvector b C = E b of a triangular C.
    if (cm.orientation == Orientation::Lower) {
      for (Eigen::Index j = k - 1; j >= 0; --j) {
        double acc = 0.0;
        for (Eigen::Index i = j + 1; i <= k; ++i) acc += b[i] * cm.c(i, j);
        b[j] = acc / (E - cm.c(j, j));
      }
    } else if (cm.orientation == Orientation::Upper) {
      for (Eigen::Index j = k + 1; j < K; ++j) {
        double acc = 0.0;
        for (Eigen::Index i = k; i < j; ++i) acc += b[i] * cm.c(i, j);
        b[j] = acc / (E - cm.c(j, j));
      }
    }
    SampledField psi = scaled(modes[0], b[0]);
    for (Eigen::Index j = 1; j < K; ++j) psi = lincomb(1.0, psi, b[j], modes[static_cast<std::size_t>(j)]);
    const double nrm = norm(psi);
    psi = scaled(psi, 1.0 / nrm);
    const SampledField hpsi = apply_grid(h1, psi);
    const SampledField res = lincomb(1.0, hpsi, -E, psi);
    const SampledField inner = restrict_to(psi, hpsi.mask);

    QesState st;
    st.k = fam.indices[static_cast<std::size_t>(k)];
    st.energy = E;
    st.coefficients = b / nrm;
    st.residual = norm(res) / norm(inner);
    st.field = std::move(psi);
    out.push_back(std::move(st));
  }
  return out;
}

namespace {

OperatorChain descend_chain(const ModelParams& params, int M, double& energy) {
  OperatorChain chain;
  for (int j = 0; j < M; ++j) {
    ModelParams pj = params;
    pj.a = params.a - 0.5 * j;
    chain.ops.push_back(supercharge(Sign::Minus, pj));
    energy += shape_invariance_shift(pj).R;
  }
  return chain;
}

void finish_descend(DescendResult& out, double input_norm, const ModelParams& params) {
  out.norm_ratio = norm(out.field) / input_norm;
  if (!(out.norm_ratio >= 1e-6)) {
    std::ostringstream msg;
    msg << "chained image norm ratio " << out.norm_ratio << " below 1e-6";
    throw Error(ErrorKind::NullImage, msg.str());
  }
  const SampledField h = apply_grid(hamiltonian(Branch::H1, params), out.field);
  const SampledField res = lincomb(1.0, h, -out.energy, out.field);
  out.residual = norm(res) / norm(restrict_to(out.field, h.mask));
}

}  // namespace

AnalyticField qes_state_field(const ModelParams& params, const std::vector<int>& indices,
                              const Eigen::VectorXd& coefficients) {
  if (static_cast<Eigen::Index>(indices.size()) != coefficients.size()) {
    throw Error(ErrorKind::InvalidParameter, "coefficient count does not match the basis");
  }
  std::vector<AnalyticField> modes;
  for (int n : indices) modes.push_back(zero_mode(n, params));
  std::vector<double> b(coefficients.data(), coefficients.data() + coefficients.size());
  return AnalyticField(
      [modes, b](double x1, double x2) {
        Jet2 acc;
        for (std::size_t j = 0; j < modes.size(); ++j) {
          if (b[j] == 0.0) continue;
          const Jet2 m = modes[j](x1, x2);
          acc.v += b[j] * m.v;
          acc.d1 += b[j] * m.d1;
          acc.d2 += b[j] * m.d2;
          acc.d11 += b[j] * m.d11;
          acc.d12 += b[j] * m.d12;
          acc.d22 += b[j] * m.d22;
        }
        return acc;
      },
      2, [](double x1, double x2) { return on_diagonal(x1, x2); });
}

DescendResult shape_descend(const AnalyticField& state, const oracle::GridSpec& spec, double energy,
                            const ModelParams& params, int M) {
  if (M < 0) throw Error(ErrorKind::InvalidParameter, "chain length must be non-negative");
  const Grid2D grid = spec.grid();
  const auto dmask = domain_mask(grid, DomainShape::UpperTriangle, spec.diagonal_offset);
  const SampledField input = restrict_to(sample(state, grid), dmask);
  DescendResult out;
  out.energy = energy;
  if (M == 0) {
    out.field = input;
    out.norm_ratio = 1.0;
    return out;
  }
  OperatorChain chain = descend_chain(params, M, out.energy);
  const DifferentialOperator2D first = chain.ops.back();
  chain.ops.pop_back();
  const SampledField image = restrict_to(apply_pointwise(first, state, grid), dmask);
  out.field = chain.ops.empty() ? image : apply_chain(chain, image);
  finish_descend(out, norm(input), params);
  return out;
}

DescendResult shape_descend(const SampledField& state, double energy, const ModelParams& params, int M) {
  if (M < 0) throw Error(ErrorKind::InvalidParameter, "chain length must be non-negative");
  DescendResult out;
  out.energy = energy;
  if (M == 0) {
    out.field = state;
    out.norm_ratio = 1.0;
    return out;
  }
  const OperatorChain chain = descend_chain(params, M, out.energy);
  out.field = apply_chain(chain, state);
  finish_descend(out, norm(state), params);
  return out;
}

}  // namespace susysep::qes
