#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "susysep/error.hpp"
#include "susysep/exact_solver.hpp"
#include "susysep/model2d.hpp"
#include "susysep/oracle.hpp"
#include "susysep/qes_solver.hpp"
#include "susysep/spectrum.hpp"
#include "susysep/verify.hpp"

namespace susysep::cli {

namespace {

using json = nlohmann::ordered_json;

/// Usage or precondition problem detected by the driver itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double A = 30.25;
  double alpha = 1.0;
  double a = -0.5;
  std::string branch = "exact";
  int k = 1;
  std::optional<int> nx;
  std::vector<double> domain;
  std::string format = "json";
  std::string out;
  std::uint64_t seed = 20100924;

  // subcommand-specific
  int n = 0;
  int m = 2;
  std::string suite;
  std::string hamiltonian = "h1";

  ModelParams params() const { return ModelParams::make(A, alpha, a); }

  std::optional<std::pair<double, double>> domain_pair() const {
    if (domain.empty()) return std::nullopt;
    return std::make_pair(domain[0], domain[1]);
  }
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter:
    case ErrorKind::NotBound:
    case ErrorKind::NotSeparable:
    case ErrorKind::Inadmissible:
    case ErrorKind::UnknownSuite:
    case ErrorKind::InsufficientLevels:
      return kUsage;
    default:
      return kNumerical;
  }
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw UsageError("cannot open output file '" + cfg.out + "'");
  f << text;
}

std::string render(const RunConfig& cfg, const SpectrumTable& t) {
  return cfg.format == "csv" ? t.to_csv() : t.to_json();
}

// ---------------------------------------------------------------------------
// oracle

struct OracleRun {
  std::string hamiltonian;
  ModelParams params;
  oracle::BoundSpectrum spectrum;
  std::vector<double> predicted;  // relative to 4 a^2 alpha^2
  std::string prediction_source;
};

/// Relative-energy predictions of the analytic branches for this Hamiltonian.
std::pair<std::vector<double>, std::string> predictions(Branch branch, const ModelParams& p) {
  std::vector<double> out;
  if (branch == Branch::H1 && p.a == exact::kSeparableA) {
    for (const auto& l : exact::separable_spectrum(p).levels)
      for (int d = 0; d < l.degeneracy; ++d) out.push_back(l.energy);
    return {out, "separable"};
  }
  if (branch == Branch::H0) {
    for (int k = 0; k < 16; ++k) {
      if (exact::hierarchy_coupling(k) != p.a) continue;
      const auto base = ModelParams::make(p.morse.A, p.alpha(), exact::kSeparableA);
      out = exact::hierarchy_spectrum(k, base).table.energies();
      std::sort(out.begin(), out.end());
      return {out, k == 0 ? "partner" : "hierarchy:" + std::to_string(k)};
    }
  }
  if (branch == Branch::H1 && p.qes_admissible()) {
    for (double e : qes::qes_spectrum(p).energies()) out.push_back(e - p.energy_offset());
    std::sort(out.begin(), out.end());
    return {out, "qes (partial)"};
  }
  return {out, ""};
}

OracleRun oracle_levels(const RunConfig& cfg, Branch branch, int count) {
  const ModelParams p = cfg.params();
  const auto [lo, hi] = cfg.domain_pair().value_or(std::make_pair(-2.0, 16.0));
  const int points = cfg.nx.value_or(400);
  const bool square = branch == Branch::H1 && !is_singular_on_diagonal(branch, p);
  const auto spec = square ? oracle::GridSpec::square(lo, hi, points) : oracle::GridSpec::triangle(lo, hi, points);
  const AnalyticField v = potential(branch, p);
  oracle::SolverOptions opts;
  opts.seed = cfg.seed;

  const double floor = oracle::assemble(v, spec.with_points(65)).min_potential() - 10.0;
  const double offset = p.energy_offset();
  OracleRun run{branch == Branch::H0 ? "h0" : "h1", p, {}, {}, {}};
  std::tie(run.predicted, run.prediction_source) = predictions(branch, p);
  // widen the window until enough bound levels are found
  double top = floor + 10.0;
  if (!run.predicted.empty() && static_cast<int>(run.predicted.size()) >= count)
    top = std::max(top, run.predicted[count - 1] + offset + 0.5);
  for (int attempt = 0; attempt < 8; ++attempt) {
    run.spectrum = oracle::bound_spectrum(v, spec, floor, top, points / 2, {}, opts);
    if (static_cast<int>(run.spectrum.levels.size()) >= count) break;
    top += 10.0 * (attempt + 1);
  }
  if (static_cast<int>(run.spectrum.levels.size()) > count) run.spectrum.levels.resize(count);
  return run;
}

std::string render_oracle(const RunConfig& cfg, const OracleRun& run) {
  const double offset = run.params.energy_offset();
  if (cfg.format == "csv") {
    std::string s = "index,E,E_raw,E_fine,residual,far_weight,predicted\n";
    for (std::size_t i = 0; i < run.spectrum.levels.size(); ++i) {
      const auto& l = run.spectrum.levels[i];
      s += std::to_string(i) + "," + format_double(l.energy - offset) + "," + format_double(l.energy) + "," +
           format_double(l.energy_fine) + "," + format_double(l.residual) + "," + format_double(l.far_weight) + ",";
      if (i < run.predicted.size()) s += format_double(run.predicted[i]);
      s += "\n";
    }
    return s;
  }
  json j;
  j["hamiltonian"] = run.hamiltonian;
  j["A"] = run.params.morse.A;
  j["alpha"] = run.params.alpha();
  j["a"] = run.params.a;
  j["energy_offset"] = offset;
  j["grid"] = run.spectrum.grid;
  if (run.spectrum.companion_grid) j["companion_grid"] = *run.spectrum.companion_grid;
  j["energy_reference"] = "E = E_raw - 4 a^2 alpha^2";
  if (!run.prediction_source.empty()) j["prediction_source"] = run.prediction_source;
  json levels = json::array();
  for (std::size_t i = 0; i < run.spectrum.levels.size(); ++i) {
    const auto& l = run.spectrum.levels[i];
    json o;
    o["index"] = i;
    o["E"] = l.energy - offset;
    o["E_raw"] = l.energy;
    o["E_fine"] = l.energy_fine;
    if (l.energy_coarse) o["E_coarse"] = *l.energy_coarse;
    o["residual"] = l.residual;
    o["far_weight"] = l.far_weight;
    o["sector"] = l.sector == oracle::Sector::Antisymmetric ? "A" : l.sector == oracle::Sector::Symmetric ? "S" : "full";
    if (i < run.predicted.size()) {
      o["predicted"] = run.predicted[i];
      o["deviation"] = l.energy - offset - run.predicted[i];
    }
    levels.push_back(o);
  }
  j["levels"] = levels;
  return j.dump(2) + "\n";
}

Branch parse_hamiltonian(const std::string& h) {
  if (h == "h0") return Branch::H0;
  if (h == "h1") return Branch::H1;
  throw UsageError("unknown hamiltonian '" + h + "' (expected h0 or h1)");
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  const ModelParams p = cfg.params();
  std::string branch = cfg.branch;
  int k = cfg.k;
  if (branch.rfind("hierarchy:", 0) == 0) {
    try {
      k = std::stoi(branch.substr(10));
    } catch (const std::exception&) {
      throw UsageError("bad hierarchy depth in '" + branch + "'");
    }
    branch = "hierarchy";
  }
  if (branch == "qes") {
    const auto adm = qes::admissible_indices(p);
    if (adm.indices.empty()) throw Error(ErrorKind::Inadmissible, adm.diagnostic);
    emit(cfg, out, render(cfg, qes::qes_spectrum(p)));
  } else if (branch == "exact") {
    exact::require_separable(p);
    emit(cfg, out, render(cfg, exact::partner_spectrum(p)));
  } else if (branch == "separable") {
    emit(cfg, out, render(cfg, exact::separable_spectrum(p)));
  } else if (branch == "hierarchy") {
    if (k < 0) throw UsageError("hierarchy depth k must be >= 0");
    exact::require_separable(p);
    emit(cfg, out, render(cfg, exact::hierarchy_spectrum(k, p).table));
  } else if (branch == "oracle") {
    const Branch h = parse_hamiltonian(cfg.hamiltonian);
    const auto run = oracle_levels(cfg, h, std::max(cfg.k, 1));
    SpectrumTable t;
    t.branch = "oracle";
    t.add_metadata("hamiltonian", run.hamiltonian);
    t.add_metadata("A", format_double(p.morse.A));
    t.add_metadata("alpha", format_double(p.alpha()));
    t.add_metadata("a", format_double(p.a));
    t.add_metadata("grid", run.spectrum.grid);
    t.add_metadata("energy_reference", "relative to 4 a^2 alpha^2");
    for (std::size_t i = 0; i < run.spectrum.levels.size(); ++i) {
      SpectrumLevel l;
      l.n = static_cast<int>(i);
      l.energy = run.spectrum.levels[i].energy - p.energy_offset();
      l.provenance = "oracle";
      t.levels.push_back(l);
    }
    emit(cfg, out, render(cfg, t));
  } else {
    throw UsageError("unknown branch '" + cfg.branch + "' (expected qes, exact, separable, hierarchy[:k], oracle)");
  }
  return kOk;
}

std::string render_field(const RunConfig& cfg, const SampledField& f, const json& meta) {
  const Grid2D& g = f.grid;
  if (cfg.format == "csv") {
    std::string s = "x1,x2,psi\n";
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) {
        if (!f.valid(i, j)) continue;
        s += format_double(g.x1(i)) + "," + format_double(g.x2(j)) + "," + format_double(f.at(i, j)) + "\n";
      }
    return s;
  }
  json j = meta;
  json x1 = json::array();
  json x2 = json::array();
  json psi = json::array();
  for (int i = 0; i < g.n1; ++i)
    for (int jj = 0; jj < g.n2; ++jj) {
      if (!f.valid(i, jj)) continue;
      x1.push_back(g.x1(i));
      x2.push_back(g.x2(jj));
      psi.push_back(f.at(i, jj));
    }
  j["x1"] = x1;
  j["x2"] = x2;
  j["psi"] = psi;
  return j.dump() + "\n";
}

int cmd_wavefunction(const RunConfig& cfg, std::ostream& out) {
  const ModelParams p = cfg.params();
  json meta;
  meta["A"] = p.morse.A;
  meta["alpha"] = p.alpha();
  meta["a"] = p.a;
  if (cfg.branch == "exact") {
    exact::require_separable(p);
    if (cfg.n == cfg.m) throw UsageError("partner states need n != m (got n = m = " + std::to_string(cfg.n) + ")");
    const int n = std::min(cfg.n, cfg.m);
    const int m = std::max(cfg.n, cfg.m);
    const int bound = count_bound_states(p.morse);
    if (n < 0 || m >= bound)
      throw UsageError("levels must satisfy 0 <= n, m < " + std::to_string(bound));
    const double r = exact::sym_eigenvalue(n, m, p);
    if (r <= 0.0)
      throw UsageError("state vanishes (r = 0) for (n, m) = (" + std::to_string(n) + ", " + std::to_string(m) + ")");
    const auto [lo, hi] = cfg.domain_pair().value_or(std::make_pair(-2.0, 12.0));
    const auto spec = oracle::GridSpec::square(lo, hi, cfg.nx.value_or(400));
    const auto ps = exact::partner_state(n, m, p, spec);
    meta["branch"] = "exact";
    meta["n"] = n;
    meta["m"] = m;
    meta["E"] = ps.energy;
    meta["r"] = ps.r;
    meta["norm_ratio"] = ps.norm_ratio;
    meta["grid"] = spec.describe();
    emit(cfg, out, render_field(cfg, ps.field, meta));
    return kOk;
  }
  if (cfg.branch == "qes") {
    const auto adm = qes::admissible_indices(p);
    if (adm.indices.empty()) throw Error(ErrorKind::Inadmissible, adm.diagnostic);
    const auto it = std::find(adm.indices.begin(), adm.indices.end(), cfg.n);
    if (it == adm.indices.end())
      throw UsageError("QES level k = " + std::to_string(cfg.n) + " is not admissible at a = " + format_double(p.a));
    const auto [lo, hi] = cfg.domain_pair().value_or(std::make_pair(-2.0, 12.0));
    const int points = cfg.nx.value_or(800);
    const auto spec = oracle::GridSpec::triangle(lo, hi, points);
    const auto cm = qes::coupling_matrix(p, spec, points / 2);
    const auto states = qes::qes_eigenfunctions(p, spec, cm);
    const auto& s = states[static_cast<std::size_t>(it - adm.indices.begin())];
    meta["branch"] = "qes";
    meta["k"] = s.k;
    meta["E"] = s.energy;
    meta["residual"] = s.residual;
    meta["grid"] = spec.describe();
    emit(cfg, out, render_field(cfg, s.field, meta));
    return kOk;
  }
  throw UsageError("wavefunction supports --branch exact or qes (got '" + cfg.branch + "')");
}

int cmd_verify(const RunConfig& cfg, bool a_given, std::ostream& out) {
  verify::SuiteConfig sc;
  sc.A = cfg.A;
  sc.alpha = cfg.alpha;
  // without --a each suite picks its own coupling
  if (a_given) sc.a = cfg.a;
  sc.k = cfg.k;
  sc.nx = cfg.nx;
  sc.domain = cfg.domain_pair();
  sc.seed = cfg.seed;
  const auto report = verify::run_suite(cfg.suite, sc);
  emit(cfg, out, report.to_json());
  return report.passed() ? kOk : kVerificationFailed;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  const Branch h = parse_hamiltonian(cfg.hamiltonian);
  if (cfg.k < 1) throw UsageError("--k must be >= 1 for the oracle");
  emit(cfg, out, render_oracle(cfg, oracle_levels(cfg, h, cfg.k)));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  bool a_given = false;
  CLI::App app{"Partner spectra of the two-dimensional generalized Morse model", "susysep"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file with default flag values");
  app.add_option("--A", cfg.A, "Morse depth A > 0");
  app.add_option("--alpha", cfg.alpha, "Morse range alpha > 0");
  app.add_option("--a", cfg.a, "coupling a")->each([&](const std::string&) { a_given = true; });
  app.add_option("--branch", cfg.branch, "qes | exact | separable | hierarchy[:k] | oracle");
  app.add_option("--k", cfg.k, "hierarchy depth or number of oracle levels");
  app.add_option("--nx", cfg.nx, "points per axis")->check(CLI::Range(64, 8000));
  app.add_option("--domain", cfg.domain, "x0,x1")->delimiter(',')->expected(2);
  app.add_option("--format", cfg.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", cfg.out, "output path (default: standard output)");
  app.add_option("--seed", cfg.seed, "start-vector seed");

  auto* spectrum = app.add_subcommand("spectrum", "closed-form or oracle spectrum of a branch")->fallthrough();
  spectrum->add_option("--hamiltonian", cfg.hamiltonian, "h0 | h1 (oracle branch)");
  auto* wave = app.add_subcommand("wavefunction", "sampled eigenfunction as x1,x2,psi")->fallthrough();
  wave->add_option("--n", cfg.n, "first level (QES level k for --branch qes)");
  wave->add_option("--m", cfg.m, "second level");
  auto* ver = app.add_subcommand("verify", "run a verification suite")->fallthrough();
  ver->add_option("--suite", cfg.suite, "suite name")->required();
  auto* orc = app.add_subcommand("oracle", "finite-difference eigenvalues with analytic comparison")->fallthrough();
  orc->add_option("--hamiltonian", cfg.hamiltonian, "h0 | h1");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kUsage;
  }

  try {
    if (!cfg.domain.empty() && !(cfg.domain[0] < cfg.domain[1]))
      throw UsageError("--domain needs x0 < x1");
    cfg.params();  // validates A, alpha, a before any computation
    if (ver->parsed()) return cmd_verify(cfg, a_given, out);
    if (spectrum->parsed()) return cmd_spectrum(cfg, out);
    if (wave->parsed()) return cmd_wavefunction(cfg, out);
    if (orc->parsed()) return cmd_oracle(cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace susysep::cli
