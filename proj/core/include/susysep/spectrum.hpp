#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace susysep {

/// One labeled level. Two-index branches fill `n` and `m`; the QES branch
/// uses `n` for its level index k and leaves `m` empty.
struct SpectrumLevel {
  int n = 0;
  std::optional<int> m;
  double energy = 0.0;
  int degeneracy = 1;
  bool retained = true;
  std::string notes;
  /// How the energy was obtained: "closed-form", "oracle", "galerkin", ...
  std::string provenance;
};

struct SpectrumTable {
  std::string branch;
  std::vector<SpectrumLevel> levels;
  /// Ordered key/value pairs carried into JSON output (parameters, grid, flags).
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_metadata(std::string key, std::string value);
  std::optional<std::string> metadata_value(const std::string& key) const;
  std::vector<double> energies() const;

  /// {"branch", "metadata", "levels": [{n, m|k, E, degeneracy, retained, notes, provenance}]}.
  std::string to_json() const;
  /// Header `n,m,E,retained` for two-index branches and `k,E,retained` otherwise.
  std::string to_csv() const;
};

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double x);

}  // namespace susysep
