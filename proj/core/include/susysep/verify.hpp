#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "susysep/model2d.hpp"

namespace susysep::verify {

/// Where a target value comes from: a closed-form substitution, a numerical
/// measurement, or a qualitative statement of the model's published analysis.
enum class Tag { Analytic, Numerical, Published };

std::string_view to_string(Tag tag);

enum class Compare {
  AbsDiff,  // |measured - target| <= tol
  RelDiff,  // |measured - target| <= tol |target|
  AtMost,   // measured <= tol
  AtLeast,  // measured >= tol
};

struct Check {
  std::string id;
  std::string description;
  std::string anchor;
  Tag tag = Tag::Numerical;
  double measured = 0.0;
  double target = 0.0;
  double tol = 0.0;
  Compare compare = Compare::AtMost;
  bool pass = false;
  std::string grid;
  std::optional<double> order;
  /// Measured values on successive grids, coarse to fine.
  std::vector<double> trend;
  bool skipped = false;
  std::string reason;
  std::vector<std::pair<std::string, std::string>> details;
};

struct Report {
  std::string suite;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<Check> checks;

  /// True iff every non-skipped check passes.
  bool passed() const;
  /// {"suite", "metadata", "tolerances", "checks": [{id, anchor, tag, measured, target, tol, pass, ...}]}.
  std::string to_json() const;
};

struct Tolerance {
  std::string_view id;
  double value;
  std::string_view meaning;
};

/// The single table of tolerances used by every suite.
const std::vector<Tolerance>& tolerance_table();
/// Throws Error{InvalidParameter} for an unknown id.
double tolerance(std::string_view id);

struct SuiteConfig {
  double A = 30.25;
  double alpha = 1.0;
  /// Coupling; each suite falls back to its natural default when unset
  /// (-1 for shape, zeromodes and qes; -1/2 for exact and hierarchy).
  std::optional<double> a;
  /// Hierarchy depth for the hierarchy suite.
  int k = 1;
  /// Overrides the production points per axis of the suite's grids.
  std::optional<int> nx;
  /// Overrides the suite's domain [lo, hi] (per axis).
  std::optional<std::pair<double, double>> domain;
  std::uint64_t seed = 20100924;
};

const std::vector<std::string>& suite_names();

/// Runs one of: intertwining, zeromodes, qes, exact, hierarchy, shape,
/// oracle-calibration. Throws Error{UnknownSuite}.
Report run_suite(std::string_view name, const SuiteConfig& config);

struct ConvergenceResult {
  std::vector<double> h;
  std::vector<double> error;
  /// Least-squares slope of log(error) against log(h); empty when exact.
  std::optional<double> order;
  /// Every error at round-off level.
  bool exact = false;
};

/// Fits the order of `error` against `h`. Throws Error{InsufficientLevels}
/// for fewer than three levels.
ConvergenceResult fit_order(const std::vector<double>& h, const std::vector<double>& error,
                            double roundoff = 1e-12);

/// Evaluates a known check on the given points-per-axis sequence and fits its
/// order. Ids: intertwining.residual, zeromodes.residual,
/// operators.analytic_vs_grid, shape.identity.
/// Throws Error{InsufficientLevels}, Error{InvalidParameter} for unknown ids.
ConvergenceResult convergence_study(std::string_view check_id, const std::vector<int>& points,
                                    const SuiteConfig& config = {});

}  // namespace susysep::verify
