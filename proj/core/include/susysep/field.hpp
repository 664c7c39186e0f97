#pragma once

#include <functional>
#include <utility>

namespace susysep {

/// Value and partial derivatives up to order two of a scalar field of two
/// variables at one point.
struct Jet2 {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d11 = 0.0;
  double d12 = 0.0;
  double d22 = 0.0;
};

/// Value and first partials; the data a first-order coefficient needs.
struct Jet1 {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Scalar function of (x1, x2) with derivatives on demand.
///
/// `order` is the highest derivative order the evaluator fills in; entries
/// above it are left at zero and must not be used. Evaluators may throw
/// Error{SingularPoint}. `singular` marks points where evaluation is not
/// defined; grid code uses it to mask nodes without triggering exceptions.
class AnalyticField {
 public:
  using Eval = std::function<Jet2(double, double)>;
  using Predicate = std::function<bool(double, double)>;

  AnalyticField() = default;
  AnalyticField(Eval eval, int order, Predicate singular = {})
      : eval_(std::move(eval)), singular_(std::move(singular)), order_(order) {}

  Jet2 operator()(double x1, double x2) const { return eval_(x1, x2); }
  double value(double x1, double x2) const { return eval_(x1, x2).v; }

  int order() const noexcept { return order_; }
  bool is_singular_at(double x1, double x2) const { return singular_ && singular_(x1, x2); }
  bool has_singular_set() const noexcept { return static_cast<bool>(singular_); }
  const Predicate& singular_set() const noexcept { return singular_; }
  explicit operator bool() const noexcept { return static_cast<bool>(eval_); }

 private:
  Eval eval_;
  Predicate singular_;
  int order_ = 0;
};

}  // namespace susysep
