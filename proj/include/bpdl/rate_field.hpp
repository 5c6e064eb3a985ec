#pragma once

#include <functional>
#include <vector>

#include "bpdl/domain.hpp"

namespace bpdl {

/// A nonnegative rate x -> r(x) (units 1/time). Constant fields take a
/// fast path everywhere in the engine.
class RateField {
 public:
  RateField() = default;

  static RateField constant(double value);
  /// Arbitrary closure. `bound` is the caller's envelope for sup r.
  static RateField function(std::function<double(const Point&)> fn, double bound);
  /// Piecewise-linear in the first coordinate through (xs, values);
  /// clamped to the end values outside the table.
  static RateField tabulated(std::vector<double> xs, std::vector<double> values);

  double operator()(const Point& x) const {
    if (kind_ == Kind::constant) return value_;
    return eval(x);
  }

  bool is_constant() const { return kind_ == Kind::constant; }
  double constant_value() const { return value_; }
  bool is_tabulated() const { return kind_ == Kind::tabulated; }

  /// Exact supremum when known (constant, tabulated), else the declared bound.
  double bound() const { return bound_; }
  bool bound_is_exact() const { return kind_ != Kind::function; }

  const std::vector<double>& table_x() const { return xs_; }
  const std::vector<double>& table_values() const { return values_; }

 private:
  enum class Kind { constant, function, tabulated };

  double eval(const Point& x) const;

  Kind kind_ = Kind::constant;
  double value_ = 0.0;
  double bound_ = 0.0;
  std::function<double(const Point&)> fn_;
  std::vector<double> xs_;
  std::vector<double> values_;
};

}  // namespace bpdl
