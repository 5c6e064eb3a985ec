#include "bpdl/rate_field.hpp"

#include <algorithm>

#include "bpdl/errors.hpp"

namespace bpdl {

RateField RateField::constant(double value) {
  RateField f;
  f.kind_ = Kind::constant;
  f.value_ = value;
  f.bound_ = value;
  return f;
}

RateField RateField::function(std::function<double(const Point&)> fn, double bound) {
  RateField f;
  f.kind_ = Kind::function;
  f.fn_ = std::move(fn);
  f.bound_ = bound;
  return f;
}

RateField RateField::tabulated(std::vector<double> xs, std::vector<double> values) {
  if (xs.empty() || xs.size() != values.size()) {
    throw BadConfig("tabulated rate field needs matching, nonempty x/value lists");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw BadConfig("tabulated rate field x must increase");
  }
  RateField f;
  f.kind_ = Kind::tabulated;
  f.bound_ = *std::max_element(values.begin(), values.end());
  f.xs_ = std::move(xs);
  f.values_ = std::move(values);
  return f;
}

double RateField::eval(const Point& x) const {
  if (kind_ == Kind::function) return fn_(x);
  const double u = x[0];
  if (u <= xs_.front()) return values_.front();
  if (u >= xs_.back()) return values_.back();
  auto it = std::upper_bound(xs_.begin(), xs_.end(), u);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
  const double w = (u - xs_[i]) / (xs_[i + 1] - xs_[i]);
  return values_[i] + w * (values_[i + 1] - values_[i]);
}

}  // namespace bpdl
