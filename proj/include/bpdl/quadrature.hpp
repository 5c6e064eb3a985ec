#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bpdl {

/// Adaptive 15-point Gauss-Kronrod on [a, b] against an absolute error
/// target `tol`, bisecting up to `depth` times; the estimated error is added
/// to `err`. Unlike a relative criterion this settles immediately on pieces
/// where the integrand vanishes.
template <class Fn>
double integrate_abs(const Fn& fn, double a, double b, double tol, int depth, double& err) {
  using boost::math::quadrature::gauss_kronrod;
  double e = 0.0;
  const double v = gauss_kronrod<double, 15>::integrate(fn, a, b, 0, 0.0, &e);
  if (e <= tol || depth == 0) {
    err += e;
    return v;
  }
  const double m = 0.5 * (a + b);
  return integrate_abs(fn, a, m, 0.5 * tol, depth - 1, err) +
         integrate_abs(fn, m, b, 0.5 * tol, depth - 1, err);
}

}  // namespace bpdl
