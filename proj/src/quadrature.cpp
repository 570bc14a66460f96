#include "bvmlab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>

namespace bvmlab::quad {

Estimate gauss_kronrod(const Integrand& f, double a, double b, double tol) {
  Estimate out;
  out.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, tol,
                                                                            &out.error);
  return out;
}

Estimate tanh_sinh(const Integrand& f, double a, double b, double tol) {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  Estimate out;
  out.value = rule.integrate(f, a, b, tol, &out.error);
  return out;
}

double integrate(const Integrand& f, double a, double b, double tol) {
  return gauss_kronrod(f, a, b, tol).value;
}

double integrate_half_line(const Integrand& f, double a, double tol) {
  auto mapped = [&](double u) {
    const double w = 1.0 - u;
    const double x = a + u / w;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v / (w * w);
  };
  return tanh_sinh(mapped, 0.0, 1.0, tol).value;
}

}  // namespace bvmlab::quad
