#pragma once

#include <functional>

namespace bvmlab::quad {

using Integrand = std::function<double(double)>;

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (61-point) on [a, b]; either bound may be infinite.
Estimate gauss_kronrod(const Integrand& f, double a, double b, double tol = 1e-10);

/// Double-exponential rule for integrands with endpoint singularities on a
/// finite interval.
Estimate tanh_sinh(const Integrand& f, double a, double b, double tol = 1e-10);

/// Convenience: value of gauss_kronrod().
double integrate(const Integrand& f, double a, double b, double tol = 1e-10);

/// Integral over (a, inf) through the map x = a + u / (1 - u), evaluated with
/// the double-exponential rule on (0, 1).
double integrate_half_line(const Integrand& f, double a, double tol = 1e-10);

}  // namespace bvmlab::quad
