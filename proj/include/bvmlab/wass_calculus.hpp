#pragma once

// Parameter derivatives of the squared 2-Wasserstein distance of a 1-D
// parametric family, computed from the dual potential and the monotone
// transport map.

#include "bvmlab/families.hpp"

#include <functional>

namespace bvmlab::wass {

struct DualPotentialModel {
  families::ParametricFamily family;
  /// Left end of the support; integrals run over (support_lower, inf).
  double support_lower = 0.0;
  /// Additive constant of the potential.
  double constant = 0.0;

  std::function<double(double t, double theta, double x)> phi;
  std::function<double(double t, double theta, double x)> transport;
  std::function<double(double t, double theta, double x)> transport_dx;
  std::function<double(double t, double x)> density;
  std::function<double(double t, double x)> cdf;
  std::function<double(double t, double x)> dp_dt;
  std::function<double(double t, double x)> dF_dt;
  std::function<double(double t, double x)> d2F_dt2;
};

/// Pareto(1, t) shape family, x > 1:
///   phi = C + x^2 - 1 + (2 theta / (t + theta)) (1 - x^{1 + t/theta}),
///   T = x^{t/theta}, dp = -(t log x - 1) / x^{t+1}, dF = log x / x^t,
///   d2F = -log(x)^2 / x^t.
DualPotentialModel pareto_dual_model(double constant = 0.0);

/// 2 (x - T(x)), which the x-derivative of phi must reproduce.
double potential_slope(const DualPotentialModel& model, double t, double theta, double x);

/// Integrands of the two formulas, as functions of x.
std::function<double(double)> gradient_integrand(const DualPotentialModel& model, double t0,
                                                 double theta);
std::function<double(double)> hessian_transport_integrand(const DualPotentialModel& model,
                                                          double t0, double theta);
std::function<double(double)> hessian_score_integrand(const DualPotentialModel& model, double t0,
                                                      double theta);

/// Integral over (lower, inf) through x = lower e^s and adaptive
/// Gauss-Kronrod on (0, inf); lower must be positive. Throws std::runtime_error when the estimate is
/// not finite or its error estimate exceeds max(tol, 1e-8 |value|) * 1e3.
double integrate_support(const std::function<double(double)>& f, double lower, double tol = 1e-10);

/// int phi(x) dp/dt(x) dx at t = t0.
double w2_gradient_dual(const DualPotentialModel& model, double t0, double theta);
/// 2 ( int (T - x) d2F dx + int T' (dF)^2 / p dx ) at t = t0.
double w2_hessian_dual(const DualPotentialModel& model, double t0, double theta);

}  // namespace bvmlab::wass
