#include "bvmlab/wass_calculus.hpp"

#include "bvmlab/quadrature.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bvmlab::wass {

namespace {

void require_support(double x) {
  if (!(x > 1.0)) throw std::domain_error("pareto_dual_model: x must exceed 1");
}

}  // namespace

DualPotentialModel pareto_dual_model(double constant) {
  DualPotentialModel m;
  m.family = families::pareto_shape_family();
  m.support_lower = 1.0;
  m.constant = constant;
  m.phi = [constant](double t, double theta, double x) {
    require_support(x);
    const double r = t / theta;
    return constant + x * x - 1.0 + (2.0 * theta / (t + theta)) * (1.0 - std::pow(x, 1.0 + r));
  };
  m.transport = [](double t, double theta, double x) { return families::pareto_transport(t, theta, x); };
  m.transport_dx = [](double t, double theta, double x) {
    require_support(x);
    return (t / theta) * std::pow(x, t / theta - 1.0);
  };
  m.density = [](double t, double x) {
    require_support(x);
    return t * std::pow(x, -t - 1.0);
  };
  m.cdf = [](double t, double x) {
    require_support(x);
    return 1.0 - std::pow(x, -t);
  };
  m.dp_dt = [](double t, double x) {
    require_support(x);
    return -(std::log(x) * t - 1.0) / std::pow(x, t + 1.0);
  };
  m.dF_dt = [](double t, double x) {
    require_support(x);
    return std::log(x) / std::pow(x, t);
  };
  m.d2F_dt2 = [](double t, double x) {
    require_support(x);
    const double l = std::log(x);
    return -l * l / std::pow(x, t);
  };
  return m;
}

double potential_slope(const DualPotentialModel& model, double t, double theta, double x) {
  return 2.0 * (x - model.transport(t, theta, x));
}

std::function<double(double)> gradient_integrand(const DualPotentialModel& model, double t0,
                                                 double theta) {
  return [&model, t0, theta](double x) {
    // Far out phi overflows before the score term underflows to zero.
    const double dp = model.dp_dt(t0, x);
    if (dp == 0.0) return 0.0;
    return model.phi(t0, theta, x) * dp;
  };
}

std::function<double(double)> hessian_transport_integrand(const DualPotentialModel& model,
                                                          double t0, double theta) {
  return [&model, t0, theta](double x) {
    const double d2 = model.d2F_dt2(t0, x);
    if (d2 == 0.0) return 0.0;
    return (model.transport(t0, theta, x) - x) * d2;
  };
}

std::function<double(double)> hessian_score_integrand(const DualPotentialModel& model, double t0,
                                                      double theta) {
  return [&model, t0, theta](double x) {
    const double p = model.density(t0, x);
    if (p == 0.0) return 0.0;
    const double df = model.dF_dt(t0, x);
    return model.transport_dx(t0, theta, x) * df * df / p;
  };
}

double integrate_support(const std::function<double(double)>& f, double lower, double tol) {
  // x = lower e^s: a power tail x^{-q} becomes e^{-(q-1)s}, which stays
  // smooth where the x = 1/(1-u) map leaves an endpoint singularity.
  auto mapped = [&](double s) {
    const double x = lower * std::exp(s);
    // Past 1e100 the integrands of interest are below e^{-100}.
    if (x > 1e100) return 0.0;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v * x;
  };
  const quad::Estimate est = quad::gauss_kronrod(mapped, 0.0, std::numeric_limits<double>::infinity(), tol);
  const double limit = 1e3 * std::max(tol, 1e-8 * std::abs(est.value));
  if (!std::isfinite(est.value) || !(est.error <= limit)) {
    std::ostringstream msg;
    msg << "integrate_support: quadrature did not converge (value " << est.value << ", error estimate "
        << est.error << "); the integrand may not be integrable";
    throw std::runtime_error(msg.str());
  }
  return est.value;
}

double w2_gradient_dual(const DualPotentialModel& model, double t0, double theta) {
  return integrate_support(gradient_integrand(model, t0, theta), model.support_lower);
}

double w2_hessian_dual(const DualPotentialModel& model, double t0, double theta) {
  const double a = integrate_support(hessian_transport_integrand(model, t0, theta), model.support_lower);
  const double b = integrate_support(hessian_score_integrand(model, t0, theta), model.support_lower);
  return 2.0 * (a + b);
}

}  // namespace bvmlab::wass
