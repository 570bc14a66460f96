#pragma once

// Loss functions on parameter space: closed forms, gradients, quadratic
// expansions and local-limit losses.

#include "bvmlab/domain.hpp"
#include "bvmlab/special.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bvmlab::losses {

using Point = std::span<const double>;

/// eval(t, theta) = <t - theta, curvature(theta) (t - theta)> + remainder(t, theta).
struct QuadExpansion {
  std::function<Eigen::MatrixXd(Point theta)> curvature;
  std::function<double(Point t, Point theta)> remainder;
};

struct Loss {
  std::string name;
  std::size_t dim = 1;
  Domain domain;
  std::function<double(Point t, Point theta)> eval;
  std::function<std::vector<double>(Point t, Point theta)> grad_t;  // optional
  /// l0(t, h) around theta0; optional.
  std::function<double(Point t, Point h, Point theta0)> local_limit;
  /// Exponent p in c1 |t - theta|^p <= l(t, theta) <= c2 |t - theta|^p.
  double local_order = 2.0;
  std::optional<QuadExpansion> quad;

  double operator()(Point t, Point theta) const { return eval(t, theta); }
  double operator()(double t, double theta) const { return eval(Point(&t, 1), Point(&theta, 1)); }
  double grad1(double t, double theta) const { return grad_t(Point(&t, 1), Point(&theta, 1))[0]; }
};

// Exponential-family intrinsic losses (t, theta > 0).
double hellinger_exp(double t, double theta);
double w2sq_exp(double t, double theta);
double kl_exp(double t, double theta);

// Squared 2-Wasserstein between Pareto(1, t) and Pareto(1, theta), t, theta > 2.
double w2sq_pareto(double t, double theta);
double w2sq_pareto_grad(double t, double theta);
/// A(theta) = 4 / (theta (theta - 2)^3); the loss is (t-theta)^2 A / 2 + xi.
double pareto_curvature_a(double theta);
/// The remainder xi(t, theta) written out explicitly.
double w2sq_pareto_remainder(double t, double theta);

/// Bivariate Gaussian N_2(mean, cov).
struct Gaussian2 {
  std::array<double, 2> mean{};
  special::SymMat2 cov = special::SymMat2::identity();
};

/// Entropic OT cost S_lambda with squared Euclidean cost, closed form.
double sinkhorn_gauss2(const Gaussian2& p, const Gaussian2& q, double lambda);
/// S(P,Q) - S(P,P)/2 - S(Q,Q)/2.
double sinkhorn_centered(const Gaussian2& p, const Gaussian2& q, double lambda);
/// Packs (mu1, mu2, sigma1, sigma2, sigma3) into a Gaussian2.
Gaussian2 gaussian2_from_params(Point params);

/// Stein's loss theta/t - log(theta/t) - 1.
double stein_variance(double t, double theta);

/// L1 distance between N(t, I) and N(theta, I) densities.
double tv_gauss_location(Point t, Point theta);
/// (2/pi)^{1/2} |t - h|.
double tv_gauss_local_limit(Point t, Point h);

/// W1 between Gompertz(t) and Gompertz(theta): |e^theta E1(theta) - e^t E1(t)|.
double w1_gompertz(double t, double theta);
/// L1 norm of the CDF derivative at theta: 1/theta - e^theta E1(theta).
double gompertz_cdf_derivative_l1(double theta);

/// 1 - sum_i min(p_i, theta_i) for probability vectors.
double w2sq_multinomial(Point p, Point theta);
/// sum_{i <= d-1} |a_i - b_i| on reduced simplex coordinates.
double l1_reparam(Point a, Point b);

// Loss objects.
Loss hellinger_exp_loss();
Loss w2sq_exp_loss();
Loss kl_exp_loss();
Loss w2sq_pareto_loss();
Loss sinkhorn_loss(double lambda);
Loss stein_variance_loss();
Loss tv_gauss_location_loss(std::size_t d);
Loss w1_gompertz_loss();
Loss w2sq_multinomial_loss(std::size_t d);
Loss l1_reparam_loss(std::size_t d);
Loss squared_euclidean_loss(std::size_t d, Domain domain);
Loss absolute_loss(Domain domain);

/// Quadratic expansion from a central-difference Hessian in t at t = theta.
QuadExpansion numeric_quad_expansion(const Loss& loss, double step = 1e-4);

/// Lookup by the names used on the command line (e.g. "w2-pareto").
Loss loss_by_name(const std::string& name);
std::vector<std::string> loss_names();

}  // namespace bvmlab::losses
