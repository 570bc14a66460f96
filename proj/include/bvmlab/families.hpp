#pragma once

// Parametric statistical models: density, CDF, quantile, sampler and Fisher
// information for the exponential, Pareto shape, Gompertz, multinomial and
// Gaussian location families.

#include "bvmlab/domain.hpp"
#include "bvmlab/rng.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace bvmlab::families {

using Params = std::span<const double>;

struct ParametricFamily {
  std::string name;
  std::size_t dim = 1;      // parameter dimension
  std::size_t obs_dim = 1;  // dimension of one observation
  Domain domain;

  std::function<double(std::span<const double> x, Params theta)> density;
  // 1-D observation families only; empty otherwise.
  std::function<double(double x, Params theta)> cdf;
  std::function<double(double u, Params theta)> quantile;
  std::function<Eigen::MatrixXd(Params theta)> fisher;
  std::function<Eigen::MatrixXd(Params theta)> fisher_inverse;
  /// n observations, row-major n x obs_dim.
  std::function<std::vector<double>(Params theta, std::size_t n, RngStream& rng)> sample;

  // Scalar conveniences for 1-parameter, 1-D observation families.
  double density1(double x, double theta) const;
  double cdf1(double x, double theta) const;
  double quantile1(double u, double theta) const;
  double fisher1(double theta) const;
};

/// Exp(t), t > 0, density t exp(-t x).
ParametricFamily exponential_family();

/// Pareto(1, t) shape family on x > 1, t > 2.
ParametricFamily pareto_shape_family();
/// Monotone transport map x -> x^{t/theta} pushing Pareto(1,t) to Pareto(1,theta).
double pareto_transport(double t, double theta, double x);

/// Gompertz with shape t > 0: density t exp(t + x - t e^x) on x > 0.
ParametricFamily gompertz_family();

/// Mult(1, p) on the d unit vectors, parametrized by the first d-1 coordinates.
ParametricFamily multinomial_family(std::size_t d);

/// N_d(theta, sigma) with known covariance.
ParametricFamily gaussian_location_family(std::size_t d);
ParametricFamily gaussian_location_family(const Eigen::MatrixXd& sigma);

}  // namespace bvmlab::families
