#pragma once

// Diagnostics for the Gaussian limit of sqrt(n)(theta_hat - theta0).

#include "bvmlab/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bvmlab::asymptotics {

struct ReplicationSet {
  std::size_t n = 0;
  std::vector<double> theta0;
  /// Row-major M x d.
  std::vector<double> estimates;
  std::string loss_name;
  std::uint64_t seed = 0;

  std::size_t dim() const { return theta0.size(); }
  std::size_t count() const { return theta0.empty() ? 0 : estimates.size() / theta0.size(); }
};

/// Rows sqrt(n) (theta_hat - theta0), row-major M x d.
std::vector<double> scaled_errors(const ReplicationSet& reps);

/// Rows I^{1/2} sqrt(n) (theta_hat - theta0) with the symmetric square root.
/// Throws std::domain_error unless fisher is symmetric positive definite.
std::vector<double> standardize(const ReplicationSet& reps, const Eigen::MatrixXd& fisher);

/// sup_x |F_M(x) - Phi(x)|, exact over the sorted sample.
double ks_statistic(std::span<const double> samples);

/// (Phi^{-1}((i - 1/2)/M), x_(i)) for i = 1..M.
std::vector<std::pair<double, double>> qq_points(std::span<const double> samples);

/// Empirical W2 between the scaled errors and M fresh draws of N(0, fisher^{-1}).
double gaussian_limit_distance(const ReplicationSet& reps, const Eigen::MatrixXd& fisher,
                               RngStream& rng);

/// Empirical W2 between two equal-size row-major point sets of dimension d <= 2.
double empirical_w2(std::span<const double> x, std::span<const double> y, std::size_t d);

}  // namespace bvmlab::asymptotics
