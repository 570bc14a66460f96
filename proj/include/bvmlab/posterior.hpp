#pragma once

// Exact conjugate posteriors: Gamma for the exponential model and Dirichlet
// for the multinomial model.

#include "bvmlab/rng.hpp"

#include <span>
#include <utility>
#include <vector>

namespace bvmlab::posterior {

enum class Kind { kGamma, kDirichlet };

class Posterior {
 public:
  static Posterior gamma(double shape, double rate);
  static Posterior dirichlet(std::vector<double> alpha);

  Kind kind() const { return kind_; }
  /// Gamma: {shape, rate}. Dirichlet: the concentration vector.
  const std::vector<double>& params() const { return params_; }
  double shape() const;
  double rate() const;

  /// Dimension of the parameter: 1 for Gamma, d-1 for Dirichlet (reduced coordinates).
  std::size_t dim() const;
  std::vector<double> mean() const;
  std::vector<double> sd() const;

  /// Gamma only.
  double density(double theta) const;
  double log_density(double theta) const;
  double cdf(double theta) const;

  /// Marginal k (0-based) of the reduced coordinates.
  std::pair<double, double> marginal_beta(std::size_t k) const;
  double marginal_quantile(std::size_t k, double u) const;
  double marginal_cdf(std::size_t k, double x) const;

  /// Row-major S x dim() draws.
  std::vector<double> sample(std::size_t count, RngStream& rng) const;
  /// Draws whose marginals are replaced, rank-preservingly, by exact
  /// marginal quantiles at (rank - 1/2) / S.
  std::vector<double> sample_stratified(std::size_t count, RngStream& rng) const;

 private:
  Posterior(Kind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {}

  Kind kind_;
  std::vector<double> params_;
};

/// Gamma(a + n, b + sum x).
Posterior update_exp_gamma(double a, double b, std::span<const double> data);
/// Dir(alpha + counts); data is row-major n x d with one-hot rows.
Posterior update_mult_dirichlet(std::span<const double> alpha, std::span<const double> data);
Posterior update_mult_dirichlet_counts(std::span<const double> alpha,
                                       std::span<const double> counts);

/// Total variation between a 1-D posterior and N(center, var).
double posterior_tv_to_gaussian(const Posterior& post, double center, double var);

/// Posterior mass of {|theta - theta0| > radius}.
double posterior_tail_mass(const Posterior& post, double theta0, double radius);

}  // namespace bvmlab::posterior
