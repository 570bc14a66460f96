#include "bvmlab/posterior.hpp"

#include "bvmlab/quadrature.hpp"
#include "bvmlab/special.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <stdexcept>

namespace bvmlab::posterior {

namespace {

void require_positive(std::span<const double> v, const char* who) {
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw std::domain_error(std::string(who) + ": parameters must be positive and finite");
    }
  }
}

double gaussian_density(double x, double mean, double var) {
  const double z = x - mean;
  return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

}  // namespace

Posterior Posterior::gamma(double shape, double rate) {
  std::vector<double> p{shape, rate};
  require_positive(p, "Posterior::gamma");
  return Posterior(Kind::kGamma, std::move(p));
}

Posterior Posterior::dirichlet(std::vector<double> alpha) {
  if (alpha.size() < 2) throw std::invalid_argument("Posterior::dirichlet: need at least 2 categories");
  require_positive(alpha, "Posterior::dirichlet");
  return Posterior(Kind::kDirichlet, std::move(alpha));
}

double Posterior::shape() const {
  if (kind_ != Kind::kGamma) throw std::logic_error("Posterior::shape: not a Gamma posterior");
  return params_[0];
}

double Posterior::rate() const {
  if (kind_ != Kind::kGamma) throw std::logic_error("Posterior::rate: not a Gamma posterior");
  return params_[1];
}

std::size_t Posterior::dim() const {
  return kind_ == Kind::kGamma ? 1 : params_.size() - 1;
}

std::vector<double> Posterior::mean() const {
  if (kind_ == Kind::kGamma) return {params_[0] / params_[1]};
  const double total = std::accumulate(params_.begin(), params_.end(), 0.0);
  std::vector<double> m(dim());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = params_[k] / total;
  return m;
}

std::vector<double> Posterior::sd() const {
  if (kind_ == Kind::kGamma) return {std::sqrt(params_[0]) / params_[1]};
  const double total = std::accumulate(params_.begin(), params_.end(), 0.0);
  std::vector<double> s(dim());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double p = params_[k] / total;
    s[k] = std::sqrt(p * (1.0 - p) / (total + 1.0));
  }
  return s;
}

double Posterior::log_density(double theta) const {
  if (kind_ != Kind::kGamma) throw std::domain_error("Posterior::density: only 1-D posteriors have a density");
  if (theta <= 0.0) return -std::numeric_limits<double>::infinity();
  const double a = params_[0];
  const double b = params_[1];
  return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(theta) - b * theta;
}

double Posterior::density(double theta) const {
  const double ld = log_density(theta);
  return std::isinf(ld) ? 0.0 : std::exp(ld);
}

double Posterior::cdf(double theta) const {
  if (kind_ != Kind::kGamma) throw std::domain_error("Posterior::cdf: only 1-D posteriors have a cdf");
  return special::incomplete_gamma_p(params_[0], params_[1] * theta);
}

std::pair<double, double> Posterior::marginal_beta(std::size_t k) const {
  if (kind_ != Kind::kDirichlet) throw std::domain_error("Posterior::marginal_beta: not a Dirichlet posterior");
  if (k >= params_.size()) throw std::out_of_range("Posterior::marginal_beta: index");
  const double total = std::accumulate(params_.begin(), params_.end(), 0.0);
  return {params_[k], total - params_[k]};
}

double Posterior::marginal_quantile(std::size_t k, double u) const {
  if (kind_ == Kind::kGamma) {
    if (k != 0) throw std::out_of_range("Posterior::marginal_quantile: index");
    return special::gamma_quantile(u, params_[0], params_[1]);
  }
  const auto [a, b] = marginal_beta(k);
  return special::beta_quantile(u, a, b);
}

double Posterior::marginal_cdf(std::size_t k, double x) const {
  if (kind_ == Kind::kGamma) {
    if (k != 0) throw std::out_of_range("Posterior::marginal_cdf: index");
    return cdf(x);
  }
  const auto [a, b] = marginal_beta(k);
  return special::incomplete_beta(x, a, b);
}

std::vector<double> Posterior::sample(std::size_t count, RngStream& rng) const {
  if (kind_ == Kind::kGamma) return gamma_sampler(params_[0], params_[1], count, rng);
  const std::size_t d = params_.size();
  const std::vector<double> full = dirichlet_sampler(params_, count, rng);
  std::vector<double> out(count * (d - 1));
  for (std::size_t s = 0; s < count; ++s) {
    std::copy_n(full.begin() + static_cast<std::ptrdiff_t>(s * d), d - 1,
                out.begin() + static_cast<std::ptrdiff_t>(s * (d - 1)));
  }
  return out;
}

std::vector<double> Posterior::sample_stratified(std::size_t count, RngStream& rng) const {
  std::vector<double> draws = sample(count, rng);
  if (count == 0) return draws;
  const std::size_t p = dim();
  std::vector<double> levels(count);
  for (std::size_t r = 0; r < count; ++r) {
    levels[r] = (static_cast<double>(r) + 0.5) / static_cast<double>(count);
  }
  std::vector<std::size_t> order(count);
  for (std::size_t k = 0; k < p; ++k) {
    std::vector<double> grid;
    if (kind_ == Kind::kGamma) {
      grid.resize(count);
      for (std::size_t r = 0; r < count; ++r) grid[r] = special::gamma_quantile(levels[r], params_[0], params_[1]);
    } else {
      const auto [a, b] = marginal_beta(k);
      grid = special::beta_quantile_grid(levels, a, b);
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return draws[i * p + k] < draws[j * p + k];
    });
    for (std::size_t r = 0; r < count; ++r) draws[order[r] * p + k] = grid[r];
  }
  return draws;
}

Posterior update_exp_gamma(double a, double b, std::span<const double> data) {
  if (!(a > 0.0 && b > 0.0)) throw std::domain_error("update_exp_gamma: prior parameters must be positive");
  double sum = 0.0;
  for (double x : data) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("update_exp_gamma: data must be positive");
    sum += x;
  }
  return Posterior::gamma(a + static_cast<double>(data.size()), b + sum);
}

Posterior update_mult_dirichlet(std::span<const double> alpha, std::span<const double> data) {
  const std::size_t d = alpha.size();
  if (d < 2) throw std::invalid_argument("update_mult_dirichlet: need at least 2 categories");
  if (data.size() % d != 0) throw std::invalid_argument("update_mult_dirichlet: data is not n x d");
  std::vector<double> counts(d, 0.0);
  for (std::size_t i = 0; i < data.size(); i += d) {
    int ones = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const double v = data[i + k];
      if (v == 1.0) {
        ++ones;
        counts[k] += 1.0;
      } else if (v != 0.0) {
        ones = -1;
        break;
      }
    }
    if (ones != 1) throw std::domain_error("update_mult_dirichlet: observation is not a unit vector");
  }
  return update_mult_dirichlet_counts(alpha, counts);
}

Posterior update_mult_dirichlet_counts(std::span<const double> alpha,
                                       std::span<const double> counts) {
  if (alpha.size() != counts.size()) throw std::invalid_argument("update_mult_dirichlet: size mismatch");
  require_positive(alpha, "update_mult_dirichlet");
  std::vector<double> post(alpha.begin(), alpha.end());
  for (std::size_t k = 0; k < post.size(); ++k) {
    if (counts[k] < 0.0) throw std::domain_error("update_mult_dirichlet: negative count");
    post[k] += counts[k];
  }
  return Posterior::dirichlet(std::move(post));
}

double posterior_tv_to_gaussian(const Posterior& post, double center, double var) {
  if (post.kind() != Kind::kGamma) {
    throw std::domain_error("posterior_tv_to_gaussian: only 1-D posteriors are supported");
  }
  if (!(var > 0.0)) throw std::domain_error("posterior_tv_to_gaussian: variance must be positive");
  const double m = post.mean()[0];
  const double s = post.sd()[0];
  const double g = std::sqrt(var);
  const double lo = std::min(m - 12.0 * s, center - 12.0 * g);
  const double hi = std::max(m + 12.0 * s, center + 12.0 * g);
  auto diff = [&](double x) { return std::abs(post.density(x) - gaussian_density(x, center, var)); };
  // Split at 0 and at both centers so the kinks and the support edge fall on
  // panel boundaries.
  std::vector<double> cuts{lo, hi};
  for (double c : {0.0, m, center}) {
    if (c > lo && c < hi) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) total += quad::integrate(diff, cuts[i], cuts[i + 1], 1e-12);
  }
  return std::clamp(0.5 * total, 0.0, 1.0);
}

double posterior_tail_mass(const Posterior& post, double theta0, double radius) {
  if (post.kind() != Kind::kGamma) {
    throw std::domain_error("posterior_tail_mass: only 1-D posteriors are supported");
  }
  if (!(radius > 0.0)) throw std::domain_error("posterior_tail_mass: radius must be positive");
  const double upper = 1.0 - post.cdf(theta0 + radius);
  const double lower = theta0 - radius > 0.0 ? post.cdf(theta0 - radius) : 0.0;
  return lower + upper;
}

}  // namespace bvmlab::posterior
