#include "bvmlab/families.hpp"

#include "bvmlab/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bvmlab::families {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_in_domain(const Domain& domain, Params theta, const std::string& who) {
  if (!domain.contains(theta)) throw std::domain_error(who + ": parameter outside the model domain");
}

void require_unit(double u, const std::string& who) {
  if (!(u >= 0.0 && u < 1.0)) throw std::domain_error(who + ": quantile level must lie in [0, 1)");
}

Eigen::MatrixXd scalar_matrix(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

// Shared shape for one-parameter families whose Fisher information is 1/t^2.
ParametricFamily scalar_family(std::string name, Domain domain) {
  ParametricFamily fam;
  fam.name = std::move(name);
  fam.domain = std::move(domain);
  fam.fisher = [dom = fam.domain, nm = fam.name](Params th) {
    require_in_domain(dom, th, nm);
    return scalar_matrix(1.0 / (th[0] * th[0]));
  };
  fam.fisher_inverse = [dom = fam.domain, nm = fam.name](Params th) {
    require_in_domain(dom, th, nm);
    return scalar_matrix(th[0] * th[0]);
  };
  return fam;
}

// Inverse-CDF sampler for a 1-D family.
void attach_quantile_sampler(ParametricFamily& fam) {
  fam.sample = [q = fam.quantile](Params th, std::size_t n, RngStream& rng) {
    std::vector<double> out(n);
    for (double& x : out) x = q(rng.uniform(), th);
    return out;
  };
}

// Reduced multinomial parameter a -> full probability vector (a, 1 - sum a).
std::vector<double> full_probs(Params a) {
  std::vector<double> p(a.begin(), a.end());
  double sum = 0.0;
  for (double v : a) sum += v;
  p.push_back(1.0 - sum);
  return p;
}

}  // namespace

double ParametricFamily::density1(double x, double theta) const {
  return density(std::span<const double>(&x, 1), Params(&theta, 1));
}
double ParametricFamily::cdf1(double x, double theta) const { return cdf(x, Params(&theta, 1)); }
double ParametricFamily::quantile1(double u, double theta) const {
  return quantile(u, Params(&theta, 1));
}
double ParametricFamily::fisher1(double theta) const { return fisher(Params(&theta, 1))(0, 0); }

ParametricFamily exponential_family() {
  ParametricFamily fam = scalar_family("exponential", Domain::positive_half_line());
  fam.density = [fam_domain = fam.domain](std::span<const double> x, Params th) {
    require_in_domain(fam_domain, th, "exponential");
    return x[0] < 0.0 ? 0.0 : th[0] * std::exp(-th[0] * x[0]);
  };
  fam.cdf = [fam_domain = fam.domain](double x, Params th) {
    require_in_domain(fam_domain, th, "exponential");
    return x <= 0.0 ? 0.0 : -std::expm1(-th[0] * x);
  };
  fam.quantile = [fam_domain = fam.domain](double u, Params th) {
    require_in_domain(fam_domain, th, "exponential");
    require_unit(u, "exponential");
    return -std::log1p(-u) / th[0];
  };
  attach_quantile_sampler(fam);
  return fam;
}

ParametricFamily pareto_shape_family() {
  ParametricFamily fam = scalar_family("pareto", Domain::open_box({2.0}, {kInf}));
  fam.density = [dom = fam.domain](std::span<const double> x, Params th) {
    require_in_domain(dom, th, "pareto");
    return x[0] <= 1.0 ? 0.0 : th[0] * std::pow(x[0], -th[0] - 1.0);
  };
  fam.cdf = [dom = fam.domain](double x, Params th) {
    require_in_domain(dom, th, "pareto");
    return x <= 1.0 ? 0.0 : 1.0 - std::pow(x, -th[0]);
  };
  fam.quantile = [dom = fam.domain](double u, Params th) {
    require_in_domain(dom, th, "pareto");
    require_unit(u, "pareto");
    return std::pow(1.0 - u, -1.0 / th[0]);
  };
  attach_quantile_sampler(fam);
  return fam;
}

double pareto_transport(double t, double theta, double x) {
  if (!(t > 2.0 && theta > 2.0)) throw std::domain_error("pareto_transport: shapes must exceed 2");
  if (!(x > 1.0)) throw std::domain_error("pareto_transport: x must exceed 1");
  return std::pow(x, t / theta);
}

ParametricFamily gompertz_family() {
  ParametricFamily fam = scalar_family("gompertz", Domain::positive_half_line());
  fam.density = [dom = fam.domain](std::span<const double> x, Params th) {
    require_in_domain(dom, th, "gompertz");
    if (x[0] < 0.0) return 0.0;
    return th[0] * std::exp(th[0] + x[0] - th[0] * std::exp(x[0]));
  };
  fam.cdf = [dom = fam.domain](double x, Params th) {
    require_in_domain(dom, th, "gompertz");
    return x <= 0.0 ? 0.0 : -std::expm1(-th[0] * std::expm1(x));
  };
  fam.quantile = [dom = fam.domain](double u, Params th) {
    require_in_domain(dom, th, "gompertz");
    require_unit(u, "gompertz");
    return std::log1p(-std::log1p(-u) / th[0]);
  };
  attach_quantile_sampler(fam);
  return fam;
}

ParametricFamily multinomial_family(std::size_t d) {
  if (d < 2) throw std::invalid_argument("multinomial_family: d must be at least 2");
  ParametricFamily fam;
  fam.name = "multinomial";
  fam.dim = d - 1;
  fam.obs_dim = d;
  fam.domain = Domain::reduced_simplex(d - 1);
  const Domain dom = fam.domain;

  auto interior_probs = [dom](Params a) {
    if (!dom.contains(a)) throw std::domain_error("multinomial: parameter off the simplex");
    auto p = full_probs(a);
    for (double v : p) {
      if (!(v > 0.0)) throw std::domain_error("multinomial: Fisher information needs interior p");
    }
    return p;
  };

  fam.density = [dom, d](std::span<const double> x, Params a) {
    if (!dom.contains(a)) throw std::domain_error("multinomial: parameter off the simplex");
    const auto p = full_probs(a);
    for (std::size_t k = 0; k < d; ++k) {
      if (x[k] == 1.0) return p[k];
    }
    return 0.0;
  };
  fam.fisher = [interior_probs, d](Params a) {
    const auto p = interior_probs(a);
    const std::size_t m = d - 1;
    Eigen::MatrixXd info = Eigen::MatrixXd::Constant(m, m, 1.0 / p[m]);
    for (std::size_t k = 0; k < m; ++k) info(k, k) += 1.0 / p[k];
    return info;
  };
  fam.fisher_inverse = [interior_probs, d](Params a) {
    const auto p = interior_probs(a);
    const std::size_t m = d - 1;
    Eigen::MatrixXd inv(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) inv(i, j) = i == j ? p[i] * (1.0 - p[i]) : -p[i] * p[j];
    }
    return inv;
  };
  fam.sample = [dom, d](Params a, std::size_t n, RngStream& rng) {
    if (!dom.contains(a)) throw std::domain_error("multinomial: parameter off the simplex");
    const auto p = full_probs(a);
    std::vector<double> out(n * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) out[i * d + rng.categorical(p)] = 1.0;
    return out;
  };
  return fam;
}

ParametricFamily gaussian_location_family(std::size_t d) {
  return gaussian_location_family(Eigen::MatrixXd::Identity(d, d));
}

ParametricFamily gaussian_location_family(const Eigen::MatrixXd& sigma) {
  const auto d = static_cast<std::size_t>(sigma.rows());
  if (sigma.rows() != sigma.cols() || d == 0) {
    throw std::invalid_argument("gaussian_location_family: covariance must be square");
  }
  if (!sigma.isApprox(sigma.transpose())) {
    throw std::domain_error("gaussian_location_family: covariance must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("gaussian_location_family: covariance must be positive definite");
  }
  const Eigen::MatrixXd chol = llt.matrixL();
  const Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(sigma.rows(), sigma.rows()));
  const double log_norm = -0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) -
                          chol.diagonal().array().log().sum();

  ParametricFamily fam;
  fam.name = "gaussian_location";
  fam.dim = d;
  fam.obs_dim = d;
  fam.domain = Domain::whole_space(d);
  fam.density = [llt, log_norm, d](std::span<const double> x, Params th) {
    if (th.size() != d || x.size() < d) throw std::invalid_argument("gaussian_location: dimension");
    Eigen::VectorXd r(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) r(static_cast<Eigen::Index>(k)) = x[k] - th[k];
    const double q = r.dot(llt.solve(r));
    return std::exp(log_norm - 0.5 * q);
  };
  if (d == 1) {
    const double sd = std::sqrt(sigma(0, 0));
    fam.cdf = [sd](double x, Params th) { return special::normal_cdf((x - th[0]) / sd); };
    fam.quantile = [sd](double u, Params th) {
      if (!(u > 0.0 && u < 1.0)) throw std::domain_error("gaussian_location: u must lie in (0, 1)");
      return th[0] + sd * special::normal_quantile(u);
    };
  }
  fam.fisher = [precision, d](Params th) {
    if (th.size() != d) throw std::invalid_argument("gaussian_location: dimension");
    return precision;
  };
  fam.fisher_inverse = [sigma, d](Params th) {
    if (th.size() != d) throw std::invalid_argument("gaussian_location: dimension");
    return Eigen::MatrixXd(sigma);
  };
  fam.sample = [chol, d](Params th, std::size_t n, RngStream& rng) {
    std::vector<double> out(n * d);
    Eigen::VectorXd z(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : z) v = rng.normal();
      const Eigen::VectorXd x = chol * z;
      for (std::size_t k = 0; k < d; ++k) out[i * d + k] = th[k] + x(static_cast<Eigen::Index>(k));
    }
    return out;
  };
  return fam;
}

}  // namespace bvmlab::families
