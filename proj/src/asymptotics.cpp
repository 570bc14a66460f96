#include "bvmlab/asymptotics.hpp"

#include "bvmlab/discrete_ot.hpp"
#include "bvmlab/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bvmlab::asymptotics {

namespace {

void validate(const ReplicationSet& reps) {
  const std::size_t d = reps.dim();
  if (d == 0) throw std::invalid_argument("ReplicationSet: empty theta0");
  if (reps.estimates.size() % d != 0) throw std::invalid_argument("ReplicationSet: estimates are not M x d");
  if (reps.count() < 2) throw std::invalid_argument("ReplicationSet: need at least 2 replications");
}

// Symmetric square root (or inverse square root) of an SPD matrix.
Eigen::MatrixXd spd_root(const Eigen::MatrixXd& m, bool inverse) {
  const auto d = m.rows();
  if (m.cols() != d || d == 0) throw std::invalid_argument("spd_root: matrix must be square");
  if (!m.isApprox(m.transpose(), 1e-12)) throw std::domain_error("spd_root: matrix is not symmetric");
  if (d == 1) {
    if (!(m(0, 0) > 0.0)) throw std::domain_error("spd_root: matrix is not positive definite");
    const double r = std::sqrt(m(0, 0));
    return Eigen::MatrixXd::Constant(1, 1, inverse ? 1.0 / r : r);
  }
  if (d == 2) {
    special::SymMat2 s{m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), m(1, 1)};
    if (inverse) s = special::spd2_inverse(s);
    const special::SymMat2 r = special::spd2_sqrt(s);
    Eigen::MatrixXd out(2, 2);
    out << r.a, r.b, r.b, r.c;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::domain_error("spd_root: matrix is not positive definite");
  }
  Eigen::VectorXd ev = eig.eigenvalues().cwiseSqrt();
  if (inverse) ev = ev.cwiseInverse();
  return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

std::vector<double> scaled_errors(const ReplicationSet& reps) {
  validate(reps);
  const std::size_t d = reps.dim();
  const double root_n = std::sqrt(static_cast<double>(reps.n));
  std::vector<double> out(reps.estimates.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = root_n * (reps.estimates[i] - reps.theta0[i % d]);
  return out;
}

std::vector<double> standardize(const ReplicationSet& reps, const Eigen::MatrixXd& fisher) {
  const std::size_t d = reps.dim();
  if (static_cast<std::size_t>(fisher.rows()) != d) throw std::invalid_argument("standardize: fisher size mismatch");
  const Eigen::MatrixXd root = spd_root(fisher, false);
  std::vector<double> z = scaled_errors(reps);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < reps.count(); ++i) {
    const Eigen::Map<const Eigen::VectorXd> row(z.data() + i * d, static_cast<Eigen::Index>(d));
    Eigen::Map<Eigen::VectorXd>(out.data() + i * d, static_cast<Eigen::Index>(d)) = root * row;
  }
  return out;
}

double ks_statistic(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double m = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = special::normal_cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

std::vector<std::pair<double, double>> qq_points(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("qq_points: empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double m = static_cast<double>(x.size());
  std::vector<std::pair<double, double>> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = {special::normal_quantile((static_cast<double>(i) + 0.5) / m), x[i]};
  }
  return out;
}

double empirical_w2(std::span<const double> x, std::span<const double> y, std::size_t d) {
  if (d == 1) return ot::empirical_w2_1d(x, y);
  if (d == 2) return ot::empirical_w2_2d(x, y);
  throw std::domain_error("empirical_w2: only d <= 2 is supported");
}

double gaussian_limit_distance(const ReplicationSet& reps, const Eigen::MatrixXd& fisher,
                               RngStream& rng) {
  const std::size_t d = reps.dim();
  if (d > 2) throw std::domain_error("gaussian_limit_distance: only d <= 2 is supported");
  if (static_cast<std::size_t>(fisher.rows()) != d) {
    throw std::invalid_argument("gaussian_limit_distance: fisher size mismatch");
  }
  const Eigen::MatrixXd cov_root = spd_root(fisher, true);
  const std::vector<double> z = scaled_errors(reps);
  std::vector<double> ref(z.size());
  Eigen::VectorXd e(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < reps.count(); ++i) {
    for (std::size_t k = 0; k < d; ++k) e[static_cast<Eigen::Index>(k)] = rng.normal();
    Eigen::Map<Eigen::VectorXd>(ref.data() + i * d, static_cast<Eigen::Index>(d)) = cov_root * e;
  }
  return empirical_w2(z, ref, d);
}

}  // namespace bvmlab::asymptotics
