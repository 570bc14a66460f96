#include "doctest.h"

#include "bvmlab/families.hpp"
#include "bvmlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

using namespace bvmlab;
using namespace bvmlab::families;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Case {
  ParametricFamily fam;
  double support_lo;
  double theta_lo;
  double theta_hi;
};

std::vector<Case> scalar_cases() {
  return {{exponential_family(), 0.0, 0.2, 5.0},
          {pareto_shape_family(), 1.0, 2.05, 10.0},
          {gompertz_family(), 0.0, 0.2, 5.0}};
}

double ks_against(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double m = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / m - f, f - i / m});
  }
  return d;
}

}  // namespace

TEST_CASE("exponential family examples") {
  const auto fam = exponential_family();
  CHECK(fam.fisher1(2.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(fam.fisher_inverse(std::vector<double>{2.0})(0, 0) == doctest::Approx(4.0));
  CHECK(fam.cdf1(fam.quantile1(0.3, 1.7), 1.7) == doctest::Approx(0.3).epsilon(1e-14));
  const double mass = quad::integrate([&](double x) { return fam.density1(x, 2.0); }, 0.0, kInf);
  CHECK(std::abs(mass - 1.0) <= 1e-8);
  CHECK_THROWS_AS(fam.density1(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(fam.fisher1(-1.0), std::domain_error);
}

TEST_CASE("Pareto shape family examples") {
  const auto fam = pareto_shape_family();
  CHECK(fam.cdf1(2.0, 3.0) == doctest::Approx(0.875).epsilon(1e-15));
  CHECK(pareto_transport(3.0, 4.0, 2.0) == doctest::Approx(1.681793).epsilon(1e-6));
  const double mean = quad::integrate([&](double x) { return x * fam.density1(x, 3.0); }, 1.0, kInf);
  CHECK(mean == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(fam.quantile1(0.5, 3.0) == doctest::Approx(std::pow(0.5, -1.0 / 3.0)));
  CHECK_THROWS_AS(fam.cdf1(2.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(fam.fisher1(1.5), std::domain_error);
}

TEST_CASE("Gompertz family examples") {
  const auto fam = gompertz_family();
  CHECK(fam.cdf1(0.0, 0.7) == 0.0);
  CHECK(fam.cdf1(0.0, 3.0) == 0.0);
  CHECK(fam.cdf1(std::log(2.0), 1.0) == doctest::Approx(0.632121).epsilon(1e-6));
  const double mass = quad::integrate([&](double x) { return fam.density1(x, 2.0); }, 0.0, kInf);
  CHECK(std::abs(mass - 1.0) <= 1e-8);
  CHECK_THROWS_AS(fam.cdf1(1.0, 0.0), std::domain_error);
}

TEST_CASE("cdf inverts quantile on 20 random points per family") {
  RngStream rng(5, 1);
  for (const auto& c : scalar_cases()) {
    for (int i = 0; i < 20; ++i) {
      const double u = rng.uniform();
      const double th = c.theta_lo + (c.theta_hi - c.theta_lo) * rng.uniform();
      CAPTURE(c.fam.name);
      CHECK(std::abs(c.fam.cdf1(c.fam.quantile1(u, th), th) - u) <= 1e-9);
    }
  }
}

TEST_CASE("densities integrate to one") {
  RngStream rng(5, 2);
  for (const auto& c : scalar_cases()) {
    for (int i = 0; i < 5; ++i) {
      const double th = c.theta_lo + (c.theta_hi - c.theta_lo) * rng.uniform();
      const double mass =
          quad::integrate([&](double x) { return c.fam.density1(x, th); }, c.support_lo, kInf);
      CAPTURE(c.fam.name);
      CAPTURE(th);
      CHECK(std::abs(mass - 1.0) <= 1e-6);
    }
  }
}

TEST_CASE("Fisher information matches the score variance by quadrature") {
  RngStream rng(5, 3);
  for (const auto& c : scalar_cases()) {
    for (int i = 0; i < 5; ++i) {
      const double th = c.theta_lo + 0.01 + (c.theta_hi - c.theta_lo - 0.02) * rng.uniform();
      const double h = 1e-5 * th;
      auto score = [&](double x) {
        return (std::log(c.fam.density1(x, th + h)) - std::log(c.fam.density1(x, th - h))) / (2 * h);
      };
      const double info = quad::integrate(
          [&](double x) {
            const double p = c.fam.density1(x, th);
            if (p == 0.0) return 0.0;
            const double s = score(x);
            return s * s * p;
          },
          c.support_lo, kInf, 1e-12);
      CAPTURE(c.fam.name);
      CAPTURE(th);
      CHECK(std::abs(info / c.fam.fisher1(th) - 1.0) <= 1e-4);
    }
  }
}

TEST_CASE("sampler agrees with the cdf (KS over 1e4 draws)") {
  for (const auto& c : scalar_cases()) {
    RngStream rng(5, stream_hash(c.fam.name, {4}));
    const double th = 0.5 * (c.theta_lo + c.theta_hi);
    const std::vector<double> th_v{th};
    const auto x = c.fam.sample(th_v, 10000, rng);
    CAPTURE(c.fam.name);
    CHECK(ks_against(x, [&](double v) { return c.fam.cdf1(v, th); }) <= 0.02);
  }
}

TEST_CASE("multinomial Fisher inverse at the uniform point") {
  const auto fam = multinomial_family(3);
  const std::vector<double> th{1.0 / 3.0, 1.0 / 3.0};
  const Eigen::MatrixXd inv = fam.fisher_inverse(th);
  CHECK(inv(0, 0) == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
  CHECK(inv(1, 1) == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
  CHECK(inv(0, 1) == doctest::Approx(-1.0 / 9.0).epsilon(1e-15));
  CHECK(inv(1, 0) == doctest::Approx(-1.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("multinomial Fisher times its inverse is the identity") {
  RngStream rng(5, 5);
  for (std::size_t d : {2u, 3u, 5u}) {
    const auto fam = multinomial_family(d);
    for (int i = 0; i < 10; ++i) {
      const std::vector<double> alpha(d, 1.0);
      std::vector<double> p = rng.dirichlet(alpha);
      p.pop_back();
      const Eigen::MatrixXd prod = fam.fisher(p) * fam.fisher_inverse(p);
      CHECK((prod - Eigen::MatrixXd::Identity(d - 1, d - 1)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("multinomial Fisher equals the score covariance") {
  const auto fam = multinomial_family(3);
  const std::vector<double> a{0.5, 0.2};
  const double p[3] = {0.5, 0.2, 0.3};
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(2, 2);
  for (int k = 0; k < 3; ++k) {
    // score of log p_k w.r.t. the first two coordinates, p_3 = 1 - a_1 - a_2
    Eigen::Vector2d s(k == 0 ? 1.0 / p[0] : 0.0, k == 1 ? 1.0 / p[1] : 0.0);
    if (k == 2) s = Eigen::Vector2d::Constant(-1.0 / p[2]);
    info += p[k] * s * s.transpose();
  }
  CHECK((info - fam.fisher(a)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("multinomial sampler frequencies") {
  const auto fam = multinomial_family(3);
  const std::vector<double> a{0.6, 0.3};
  RngStream rng(5, 6);
  const auto x = fam.sample(a, 100000, rng);
  double freq[3] = {0, 0, 0};
  for (std::size_t i = 0; i < 100000; ++i) {
    double row = 0.0;
    for (int k = 0; k < 3; ++k) {
      freq[k] += x[3 * i + k];
      row += x[3 * i + k];
    }
    REQUIRE(row == 1.0);
  }
  CHECK(std::abs(freq[0] / 1e5 - 0.6) <= 0.01);
  CHECK(std::abs(freq[1] / 1e5 - 0.3) <= 0.01);
  CHECK(std::abs(freq[2] / 1e5 - 0.1) <= 0.01);
}

TEST_CASE("multinomial rejects boundary and off-simplex parameters") {
  const auto fam = multinomial_family(3);
  CHECK_THROWS_AS(fam.fisher(std::vector<double>{0.0, 0.5}), std::domain_error);
  CHECK_THROWS_AS(fam.fisher(std::vector<double>{0.5, 0.5}), std::domain_error);
  CHECK_THROWS_AS(fam.fisher_inverse(std::vector<double>{0.7, 0.5}), std::domain_error);
}

TEST_CASE("Gaussian location family") {
  const auto fam = gaussian_location_family(2);
  const std::vector<double> th{1.0, 2.0};
  CHECK((fam.fisher(th) - Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
  RngStream rng(5, 7);
  const auto x = fam.sample(th, 100000, rng);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < 100000; ++i) {
    m0 += x[2 * i];
    m1 += x[2 * i + 1];
  }
  CHECK(std::abs(m0 / 1e5 - 1.0) <= 0.02);
  CHECK(std::abs(m1 / 1e5 - 2.0) <= 0.02);

  const auto one = gaussian_location_family(1);
  const double mass = quad::integrate([&](double v) { return one.density1(v, 0.3); }, -kInf, kInf);
  CHECK(std::abs(mass - 1.0) <= 1e-8);

  Eigen::MatrixXd sigma(2, 2);
  sigma << 2.0, 0.5, 0.5, 1.0;
  const auto corr = gaussian_location_family(sigma);
  CHECK((corr.fisher(th) * sigma - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);

  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(gaussian_location_family(bad), std::domain_error);
}
