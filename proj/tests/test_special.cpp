#include "doctest.h"

#include "bvmlab/quadrature.hpp"
#include "bvmlab/rng.hpp"
#include "bvmlab/special.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace bvmlab;
using namespace bvmlab::special;

namespace {

// E1 by direct quadrature of exp(-u)/u on (s, inf).
double e1_quadrature(double s) {
  return quad::integrate([](double u) { return std::exp(-u) / u; }, s,
                         std::numeric_limits<double>::infinity(), 1e-14);
}

}  // namespace

TEST_CASE("E1 matches quadrature at the reference points") {
  CHECK(exp_integral_e1(1.0) == doctest::Approx(e1_quadrature(1.0)).epsilon(1e-12));
  CHECK(exp_integral_e1(2.0) == doctest::Approx(e1_quadrature(2.0)).epsilon(1e-12));
  CHECK(exp_integral_e1(1.0) == doctest::Approx(0.219384).epsilon(1e-5));
  CHECK(exp_integral_e1(2.0) == doctest::Approx(0.048901).epsilon(1e-4));
}

TEST_CASE("E1 absolute error on [1e-6, 50]") {
  for (double s : {1e-6, 1e-3, 0.1, 0.5, 0.999, 1.0, 1.001, 2.0, 5.0, 10.0, 25.0, 50.0}) {
    CAPTURE(s);
    CHECK(std::abs(exp_integral_e1(s) - boost::math::expint(1, s)) <= 1e-12);
  }
}

TEST_CASE("E1 decreases to zero") {
  double prev = exp_integral_e1(1.0);
  for (double s = 2.0; s <= 60.0; s += 1.0) {
    const double v = exp_integral_e1(s);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
  CHECK(prev < 1e-26);
}

TEST_CASE("E1 derivative is -exp(-s)/s") {
  for (double s : {0.5, 1.0, 2.0, 5.0}) {
    const double h = 1e-5;
    const double fd = (exp_integral_e1(s + h) - exp_integral_e1(s - h)) / (2 * h);
    CHECK(std::abs(fd + std::exp(-s) / s) <= 1e-6);
  }
}

TEST_CASE("E1 rejects non-positive arguments") {
  CHECK_THROWS_AS(exp_integral_e1(0.0), std::domain_error);
  CHECK_THROWS_AS(exp_integral_e1(-1.0), std::domain_error);
  CHECK_THROWS_AS(scaled_exp_integral_e1(0.0), std::domain_error);
}

TEST_CASE("scaled E1 avoids overflow") {
  CHECK(scaled_exp_integral_e1(2.0) == doctest::Approx(std::exp(2.0) * boost::math::expint(1, 2.0)).epsilon(1e-13));
  // e^s E1(s) ~ 1/s for large s
  CHECK(scaled_exp_integral_e1(1e6) == doctest::Approx(1.0 / (1e6 + 1.0)).epsilon(1e-9));
}

TEST_CASE("normal cdf and quantile") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(-0.5), std::domain_error);
}

TEST_CASE("normal cdf inverts the quantile on [1e-8, 1-1e-8]") {
  for (double p : {1e-8, 1e-6, 1e-3, 0.01, 0.2, 0.5, 0.7, 0.99, 0.999999, 1.0 - 1e-8}) {
    CAPTURE(p);
    CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) <= 1e-10);
  }
}

TEST_CASE("normal quantile agrees with bisection on the cdf") {
  double lo = 0.0, hi = 5.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < 0.975 ? lo : hi) = mid;
  }
  CHECK(normal_quantile(0.975) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
}

TEST_CASE("incomplete beta matches the reference implementation") {
  RngStream rng(7, 1);
  for (int i = 0; i < 200; ++i) {
    const double a = 0.2 + 20.0 * rng.uniform();
    const double b = 0.2 + 20.0 * rng.uniform();
    const double x = rng.uniform();
    CAPTURE(a);
    CAPTURE(b);
    CAPTURE(x);
    CHECK(std::abs(incomplete_beta(x, a, b) - boost::math::ibeta(a, b, x)) <= 1e-13);
  }
  CHECK(incomplete_beta(0.0, 2.0, 3.0) == 0.0);
  CHECK(incomplete_beta(1.0, 2.0, 3.0) == 1.0);
  CHECK_THROWS_AS(incomplete_beta(0.5, 0.0, 1.0), std::domain_error);
}

TEST_CASE("beta median") {
  CHECK(beta_median(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(beta_median(2.0, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(beta_median(2.0, 5.0) == doctest::Approx(0.2645).epsilon(1e-3));
  CHECK(beta_median(2.0, 5.0) == doctest::Approx(boost::math::ibeta_inv(2.0, 5.0, 0.5)).epsilon(1e-12));
  CHECK(std::abs(incomplete_beta(beta_median(2.0, 5.0), 2.0, 5.0) - 0.5) <= 1e-10);
  CHECK_THROWS_AS(beta_median(-1.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(beta_median(1.0, 0.0), std::domain_error);
}

TEST_CASE("beta median reflection symmetry") {
  RngStream rng(7, 2);
  for (int i = 0; i < 50; ++i) {
    const double a = 0.3 + 50.0 * rng.uniform();
    const double b = 0.3 + 50.0 * rng.uniform();
    CHECK(std::abs(beta_median(a, b) + beta_median(b, a) - 1.0) <= 1e-9);
  }
}

TEST_CASE("beta quantile grid agrees with bisection") {
  std::vector<double> levels;
  for (int i = 0; i < 101; ++i) levels.push_back((i + 0.5) / 101.0);
  for (auto [a, b] : {std::pair{0.7, 3.0}, std::pair{5.0, 8.0}, std::pair{1370.0, 2730.0}}) {
    const std::vector<double> q = beta_quantile_grid(levels, a, b);
    for (std::size_t i = 0; i < levels.size(); ++i) {
      CHECK(std::abs(q[i] - beta_quantile(levels[i], a, b)) <= 1e-12);
      if (i) CHECK(q[i] > q[i - 1]);
    }
  }
  const std::vector<double> bad{0.5, 0.4};
  CHECK_THROWS_AS(beta_quantile_grid(bad, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("incomplete gamma and gamma quantile") {
  RngStream rng(7, 3);
  for (int i = 0; i < 100; ++i) {
    const double a = 0.2 + 100.0 * rng.uniform();
    const double x = 3.0 * a * rng.uniform();
    CHECK(std::abs(incomplete_gamma_p(a, x) - boost::math::gamma_p(a, x)) <= 1e-13);
  }
  // Gamma(5, 6) median by the reference inverse
  CHECK(gamma_quantile(0.5, 5.0, 6.0) == doctest::Approx(boost::math::gamma_p_inv(5.0, 0.5) / 6.0).epsilon(1e-12));
  CHECK(gamma_quantile(0.5, 5.0, 6.0) == doctest::Approx(0.7785).epsilon(1e-4));
}

TEST_CASE("spd2_sqrt examples") {
  const SymMat2 r = spd2_sqrt({4.0, 0.0, 9.0});
  CHECK(r.a == doctest::Approx(2.0));
  CHECK(r.b == doctest::Approx(0.0));
  CHECK(r.c == doctest::Approx(3.0));
  const SymMat2 id = spd2_sqrt(SymMat2::identity());
  CHECK(id.a == doctest::Approx(1.0));
  CHECK(id.c == doctest::Approx(1.0));
  CHECK(id.b == 0.0);

  const SymMat2 m{2.0, 1.0, 2.0};
  const SymMat2 s = spd2_sqrt(m);
  const Mat2 sq = Mat2::from(s) * Mat2::from(s);
  CHECK(std::abs(sq(0, 0) - 2.0) <= 1e-12);
  CHECK(std::abs(sq(0, 1) - 1.0) <= 1e-12);
  CHECK(std::abs(sq(1, 0) - 1.0) <= 1e-12);
  CHECK(std::abs(sq(1, 1) - 2.0) <= 1e-12);
  CHECK(s.is_spd());
}

TEST_CASE("spd2_sqrt recovers random square roots") {
  RngStream rng(7, 4);
  int done = 0;
  while (done < 100) {
    const double a = 0.1 + 9.9 * rng.uniform();
    const double c = 0.1 + 9.9 * rng.uniform();
    const double b = (2.0 * rng.uniform() - 1.0) * std::sqrt(a * c);
    const SymMat2 r{a, b, c};
    if (!r.is_spd() || r.det() < 1e-3) continue;
    const Mat2 p = Mat2::from(r) * Mat2::from(r);
    const SymMat2 back = spd2_sqrt({p(0, 0), 0.5 * (p(0, 1) + p(1, 0)), p(1, 1)});
    CHECK(std::abs(back.a - r.a) <= 1e-9);
    CHECK(std::abs(back.b - r.b) <= 1e-9);
    CHECK(std::abs(back.c - r.c) <= 1e-9);
    ++done;
  }
}

TEST_CASE("spd kernels reject indefinite input") {
  CHECK_THROWS_AS(spd2_sqrt({1.0, 2.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(spd2_sqrt({-1.0, 0.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(spd2_inverse({0.0, 0.0, 0.0}), std::domain_error);
  const SymMat2 inv = spd2_inverse({2.0, 1.0, 2.0});
  const Mat2 p = Mat2::from(inv) * Mat2::from(SymMat2{2.0, 1.0, 2.0});
  CHECK(p(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(p(0, 1)) <= 1e-15);
}
