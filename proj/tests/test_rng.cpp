#include "doctest.h"

#include "bvmlab/rng.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

using namespace bvmlab;

TEST_CASE("identical keys reproduce identical sequences") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(42, 7), d(42, 7);
  const auto x = gamma_sampler(2.5, 1.0, 500, c);
  const auto y = gamma_sampler(2.5, 1.0, 500, d);
  CHECK(std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
}

TEST_CASE("distinct stream ids diverge") {
  RngStream a(42, 7), b(42, 8), c(43, 7);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    same_ab += va == b.next_u64();
    same_ac += va == c.next_u64();
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("distinct streams are uncorrelated") {
  RngStream a(1, stream_hash("x", {1})), b(1, stream_hash("x", {2}));
  const int m = 100000;
  double sab = 0.0;
  for (int i = 0; i < m; ++i) sab += (a.uniform() - 0.5) * (b.uniform() - 0.5);
  // correlation of independent uniforms has sd 1/sqrt(m)
  CHECK(std::abs(12.0 * sab / m) < 5.0 / std::sqrt(m));
}

TEST_CASE("stream_hash depends on label and every part") {
  CHECK(stream_hash("exp", {1, 2}) == stream_hash("exp", {1, 2}));
  CHECK(stream_hash("exp", {1, 2}) != stream_hash("exp", {2, 1}));
  CHECK(stream_hash("exp", {1, 2}) != stream_hash("mult", {1, 2}));
  CHECK(stream_hash("exp", {1}) != stream_hash("exp", {1, 0}));
}

TEST_CASE("uniform stays in the open unit interval") {
  RngStream rng(3, 3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("Gamma(5,6) sample mean") {
  RngStream rng(11, 1);
  const auto x = gamma_sampler(5.0, 6.0, 1000000, rng);
  double s = 0.0, s2 = 0.0;
  for (double v : x) {
    s += v;
    s2 += v * v;
  }
  const double mean = s / x.size();
  CHECK(std::abs(mean - 5.0 / 6.0) <= 0.003);
  CHECK(std::abs(s2 / x.size() - mean * mean - 5.0 / 36.0) <= 0.003);
}

TEST_CASE("small-shape Gamma mean") {
  RngStream rng(11, 2);
  const auto x = gamma_sampler(0.3, 2.0, 400000, rng);
  double s = 0.0;
  for (double v : x) {
    CHECK_FALSE(v < 0.0);
    s += v;
  }
  CHECK(std::abs(s / x.size() - 0.15) <= 0.003);
}

TEST_CASE("Dirichlet(1,1,1) componentwise mean") {
  RngStream rng(11, 3);
  const std::vector<double> alpha{1.0, 1.0, 1.0};
  const std::size_t m = 1000000;
  const auto x = dirichlet_sampler(alpha, m, rng);
  REQUIRE(x.size() == 3 * m);
  double s[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (int k = 0; k < 3; ++k) {
      s[k] += x[3 * i + k];
      row += x[3 * i + k];
    }
    REQUIRE(std::abs(row - 1.0) <= 1e-12);
  }
  for (int k = 0; k < 3; ++k) CHECK(std::abs(s[k] / m - 1.0 / 3.0) <= 0.003);
}

TEST_CASE("normal sampler moments") {
  RngStream rng(11, 4);
  const auto x = normal_sampler(1.5, 2.0, 400000, rng);
  double s = 0.0, s2 = 0.0;
  for (double v : x) {
    s += v;
    s2 += v * v;
  }
  const double mean = s / x.size();
  CHECK(std::abs(mean - 1.5) <= 0.02);
  CHECK(std::abs(std::sqrt(s2 / x.size() - mean * mean) - 2.0) <= 0.02);
}

TEST_CASE("categorical frequencies") {
  RngStream rng(11, 5);
  const std::vector<double> p{0.6, 0.3, 0.1};
  int counts[3] = {0, 0, 0};
  const int m = 100000;
  for (int i = 0; i < m; ++i) ++counts[rng.categorical(p)];
  for (int k = 0; k < 3; ++k) CHECK(std::abs(counts[k] / double(m) - p[k]) <= 0.01);
}

TEST_CASE("samplers reject invalid parameters") {
  RngStream rng(1, 1);
  CHECK_THROWS_AS(gamma_sampler(0.0, 1.0, 10, rng), std::domain_error);
  CHECK_THROWS_AS(gamma_sampler(1.0, -1.0, 10, rng), std::domain_error);
  CHECK_THROWS_AS(normal_sampler(0.0, 0.0, 10, rng), std::domain_error);
  const std::vector<double> bad{1.0, 0.0};
  CHECK_THROWS_AS(dirichlet_sampler(bad, 10, rng), std::domain_error);
}
