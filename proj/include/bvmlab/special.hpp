#pragma once

// Special functions and 2x2 matrix kernels shared by every other module.

#include <array>
#include <span>
#include <vector>

namespace bvmlab::special {

/// Symmetric 2x2 matrix [[a, b], [b, c]].
struct SymMat2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  static SymMat2 identity() { return {1.0, 0.0, 1.0}; }

  double trace() const { return a + c; }
  double det() const { return a * c - b * b; }
  bool is_spd() const { return a > 0.0 && det() > 0.0; }
};

/// General 2x2 matrix, row-major. Products of symmetric matrices land here.
struct Mat2 {
  std::array<double, 4> m{};

  static Mat2 from(const SymMat2& s) { return {{s.a, s.b, s.b, s.c}}; }

  double operator()(int i, int j) const { return m[2 * i + j]; }
  double trace() const { return m[0] + m[3]; }
  double det() const { return m[0] * m[3] - m[1] * m[2]; }
};

Mat2 operator*(const Mat2& x, const Mat2& y);
SymMat2 operator+(const SymMat2& x, const SymMat2& y);
SymMat2 operator*(double s, const SymMat2& x);

/// Principal square root of an SPD matrix. Throws std::domain_error otherwise.
SymMat2 spd2_sqrt(const SymMat2& m);

/// Inverse of an SPD matrix. Throws std::domain_error otherwise.
SymMat2 spd2_inverse(const SymMat2& m);

/// Symmetric part of a congruence R * M * R for symmetric R and M.
SymMat2 congruence(const SymMat2& r, const SymMat2& m);

/// Exponential integral E1(s) = int_s^inf exp(-u)/u du, s > 0.
///
/// Power series below s = 1, modified Lentz continued fraction above.
double exp_integral_e1(double s);

/// e^s * E1(s), evaluated without overflow for large s.
double scaled_exp_integral_e1(double s);

double normal_pdf(double x);
double normal_cdf(double x);
/// Standard normal quantile; p must lie in (0, 1).
double normal_quantile(double p);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double x, double a, double b);
/// Solves I_m(a, b) = u by bisection (80 halvings).
double beta_quantile(double u, double a, double b);
double beta_median(double a, double b);
double beta_pdf(double x, double a, double b);
/// Quantiles at increasing levels in (0, 1): safeguarded Newton steps started
/// from the previous quantile. Much cheaper than repeated bisection.
std::vector<double> beta_quantile_grid(std::span<const double> levels, double a, double b);

/// Regularized lower incomplete gamma P(a, x).
double incomplete_gamma_p(double a, double x);
/// Quantile of Gamma(shape, rate) by bracketing + bisection.
double gamma_quantile(double u, double shape, double rate);

}  // namespace bvmlab::special
