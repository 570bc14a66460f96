#include "bvmlab/special.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bvmlab::special {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_spd(const SymMat2& m, const char* who) {
  if (!(m.is_spd() && std::isfinite(m.a) && std::isfinite(m.b) && std::isfinite(m.c))) {
    throw std::domain_error(std::string(who) + ": matrix is not symmetric positive definite");
  }
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h;
  }
  return h;
}

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double beta_log_prefactor(double x, double a, double b, double lbeta) {
  return a * std::log(x) + b * std::log1p(-x) - lbeta;
}

double beta_log_prefactor(double x, double a, double b) {
  return beta_log_prefactor(x, a, b, log_beta_fn(a, b));
}

double incomplete_beta_impl(double x, double a, double b, double lbeta) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(beta_log_prefactor(x, a, b, lbeta));
  if (x < a / (a + b)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double beta_pdf_impl(double x, double a, double b, double lbeta) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp(beta_log_prefactor(x, a, b, lbeta)) / (x * (1.0 - x));
}

}  // namespace

Mat2 operator*(const Mat2& x, const Mat2& y) {
  return {{x(0, 0) * y(0, 0) + x(0, 1) * y(1, 0), x(0, 0) * y(0, 1) + x(0, 1) * y(1, 1),
           x(1, 0) * y(0, 0) + x(1, 1) * y(1, 0), x(1, 0) * y(0, 1) + x(1, 1) * y(1, 1)}};
}

SymMat2 operator+(const SymMat2& x, const SymMat2& y) {
  return {x.a + y.a, x.b + y.b, x.c + y.c};
}

SymMat2 operator*(double s, const SymMat2& x) { return {s * x.a, s * x.b, s * x.c}; }

SymMat2 spd2_sqrt(const SymMat2& m) {
  require_spd(m, "spd2_sqrt");
  // sqrt(M) = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M)) for 2x2 SPD M.
  const double s = std::sqrt(m.det());
  const double t = std::sqrt(m.trace() + 2.0 * s);
  return {(m.a + s) / t, m.b / t, (m.c + s) / t};
}

SymMat2 spd2_inverse(const SymMat2& m) {
  require_spd(m, "spd2_inverse");
  const double det = m.det();
  return {m.c / det, -m.b / det, m.a / det};
}

SymMat2 congruence(const SymMat2& r, const SymMat2& m) {
  const Mat2 p = Mat2::from(r) * Mat2::from(m) * Mat2::from(r);
  return {p(0, 0), 0.5 * (p(0, 1) + p(1, 0)), p(1, 1)};
}

double scaled_exp_integral_e1(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::domain_error("exp_integral_e1: argument must be positive and finite");
  }
  if (s <= 1.0) return std::exp(s) * exp_integral_e1(s);
  // Lentz evaluation of e^s E1(s) = 1/(s+1- 1/(s+3- 4/(s+5- ...))).
  double b = s + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double exp_integral_e1(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::domain_error("exp_integral_e1: argument must be positive and finite");
  }
  if (s > 1.0) return scaled_exp_integral_e1(s) * std::exp(-s);
  // E1(s) = -gamma - ln s - sum_{k>=1} (-s)^k / (k k!)
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k <= 200; ++k) {
    term *= -s / k;
    const double contrib = term / k;
    sum += contrib;
    if (std::abs(contrib) < kEps * std::abs(sum)) break;
  }
  return -std::numbers::egamma - std::log(s) - sum;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::domain_error("incomplete_beta: shapes must be positive");
  return incomplete_beta_impl(x, a, b, log_beta_fn(a, b));
}

double beta_quantile(double u, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::domain_error("beta_quantile: shapes must be positive");
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("beta_quantile: u must lie in (0, 1)");
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (incomplete_beta(mid, a, b) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double beta_median(double a, double b) { return beta_quantile(0.5, a, b); }

double beta_pdf(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::domain_error("beta_pdf: shapes must be positive");
  return beta_pdf_impl(x, a, b, log_beta_fn(a, b));
}

std::vector<double> beta_quantile_grid(std::span<const double> levels, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::domain_error("beta_quantile_grid: shapes must be positive");
  const double lbeta = log_beta_fn(a, b);
  std::vector<double> out(levels.size());
  double lo = 0.0;      // I(lo) <= current level
  double x_prev = 0.0;  // previous quantile and its cdf value
  double f_prev = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double u = levels[i];
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("beta_quantile_grid: levels must lie in (0, 1)");
    if (i > 0 && u < levels[i - 1]) throw std::invalid_argument("beta_quantile_grid: levels must increase");
    double hi = 1.0;
    double x;
    if (i == 0) {
      x = beta_quantile(u, a, b);
    } else {
      const double dens = beta_pdf_impl(x_prev, a, b, lbeta);
      x = dens > 0.0 ? x_prev + (u - f_prev) / dens : 0.5 * (lo + hi);
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    }
    // Safeguarded Newton inside [lo, hi].
    double fx = incomplete_beta_impl(x, a, b, lbeta);
    for (int it = 0; it < 100; ++it) {
      const double f = fx - u;
      if (f < 0.0) {
        lo = x;
      } else {
        hi = x;
      }
      if (std::abs(f) < 1e-13 || hi - lo < 4.0 * kEps * hi) break;
      const double dens = beta_pdf_impl(x, a, b, lbeta);
      double next = dens > 0.0 ? x - f / dens : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - x) <= 1e-14 * x) break;
      x = next;
      fx = incomplete_beta_impl(x, a, b, lbeta);
    }
    out[i] = x;
    x_prev = x;
    f_prev = fx;
    lo = std::min(lo, x);
  }
  return out;
}

double incomplete_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("incomplete_gamma_p: shape must be positive");
  if (x <= 0.0) return 0.0;
  const double log_front = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 100000; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(log_front);
  }
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return 1.0 - std::exp(log_front) * h;
}

double gamma_quantile(double u, double shape, double rate) {
  if (!(shape > 0.0 && rate > 0.0)) {
    throw std::domain_error("gamma_quantile: shape and rate must be positive");
  }
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("gamma_quantile: u must lie in (0, 1)");
  // Work on the unit-rate scale and bracket around the mean.
  double lo = 0.0;
  double hi = shape + 10.0 * std::sqrt(shape) + 10.0;
  while (incomplete_gamma_p(shape, hi) < u) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 4.0 * kEps * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (incomplete_gamma_p(shape, mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi) / rate;
}

}  // namespace bvmlab::special
