#pragma once

// Independent reference values for the closed-form losses: quadrature over
// densities, CDFs or quantile couplings, and linear programs. Shared by the
// unit tests and the acceptance binary.

#include "bvmlab/discrete_ot.hpp"
#include "bvmlab/families.hpp"
#include "bvmlab/losses.hpp"
#include "bvmlab/quadrature.hpp"
#include "bvmlab/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// 1/2 int (sqrt p_t - sqrt p_theta)^2 over the exponential densities.
inline double hellinger_exp(double t, double th) {
  const auto fam = bvmlab::families::exponential_family();
  return 0.5 * bvmlab::quad::integrate(
                   [&](double x) {
                     const double d = std::sqrt(fam.density1(x, t)) - std::sqrt(fam.density1(x, th));
                     return d * d;
                   },
                   0.0, kInf, 1e-14);
}

// Quantile coupling in tail coordinates v = e^{-s}: int_0^inf (Q_t - Q_th)^2 e^{-s} ds.
// weighted(s, r) returns Q_r(s) e^{-s/2}, so heavy tails never overflow.
inline double w2sq_by_tail_quantiles(const std::function<double(double, double)>& weighted,
                                     double t, double th) {
  return bvmlab::quad::integrate(
      [&](double s) {
        const double d = weighted(s, t) - weighted(s, th);
        return d * d;
      },
      0.0, kInf, 1e-14);
}

inline double w2sq_exp(double t, double th) {
  // Exp(t): upper-tail level e^{-s} sits at x = s / t.
  return w2sq_by_tail_quantiles([](double s, double r) { return s / r * std::exp(-0.5 * s); }, t, th);
}

inline double w2sq_pareto(double t, double th) {
  // Pareto(1, t): upper-tail level e^{-s} sits at x = e^{s/t}.
  return w2sq_by_tail_quantiles([](double s, double r) { return std::exp(s / r - 0.5 * s); }, t, th);
}

// KL(P_th | P_t) by quadrature.
inline double kl_exp(double t, double th) {
  const auto fam = bvmlab::families::exponential_family();
  return bvmlab::quad::integrate(
      [&](double x) {
        const double p = fam.density1(x, th);
        if (p == 0.0) return 0.0;
        return p * (std::log(th) - th * x - std::log(t) + t * x);
      },
      0.0, kInf, 1e-14);
}

// Twice KL(N(0, th) | N(0, t)).
inline double stein_variance(double t, double th) {
  auto logpdf = [](double x, double v) {
    return -0.5 * std::log(2.0 * std::numbers::pi * v) - 0.5 * x * x / v;
  };
  const double sd = std::sqrt(th);
  return 2.0 * bvmlab::quad::integrate(
                   [&](double x) {
                     const double lp = logpdf(x, th);
                     return std::exp(lp) * (lp - logpdf(x, t));
                   },
                   -40.0 * sd, 40.0 * sd, 1e-14);
}

// int |phi(x - t) - phi(x - th)| dx, reduced to the line through t and th.
inline double tv_gauss_location(const Vec& t, const Vec& th) {
  double sq = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) sq += (t[k] - th[k]) * (t[k] - th[k]);
  const double r = std::sqrt(sq);
  auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
  auto f = [&](double x) { return std::abs(phi(x) - phi(x - r)); };
  return bvmlab::quad::integrate(f, -kInf, 0.5 * r, 1e-14) + bvmlab::quad::integrate(f, 0.5 * r, kInf, 1e-14);
}

// int_0^inf |F_t - F_th| dx.
inline double w1_gompertz(double t, double th) {
  const auto fam = bvmlab::families::gompertz_family();
  return bvmlab::quad::integrate([&](double x) { return std::abs(fam.cdf1(x, t) - fam.cdf1(x, th)); },
                                 0.0, kInf, 1e-14);
}

// Entropic OT between Gaussians in the parametrization
// min E|X - Y|^2 + 2 s^2 KL(pi | P x Q), s^2 = lambda / 2:
//   |a - b|^2 + tr A + tr B - tr D + d s^2 (1 - log 2 s^2) + s^2 log det(D + s^2 I),
//   D = (4 A^{1/2} B A^{1/2} + s^4 I)^{1/2}.
inline Eigen::Matrix2d sym_sqrt(const Eigen::Matrix2d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  return es.operatorSqrt();
}

inline double entropic_gauss(const bvmlab::losses::Gaussian2& p, const bvmlab::losses::Gaussian2& q,
                             double lambda) {
  Eigen::Matrix2d a, b;
  a << p.cov.a, p.cov.b, p.cov.b, p.cov.c;
  b << q.cov.a, q.cov.b, q.cov.b, q.cov.c;
  const double s2 = 0.5 * lambda;
  const Eigen::Matrix2d ra = sym_sqrt(a);
  const Eigen::Matrix2d inner = 4.0 * ra * b * ra + s2 * s2 * Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d dm = sym_sqrt(0.5 * (inner + inner.transpose()));
  const double dx = p.mean[0] - q.mean[0];
  const double dy = p.mean[1] - q.mean[1];
  return dx * dx + dy * dy + a.trace() + b.trace() - dm.trace() + 2.0 * s2 * (1.0 - std::log(2.0 * s2)) +
         s2 * std::log((dm + s2 * Eigen::Matrix2d::Identity()).determinant());
}

inline double sinkhorn_centered(const bvmlab::losses::Gaussian2& p, const bvmlab::losses::Gaussian2& q,
                                double lambda) {
  return entropic_gauss(p, q, lambda) - 0.5 * entropic_gauss(p, p, lambda) -
         0.5 * entropic_gauss(q, q, lambda);
}

// Transport LP with 0/1 cost on a common support.
inline double w2sq_multinomial(const Vec& p, const Vec& th) {
  const auto n = static_cast<Eigen::Index>(p.size());
  const Eigen::MatrixXd cost = Eigen::MatrixXd::Ones(n, n) - Eigen::MatrixXd::Identity(n, n);
  return bvmlab::ot::solve_ot_lp(p, th, cost).cost;
}

// min sum (u + v) subject to u - v = a - b, u, v >= 0.
inline double l1_reparam(const Vec& a, const Vec& b) {
  const auto m = static_cast<Eigen::Index>(a.size());
  bvmlab::ot::StandardLP lp;
  lp.A = Eigen::MatrixXd::Zero(m, 2 * m);
  lp.b = Eigen::VectorXd(m);
  lp.c = Eigen::VectorXd::Ones(2 * m);
  for (Eigen::Index k = 0; k < m; ++k) {
    lp.A(k, k) = 1.0;
    lp.A(k, m + k) = -1.0;
    lp.b(k) = a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)];
  }
  return bvmlab::ot::simplex_solve(lp).objective;
}

// Minimum of c^T x over all basic feasible solutions, or +inf if none.
inline double vertex_brute_force(const bvmlab::ot::StandardLP& lp) {
  const int m = static_cast<int>(lp.A.rows());
  const int n = static_cast<int>(lp.A.cols());
  std::vector<int> pick(n, 0);
  std::fill(pick.begin(), pick.begin() + m, 1);
  double best = kInf;
  do {
    std::vector<int> cols;
    for (int j = 0; j < n; ++j) {
      if (pick[j]) cols.push_back(j);
    }
    Eigen::MatrixXd basis(m, m);
    for (int k = 0; k < m; ++k) basis.col(k) = lp.A.col(cols[k]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (lu.rank() < m) continue;
    const Eigen::VectorXd xb = lu.solve(lp.b);
    if (xb.minCoeff() < -1e-10) continue;
    double obj = 0.0;
    for (int k = 0; k < m; ++k) obj += lp.c(cols[k]) * xb(k);
    best = std::min(best, obj);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

// Feasible (b = A x0, x0 > 0) and bounded (c = A^T y + s, s >= 0).
inline bvmlab::ot::StandardLP random_lp(bvmlab::RngStream& rng, int m, int n) {
  bvmlab::ot::StandardLP lp;
  lp.A = Eigen::MatrixXd(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) lp.A(i, j) = 4.0 * rng.uniform() - 2.0;
  }
  Eigen::VectorXd x0(n), y(m), s(n);
  for (int j = 0; j < n; ++j) x0(j) = rng.uniform();
  for (int i = 0; i < m; ++i) y(i) = 2.0 * rng.uniform() - 1.0;
  for (int j = 0; j < n; ++j) s(j) = rng.uniform();
  lp.b = lp.A * x0;
  lp.c = lp.A.transpose() * y + s;
  return lp;
}

inline Vec random_probs(std::size_t d, bvmlab::RngStream& rng) {
  return rng.dirichlet(Vec(d, 1.0));
}

inline bvmlab::losses::Gaussian2 random_gaussian2(bvmlab::RngStream& rng) {
  bvmlab::losses::Gaussian2 g;
  g.mean = {4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
  const double a = 0.2 + 2.8 * rng.uniform();
  const double c = 0.2 + 2.8 * rng.uniform();
  const double b = 0.9 * (2.0 * rng.uniform() - 1.0) * std::sqrt(a * c);
  g.cov = {a, b, c};
  return g;
}

/// One closed-form loss, a generator of random points in its domain and the oracle.
struct Case {
  std::string name;
  std::function<std::pair<Vec, Vec>(bvmlab::RngStream&)> draw;
  std::function<double(const Vec&, const Vec&)> closed_form;
  std::function<double(const Vec&, const Vec&)> reference;
};

inline std::vector<Case> cases() {
  using namespace bvmlab::losses;
  auto scalar = [](double lo, double hi) {
    return [lo, hi](bvmlab::RngStream& rng) {
      return std::pair<Vec, Vec>{{lo + (hi - lo) * rng.uniform()}, {lo + (hi - lo) * rng.uniform()}};
    };
  };
  auto wrap = [](double (*f)(double, double)) {
    return [f](const Vec& t, const Vec& th) { return f(t[0], th[0]); };
  };
  std::vector<Case> out;
  out.push_back({"hellinger", scalar(0.2, 5.0), wrap(&bvmlab::losses::hellinger_exp), wrap(&oracle::hellinger_exp)});
  out.push_back({"w2", scalar(0.2, 5.0), wrap(&bvmlab::losses::w2sq_exp), wrap(&oracle::w2sq_exp)});
  out.push_back({"kl", scalar(0.2, 5.0), wrap(&bvmlab::losses::kl_exp), wrap(&oracle::kl_exp)});
  out.push_back({"w2-pareto", scalar(2.05, 20.0), wrap(&bvmlab::losses::w2sq_pareto), wrap(&oracle::w2sq_pareto)});
  out.push_back({"stein", scalar(0.2, 5.0), wrap(&bvmlab::losses::stein_variance), wrap(&oracle::stein_variance)});
  out.push_back({"w1-gompertz", scalar(0.2, 5.0), wrap(&bvmlab::losses::w1_gompertz), wrap(&oracle::w1_gompertz)});
  out.push_back({"tv-gauss",
                 [](bvmlab::RngStream& rng) {
                   const std::size_t d = 1 + static_cast<std::size_t>(3.0 * rng.uniform());
                   Vec t(d), th(d);
                   for (std::size_t k = 0; k < d; ++k) {
                     t[k] = 4.0 * rng.uniform() - 2.0;
                     th[k] = 4.0 * rng.uniform() - 2.0;
                   }
                   return std::pair<Vec, Vec>{t, th};
                 },
                 [](const Vec& t, const Vec& th) { return bvmlab::losses::tv_gauss_location(t, th); },
                 &oracle::tv_gauss_location});
  out.push_back({"sinkhorn",
                 [](bvmlab::RngStream& rng) {
                   auto pack = [](const Gaussian2& g) {
                     return Vec{g.mean[0], g.mean[1], g.cov.a, g.cov.b, g.cov.c};
                   };
                   return std::pair<Vec, Vec>{pack(random_gaussian2(rng)), pack(random_gaussian2(rng))};
                 },
                 [](const Vec& t, const Vec& th) {
                   return bvmlab::losses::sinkhorn_centered(gaussian2_from_params(t), gaussian2_from_params(th), 1.0);
                 },
                 [](const Vec& t, const Vec& th) {
                   return oracle::sinkhorn_centered(gaussian2_from_params(t), gaussian2_from_params(th), 1.0);
                 }});
  out.push_back({"w2-multinomial",
                 [](bvmlab::RngStream& rng) {
                   const std::size_t d = 2 + static_cast<std::size_t>(5.0 * rng.uniform());
                   return std::pair<Vec, Vec>{random_probs(d, rng), random_probs(d, rng)};
                 },
                 [](const Vec& p, const Vec& th) { return bvmlab::losses::w2sq_multinomial(p, th); },
                 &oracle::w2sq_multinomial});
  out.push_back({"l1-reparam",
                 [](bvmlab::RngStream& rng) {
                   Vec a = random_probs(3, rng), b = random_probs(3, rng);
                   a.pop_back();
                   b.pop_back();
                   return std::pair<Vec, Vec>{a, b};
                 },
                 [](const Vec& a, const Vec& b) { return bvmlab::losses::l1_reparam(a, b); },
                 &oracle::l1_reparam});
  return out;
}

}  // namespace oracle
