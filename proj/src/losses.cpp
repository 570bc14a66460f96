#include "bvmlab/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace bvmlab::losses {

namespace {

using special::SymMat2;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kParetoMargin = 2.05;
constexpr double kParetoUpper = 200.0;

void require_positive(double t, double theta, const char* who) {
  if (!(t > 0.0 && theta > 0.0) || !std::isfinite(t) || !std::isfinite(theta)) {
    throw std::domain_error(std::string(who) + ": arguments must be positive and finite");
  }
}

bool in_reduced_simplex(Point x) {
  double sum = 0.0;
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
    sum += v;
  }
  return sum <= 1.0 + 1e-12;
}

bool in_simplex(Point x) {
  double sum = 0.0;
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= 1e-9;
}

void require_same_dim(Point a, Point b, const char* who) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

double quad_form(const Eigen::MatrixXd& q, Point t, Point h) {
  const auto d = static_cast<Eigen::Index>(t.size());
  Eigen::VectorXd r(d);
  for (Eigen::Index k = 0; k < d; ++k) r(k) = t[static_cast<std::size_t>(k)] - h[static_cast<std::size_t>(k)];
  return r.dot(q * r);
}

Loss scalar_loss(std::string name, Domain domain, double (*f)(double, double),
                 double (*grad)(double, double) = nullptr) {
  Loss loss;
  loss.name = std::move(name);
  loss.dim = 1;
  loss.domain = std::move(domain);
  loss.eval = [dom = loss.domain, f, nm = loss.name](Point t, Point th) {
    if (!dom.contains(t) || !dom.contains(th)) throw std::domain_error(nm + ": argument outside domain");
    return f(t[0], th[0]);
  };
  if (grad != nullptr) {
    loss.grad_t = [dom = loss.domain, grad, nm = loss.name](Point t, Point th) {
      if (!dom.contains(t) || !dom.contains(th)) throw std::domain_error(nm + ": argument outside domain");
      return std::vector<double>{grad(t[0], th[0])};
    };
  }
  return loss;
}

// Attaches the quadratic expansion with the given curvature and derives l0 from it.
void attach_quadratic(Loss& loss, std::function<Eigen::MatrixXd(Point)> curvature) {
  QuadExpansion qe;
  qe.curvature = curvature;
  qe.remainder = [eval = loss.eval, curvature](Point t, Point th) {
    return eval(t, th) - quad_form(curvature(th), t, th);
  };
  loss.quad = qe;
  loss.local_order = 2.0;
  loss.local_limit = [curvature](Point t, Point h, Point theta0) {
    return quad_form(curvature(theta0), t, h);
  };
}

std::function<Eigen::MatrixXd(Point)> scalar_curvature(double (*q)(double)) {
  return [q](Point th) { return Eigen::MatrixXd::Constant(1, 1, q(th[0])); };
}

double hellinger_grad(double t, double theta) {
  require_positive(t, theta, "hellinger_exp");
  return std::sqrt(theta) * (t - theta) / (std::sqrt(t) * (t + theta) * (t + theta));
}
double w2sq_exp_grad(double t, double theta) {
  require_positive(t, theta, "w2sq_exp");
  return -4.0 * (1.0 / t - 1.0 / theta) / (t * t);
}
double kl_exp_grad(double t, double theta) {
  require_positive(t, theta, "kl_exp");
  return 1.0 / theta - 1.0 / t;
}
double stein_grad(double t, double theta) {
  require_positive(t, theta, "stein_variance");
  return 1.0 / t - theta / (t * t);
}

}  // namespace

double hellinger_exp(double t, double theta) {
  require_positive(t, theta, "hellinger_exp");
  return 1.0 - 2.0 * std::sqrt(t * theta) / (t + theta);
}

double w2sq_exp(double t, double theta) {
  require_positive(t, theta, "w2sq_exp");
  const double r = 1.0 / t - 1.0 / theta;
  return 2.0 * r * r;
}

double kl_exp(double t, double theta) {
  require_positive(t, theta, "kl_exp");
  return std::log(theta) - std::log(t) + t / theta - 1.0;
}

double w2sq_pareto(double t, double theta) {
  if (!(t > 2.0 && theta > 2.0)) throw std::domain_error("w2sq_pareto: shapes must exceed 2");
  const double diff = t - theta;
  return 2.0 * diff * diff / ((t * theta - t - theta) * (t - 2.0) * (theta - 2.0));
}

double w2sq_pareto_grad(double t, double theta) {
  if (!(t > 2.0 && theta > 2.0)) throw std::domain_error("w2sq_pareto: shapes must exceed 2");
  const double lin = (theta - 1.0) * t - theta;
  return 2.0 * (t - theta) * ((2.0 * theta - 1.0) * t - 3.0 * theta) /
         ((t - 2.0) * (t - 2.0) * lin * lin);
}

double pareto_curvature_a(double theta) {
  if (!(theta > 2.0)) throw std::domain_error("pareto_curvature_a: shape must exceed 2");
  const double g = theta - 2.0;
  return 4.0 / (theta * g * g * g);
}

double w2sq_pareto_remainder(double t, double theta) {
  if (!(t > 2.0 && theta > 2.0)) throw std::domain_error("w2sq_pareto: shapes must exceed 2");
  const double g = theta - 2.0;
  const double cross = t * theta - t - theta;
  const double diff = t - theta;
  return 2.0 * diff * diff * (theta * g * g - (t - 2.0) * cross) /
         ((t - 2.0) * g * g * g * theta * cross);
}

double sinkhorn_gauss2(const Gaussian2& p, const Gaussian2& q, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::domain_error("sinkhorn_gauss2: lambda must be positive");
  }
  const SymMat2& s1 = p.cov;
  const SymMat2& s2 = q.cov;
  const SymMat2 root = special::spd2_sqrt(s1);
  const SymMat2 root_inv = special::spd2_inverse(root);
  const double shift = lambda / 4.0;
  const SymMat2 inner = special::congruence(root, s2) + SymMat2{shift * shift, 0.0, shift * shift};
  const SymMat2 f = special::congruence(root_inv, special::spd2_sqrt(inner)) +
                    (-shift) * special::spd2_inverse(s1);
  const special::Mat2 s1f = special::Mat2::from(s1) * special::Mat2::from(f);

  const double dm0 = p.mean[0] - q.mean[0];
  const double dm1 = p.mean[1] - q.mean[1];
  const double log_arg = 4.0 * std::log(2.0 * std::numbers::pi * std::numbers::e) +
                         2.0 * std::log(lambda) - std::log(4.0) + std::log(s1f.det());
  return dm0 * dm0 + dm1 * dm1 + s1.trace() + s2.trace() - 2.0 * s1f.trace() -
         0.5 * lambda * log_arg;
}

double sinkhorn_centered(const Gaussian2& p, const Gaussian2& q, double lambda) {
  return sinkhorn_gauss2(p, q, lambda) - 0.5 * sinkhorn_gauss2(p, p, lambda) -
         0.5 * sinkhorn_gauss2(q, q, lambda);
}

Gaussian2 gaussian2_from_params(Point params) {
  if (params.size() != 5) throw std::invalid_argument("gaussian2_from_params: expects 5 values");
  Gaussian2 g;
  g.mean = {params[0], params[1]};
  g.cov = {params[2], params[3], params[4]};
  if (!g.cov.is_spd()) throw std::domain_error("gaussian2_from_params: covariance not SPD");
  return g;
}

double stein_variance(double t, double theta) {
  require_positive(t, theta, "stein_variance");
  const double r = theta / t;
  return r - std::log(r) - 1.0;
}

double tv_gauss_location(Point t, Point theta) {
  require_same_dim(t, theta, "tv_gauss_location");
  double sq = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) sq += (t[k] - theta[k]) * (t[k] - theta[k]);
  // 2 (2 Phi(r/2) - 1) written via erf to keep precision near r = 0.
  return 2.0 * std::erf(std::sqrt(sq) / (2.0 * std::numbers::sqrt2));
}

double tv_gauss_local_limit(Point t, Point h) {
  require_same_dim(t, h, "tv_gauss_local_limit");
  double sq = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) sq += (t[k] - h[k]) * (t[k] - h[k]);
  return std::sqrt(2.0 / std::numbers::pi) * std::sqrt(sq);
}

double w1_gompertz(double t, double theta) {
  require_positive(t, theta, "w1_gompertz");
  return std::abs(special::scaled_exp_integral_e1(theta) - special::scaled_exp_integral_e1(t));
}

double gompertz_cdf_derivative_l1(double theta) {
  if (!(theta > 0.0)) throw std::domain_error("gompertz_cdf_derivative_l1: shape must be positive");
  return 1.0 / theta - special::scaled_exp_integral_e1(theta);
}

double w2sq_multinomial(Point p, Point theta) {
  require_same_dim(p, theta, "w2sq_multinomial");
  if (!in_simplex(p) || !in_simplex(theta)) {
    throw std::domain_error("w2sq_multinomial: arguments must lie on the probability simplex");
  }
  double overlap = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) overlap += std::min(p[i], theta[i]);
  return std::max(0.0, 1.0 - overlap);
}

double l1_reparam(Point a, Point b) {
  require_same_dim(a, b, "l1_reparam");
  if (!in_reduced_simplex(a) || !in_reduced_simplex(b)) {
    throw std::domain_error("l1_reparam: arguments must lie in the reduced simplex");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum;
}

Loss hellinger_exp_loss() {
  Loss loss = scalar_loss("hellinger", Domain::positive_half_line(), &hellinger_exp, &hellinger_grad);
  attach_quadratic(loss, scalar_curvature([](double th) { return 1.0 / (8.0 * th * th); }));
  return loss;
}

Loss w2sq_exp_loss() {
  Loss loss = scalar_loss("w2", Domain::positive_half_line(), &w2sq_exp, &w2sq_exp_grad);
  attach_quadratic(loss, scalar_curvature([](double th) { return 2.0 / (th * th * th * th); }));
  return loss;
}

Loss kl_exp_loss() {
  Loss loss = scalar_loss("kl", Domain::positive_half_line(), &kl_exp, &kl_exp_grad);
  attach_quadratic(loss, scalar_curvature([](double th) { return 1.0 / (2.0 * th * th); }));
  return loss;
}

Loss w2sq_pareto_loss() {
  Loss loss = scalar_loss("w2-pareto", Domain::closed_box({kParetoMargin}, {kParetoUpper}),
                          &w2sq_pareto, &w2sq_pareto_grad);
  attach_quadratic(loss, scalar_curvature([](double th) { return 0.5 * pareto_curvature_a(th); }));
  return loss;
}

Loss sinkhorn_loss(double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("sinkhorn_loss: lambda must be positive");
  Loss loss;
  loss.name = "sinkhorn";
  loss.dim = 5;
  loss.domain = Domain::open_box({-kInf, -kInf, 0.0, -kInf, 0.0}, {kInf, kInf, kInf, kInf, kInf});
  loss.eval = [lambda](Point t, Point th) {
    return sinkhorn_centered(gaussian2_from_params(t), gaussian2_from_params(th), lambda);
  };
  QuadExpansion qe = numeric_quad_expansion(loss);
  loss.quad = qe;
  loss.local_limit = [curv = qe.curvature](Point t, Point h, Point theta0) {
    return quad_form(curv(theta0), t, h);
  };
  return loss;
}

Loss stein_variance_loss() {
  Loss loss = scalar_loss("stein", Domain::positive_half_line(), &stein_variance, &stein_grad);
  attach_quadratic(loss, scalar_curvature([](double th) { return 1.0 / (2.0 * th * th); }));
  return loss;
}

Loss tv_gauss_location_loss(std::size_t d) {
  Loss loss;
  loss.name = "tv-gauss";
  loss.dim = d;
  loss.domain = Domain::whole_space(d);
  loss.eval = [](Point t, Point th) { return tv_gauss_location(t, th); };
  loss.local_order = 1.0;
  loss.local_limit = [](Point t, Point h, Point) { return tv_gauss_local_limit(t, h); };
  return loss;
}

Loss w1_gompertz_loss() {
  Loss loss = scalar_loss("w1-gompertz", Domain::positive_half_line(), &w1_gompertz);
  loss.local_order = 1.0;
  loss.local_limit = [](Point t, Point h, Point theta0) {
    return std::abs(t[0] - h[0]) * gompertz_cdf_derivative_l1(theta0[0]);
  };
  return loss;
}

Loss w2sq_multinomial_loss(std::size_t d) {
  Loss loss;
  loss.name = "w2-multinomial";
  loss.dim = d;
  loss.domain = Domain::simplex(d);
  loss.eval = [](Point p, Point th) { return w2sq_multinomial(p, th); };
  loss.local_order = 1.0;
  loss.local_limit = [](Point t, Point h, Point) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) s += std::abs(t[i] - h[i]);
    return 0.5 * s;
  };
  return loss;
}

Loss l1_reparam_loss(std::size_t d) {
  if (d < 2) throw std::invalid_argument("l1_reparam_loss: d must be at least 2");
  Loss loss;
  loss.name = "l1-reparam";
  loss.dim = d - 1;
  loss.domain = Domain::reduced_simplex(d - 1);
  loss.eval = [](Point a, Point b) { return l1_reparam(a, b); };
  loss.local_order = 1.0;
  loss.local_limit = [](Point t, Point h, Point) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) s += std::abs(t[i] - h[i]);
    return s;
  };
  return loss;
}

Loss squared_euclidean_loss(std::size_t d, Domain domain) {
  Loss loss;
  loss.name = "squared";
  loss.dim = d;
  loss.domain = std::move(domain);
  loss.eval = [](Point t, Point th) {
    double s = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) s += (t[k] - th[k]) * (t[k] - th[k]);
    return s;
  };
  loss.grad_t = [](Point t, Point th) {
    std::vector<double> g(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) g[k] = 2.0 * (t[k] - th[k]);
    return g;
  };
  attach_quadratic(loss, [d](Point) { return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)); });
  return loss;
}

Loss absolute_loss(Domain domain) {
  Loss loss;
  loss.name = "absolute";
  loss.dim = 1;
  loss.domain = std::move(domain);
  loss.eval = [](Point t, Point th) { return std::abs(t[0] - th[0]); };
  loss.local_order = 1.0;
  loss.local_limit = [](Point t, Point h, Point) { return std::abs(t[0] - h[0]); };
  return loss;
}

QuadExpansion numeric_quad_expansion(const Loss& loss, double step) {
  auto curvature = [eval = loss.eval, d = loss.dim, step](Point th) {
    const auto n = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd hess(n, n);
    std::vector<double> t(th.begin(), th.end());
    auto at = [&](Eigen::Index i, double di, Eigen::Index j, double dj) {
      t.assign(th.begin(), th.end());
      t[static_cast<std::size_t>(i)] += di;
      t[static_cast<std::size_t>(j)] += dj;
      return eval(Point(t), th);
    };
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        const double v = (at(i, step, j, step) - at(i, step, j, -step) - at(i, -step, j, step) +
                          at(i, -step, j, -step)) /
                         (4.0 * step * step);
        hess(i, j) = v;
        hess(j, i) = v;
      }
    }
    return Eigen::MatrixXd(0.5 * hess);
  };
  QuadExpansion qe;
  qe.curvature = curvature;
  qe.remainder = [eval = loss.eval, curvature](Point t, Point th) {
    return eval(t, th) - quad_form(curvature(th), t, th);
  };
  return qe;
}

std::vector<std::string> loss_names() {
  return {"hellinger", "w2",         "kl",       "w2-pareto",      "sinkhorn",
          "stein",     "tv-gauss",   "w1-gompertz", "w2-multinomial", "l1-reparam"};
}

Loss loss_by_name(const std::string& name) {
  if (name == "hellinger") return hellinger_exp_loss();
  if (name == "w2") return w2sq_exp_loss();
  if (name == "kl") return kl_exp_loss();
  if (name == "w2-pareto") return w2sq_pareto_loss();
  if (name == "sinkhorn") return sinkhorn_loss(1.0);
  if (name == "stein") return stein_variance_loss();
  if (name == "tv-gauss") return tv_gauss_location_loss(1);
  if (name == "w1-gompertz") return w1_gompertz_loss();
  if (name == "w2-multinomial") return w2sq_multinomial_loss(3);
  if (name == "l1-reparam") return l1_reparam_loss(3);
  throw std::invalid_argument("unknown loss: " + name);
}

}  // namespace bvmlab::losses
