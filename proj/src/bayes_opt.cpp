#include "bvmlab/bayes_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bvmlab::bayes {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

Domain shrink(const Domain& d, double margin) {
  Domain out = d;
  for (std::size_t k = 0; k < out.dim(); ++k) {
    if (std::isfinite(out.lower[k])) out.lower[k] += margin;
    if (std::isfinite(out.upper[k])) out.upper[k] -= margin;
  }
  out.closed = true;
  return out;
}

// The returned point is the best evaluation seen anywhere.
void take_best(RiskMinimum& result) {
  for (const auto& tp : result.trace) {
    if (tp.risk < result.risk) {
      result.risk = tp.risk;
      result.theta_hat = tp.t;
    }
  }
}

struct Evaluator {
  const RiskProblem& problem;
  RiskMinimum& result;

  double operator()(std::span<const double> t) {
    const double r = mc_risk(problem, t);
    ++result.evaluations;
    result.trace.push_back({std::vector<double>(t.begin(), t.end()), r});
    return r;
  }
};

RiskMinimum minimize_1d(const RiskProblem& problem) {
  RiskMinimum result;
  Evaluator eval{problem, result};
  const auto& s = problem.settings();
  const Domain& dom = problem.search_domain();
  const auto& draws = problem.draws();

  // For losses increasing in |t - theta| on either side of theta the risk is
  // monotone outside the hull of the draws, so the hull (cut to the search
  // domain) brackets the minimizer.
  auto [mn, mx] = std::minmax_element(draws.begin(), draws.end());
  double lo = std::max(*mn, dom.lower[0]);
  double hi = std::min(*mx, dom.upper[0]);
  if (!(lo <= hi)) lo = hi = std::clamp(*mn, dom.lower[0], dom.upper[0]);

  const int g = std::max(3, s.grid_points);
  double best_t = lo;
  double best_r = std::numeric_limits<double>::infinity();
  int best_i = 0;
  const double step = (hi - lo) / (g - 1);
  for (int i = 0; i < g; ++i) {
    const double t = i == g - 1 ? hi : lo + step * i;
    const double r = eval(std::span<const double>(&t, 1));
    if (r < best_r) {
      best_r = r;
      best_t = t;
      best_i = i;
    }
  }
  double a = best_i == 0 ? lo : lo + step * (best_i - 1);
  double b = best_i == g - 1 ? hi : lo + step * (best_i + 1);
  int iterations = 0;
  auto f = [&](double t) { return eval(std::span<const double>(&t, 1)); };
  const double t = b > a ? golden_section(f, a, b, s.tolerance, s.max_iterations, &iterations) : a;
  const double r = f(t);
  result.status = iterations >= s.max_iterations ? OptStatus::kMaxIterations : OptStatus::kConverged;
  result.theta_hat = {t};
  result.risk = r;
  if (best_r < r) {
    result.theta_hat = {best_t};
    result.risk = best_r;
  }
  take_best(result);
  return result;
}

RiskMinimum minimize_nd(const RiskProblem& problem) {
  RiskMinimum result;
  Evaluator eval{problem, result};
  const auto& s = problem.settings();
  const Domain& dom = problem.search_domain();
  const std::size_t d = problem.dim();
  const auto& draws = problem.draws();
  const std::size_t count = problem.draw_count();

  std::vector<double> start = problem.draw_mean();
  std::vector<double> scale(d, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const double z = draws[i * d + k] - start[k];
      scale[k] += z * z;
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    scale[k] = std::max(std::sqrt(scale[k] / static_cast<double>(count)), 1e-6);
  }
  dom.clamp(start);

  using Vertex = std::vector<double>;
  std::vector<Vertex> simplex(d + 1);
  std::vector<double> values(d + 1);
  int iterations = 0;
  bool converged = false;

  auto project = [&](Vertex& v) { dom.clamp(v); };
  auto diameter = [&](std::size_t best) {
    double diam = 0.0;
    for (std::size_t i = 0; i <= d; ++i) {
      double dist = 0.0;
      for (std::size_t k = 0; k < d; ++k) dist = std::max(dist, std::abs(simplex[i][k] - simplex[best][k]));
      diam = std::max(diam, dist);
    }
    return diam;
  };

  Vertex best_point = start;
  double best_value = eval(start);

  for (int round = 0; round <= s.restarts; ++round) {
    simplex[0] = best_point;
    values[0] = best_value;
    for (std::size_t i = 1; i <= d; ++i) {
      simplex[i] = best_point;
      simplex[i][i - 1] += scale[i - 1];
      project(simplex[i]);
      if (simplex[i] == best_point) {
        simplex[i][i - 1] -= 2.0 * scale[i - 1];
        project(simplex[i]);
      }
      values[i] = eval(simplex[i]);
    }
    converged = false;
    std::vector<std::size_t> order(d + 1);
    while (iterations < s.max_iterations) {
      ++iterations;
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
      const std::size_t ib = order.front();
      const std::size_t iw = order.back();
      const std::size_t is = order[d - 1];
      if (diameter(ib) <= s.simplex_tol) {
        converged = true;
        break;
      }
      Vertex centroid(d, 0.0);
      for (std::size_t i = 0; i <= d; ++i) {
        if (i == iw) continue;
        for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[i][k] / static_cast<double>(d);
      }
      auto along = [&](double coef) {
        Vertex v(d);
        for (std::size_t k = 0; k < d; ++k) v[k] = centroid[k] + coef * (simplex[iw][k] - centroid[k]);
        project(v);
        return v;
      };
      Vertex xr = along(-1.0);
      const double fr = eval(xr);
      if (fr < values[ib]) {
        Vertex xe = along(-2.0);
        const double fe = eval(xe);
        if (fe < fr) {
          simplex[iw] = std::move(xe);
          values[iw] = fe;
        } else {
          simplex[iw] = std::move(xr);
          values[iw] = fr;
        }
        continue;
      }
      if (fr < values[is]) {
        simplex[iw] = std::move(xr);
        values[iw] = fr;
        continue;
      }
      Vertex xc = fr < values[iw] ? along(-0.5) : along(0.5);
      const double fc = eval(xc);
      if (fc < std::min(fr, values[iw])) {
        simplex[iw] = std::move(xc);
        values[iw] = fc;
        continue;
      }
      for (std::size_t i = 0; i <= d; ++i) {
        if (i == ib) continue;
        for (std::size_t k = 0; k < d; ++k) simplex[i][k] = simplex[ib][k] + 0.5 * (simplex[i][k] - simplex[ib][k]);
        project(simplex[i]);
        values[i] = eval(simplex[i]);
      }
    }
    const std::size_t ib = static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());
    const bool improved = values[ib] < best_value;
    if (values[ib] <= best_value) {
      best_value = values[ib];
      best_point = simplex[ib];
    }
    if (!converged || !improved) break;
    for (double& v : scale) v *= 0.1;
  }

  result.theta_hat = best_point;
  result.risk = best_value;
  take_best(result);
  result.status = converged ? OptStatus::kConverged : OptStatus::kMaxIterations;
  return result;
}

}  // namespace

RiskProblem::RiskProblem(std::vector<double> draws, losses::Loss loss, OptimizerSettings settings)
    : draws_(std::move(draws)), loss_(std::move(loss)), settings_(settings) {
  const std::size_t d = loss_.dim;
  if (d == 0 || draws_.size() % d != 0) throw std::invalid_argument("RiskProblem: draws are not S x d");
  count_ = draws_.size() / d;
  if (count_ < kMinDraws) throw std::invalid_argument("RiskProblem: need at least 100 posterior draws");
  search_ = shrink(loss_.domain, settings_.margin);
  const double clamp_margin = loss_.domain.closed ? 0.0 : settings_.margin;
  for (std::size_t s = 0; s < count_; ++s) {
    std::span<double> row(draws_.data() + s * d, d);
    if (!loss_.domain.contains(row)) {
      loss_.domain.clamp(row, clamp_margin);
      ++clamped_;
    }
  }
}

std::vector<double> RiskProblem::draw_mean() const {
  const std::size_t d = dim();
  std::vector<double> m(d, 0.0);
  for (std::size_t s = 0; s < count_; ++s) {
    for (std::size_t k = 0; k < d; ++k) m[k] += draws_[s * d + k];
  }
  for (double& v : m) v /= static_cast<double>(count_);
  return m;
}

double mc_risk(const RiskProblem& problem, std::span<const double> t) {
  const std::size_t d = problem.dim();
  if (t.size() != d) throw std::invalid_argument("mc_risk: dimension mismatch");
  if (!problem.loss().domain.contains(t)) throw std::domain_error("mc_risk: t outside the loss domain");
  const auto& draws = problem.draws();
  const auto& eval = problem.loss().eval;
  double sum = 0.0;
  for (std::size_t s = 0; s < problem.draw_count(); ++s) {
    sum += eval(t, std::span<const double>(draws.data() + s * d, d));
  }
  return sum / static_cast<double>(problem.draw_count());
}

const char* to_string(OptStatus status) {
  return status == OptStatus::kConverged ? "converged" : "max_iterations";
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol,
                      int max_iterations, int* iterations) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  while (b - a > tol && it < max_iterations) {
    ++it;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  if (iterations) *iterations = it;
  return 0.5 * (a + b);
}

RiskMinimum minimize_risk(const RiskProblem& problem) {
  return problem.dim() == 1 ? minimize_1d(problem) : minimize_nd(problem);
}

}  // namespace bvmlab::bayes
