#include "bvmlab/discrete_ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bvmlab::ot {

namespace {

class Tableau {
 public:
  Tableau(const StandardLP& lp, double tol) : tol_(tol) {
    m_ = static_cast<int>(lp.A.rows());
    n_ = static_cast<int>(lp.A.cols());
    t_ = Eigen::MatrixXd::Zero(m_ + 1, n_ + m_ + 1);
    basis_.resize(static_cast<std::size_t>(m_));
    active_.assign(static_cast<std::size_t>(m_), true);
    for (int i = 0; i < m_; ++i) {
      const double sign = lp.b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * lp.A.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, rhs()) = sign * lp.b(i);
      basis_[static_cast<std::size_t>(i)] = n_ + i;
    }
  }

  int rhs() const { return n_ + m_; }

  // Runs Bland-rule pivots until optimal for the current objective row.
  LpStatus optimize(int allowed_cols, int max_pivots, std::vector<std::pair<int, int>>& pivots) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < allowed_cols; ++j) {
        if (t_(m_, j) < -tol_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::kOptimal;

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        if (!active_[static_cast<std::size_t>(i)] || t_(i, enter) <= tol_) continue;
        const double ratio = t_(i, rhs()) / t_(i, enter);
        if (leave < 0 || ratio < best_ratio - tol_ ||
            (std::abs(ratio - best_ratio) <= tol_ &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          best_ratio = std::min(best_ratio, ratio);
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      if (static_cast<int>(pivots.size()) >= max_pivots) return LpStatus::kIterationLimit;
      pivot(leave, enter);
      pivots.emplace_back(enter, leave);
    }
  }

  void pivot(int r, int s) {
    t_.row(r) /= t_(r, s);
    for (int i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, s);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = s;
  }

  void set_phase_one_objective() {
    t_.row(m_).setZero();
    for (int i = 0; i < m_; ++i) {
      t_.row(m_).head(n_) -= t_.row(i).head(n_);
      t_(m_, rhs()) -= t_(i, rhs());
    }
  }

  void set_objective(const Eigen::VectorXd& c) {
    t_.row(m_).setZero();
    t_.row(m_).head(n_) = c.transpose();
    for (int i = 0; i < m_; ++i) {
      if (!active_[static_cast<std::size_t>(i)]) continue;
      const int bi = basis_[static_cast<std::size_t>(i)];
      const double cb = bi < n_ ? c(bi) : 0.0;
      if (cb != 0.0) t_.row(m_) -= cb * t_.row(i);
    }
  }

  double objective_value() const { return -t_(m_, rhs()); }

  // Pivots remaining artificials out of the basis; drops rows that are
  // linear combinations of the others.
  void expel_artificials(std::vector<std::pair<int, int>>& pivots) {
    for (int i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n_) continue;
      int col = -1;
      for (int j = 0; j < n_; ++j) {
        if (std::abs(t_(i, j)) > tol_) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
        pivots.emplace_back(col, i);
      } else {
        active_[static_cast<std::size_t>(i)] = false;
      }
    }
  }

  Eigen::VectorXd solution() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i) {
      const int bi = basis_[static_cast<std::size_t>(i)];
      if (active_[static_cast<std::size_t>(i)] && bi < n_) x(bi) = std::max(0.0, t_(i, rhs()));
    }
    return x;
  }

  int n() const { return n_; }
  int total_cols() const { return n_ + m_; }

 private:
  double tol_;
  int m_ = 0;
  int n_ = 0;
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
  std::vector<bool> active_;
};

void require_simplex(std::span<const double> w, const char* who) {
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::domain_error(std::string(who) + ": weights must be non-negative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::domain_error(std::string(who) + ": weights must sum to 1");
}

}  // namespace

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

LpResult simplex_solve(const StandardLP& lp, const SimplexOptions& options) {
  if (lp.A.rows() != lp.b.size() || lp.A.cols() != lp.c.size()) {
    throw std::invalid_argument("simplex_solve: inconsistent dimensions");
  }
  if (!lp.b.allFinite() || !lp.c.allFinite() || !lp.A.allFinite()) {
    throw std::invalid_argument("simplex_solve: non-finite input");
  }
  LpResult result;
  Tableau tab(lp, options.tolerance);

  tab.set_phase_one_objective();
  result.status = tab.optimize(tab.total_cols(), options.max_pivots, result.pivots);
  if (result.status != LpStatus::kOptimal) return result;
  const double scale = std::max(1.0, lp.b.cwiseAbs().maxCoeff());
  if (tab.objective_value() > 1e-9 * scale) {
    result.status = LpStatus::kInfeasible;
    return result;
  }
  tab.expel_artificials(result.pivots);

  tab.set_objective(lp.c);
  result.status = tab.optimize(tab.n(), options.max_pivots, result.pivots);
  if (result.status != LpStatus::kOptimal) return result;
  result.x = tab.solution();
  result.objective = lp.c.dot(result.x);
  return result;
}

StandardLP build_barycenter_lp(std::span<const double> freq, BarycenterCost cost) {
  require_simplex(freq, "build_barycenter_lp");
  const auto d = static_cast<Eigen::Index>(freq.size());
  if (d < 2) throw std::domain_error("build_barycenter_lp: need d >= 2");
  const Eigen::Index m = d - 1;
  StandardLP lp;
  lp.A = Eigen::MatrixXd::Zero(d, 2 * m + 1);
  lp.A.block(0, 0, m, m).setIdentity();
  lp.A.block(0, m, m, m).setIdentity();
  lp.A.block(m, 0, 1, m).setOnes();
  lp.A(m, 2 * m) = 1.0;
  lp.b = Eigen::VectorXd::Ones(d);
  lp.c = Eigen::VectorXd::Zero(2 * m + 1);
  const double weight = cost == BarycenterCost::kDisplayed ? 1.0 : 2.0;
  for (Eigen::Index k = 0; k < m; ++k) lp.c(k) = 1.0 - weight * freq[static_cast<std::size_t>(k)];
  return lp;
}

StandardLP build_barycenter_dual(std::span<const double> freq, BarycenterCost cost) {
  const StandardLP primal = build_barycenter_lp(freq, cost);
  const Eigen::Index d = primal.A.rows();
  const Eigen::Index n = primal.A.cols();
  StandardLP dual;
  dual.A = Eigen::MatrixXd::Zero(n, 2 * d + n);
  dual.A.block(0, 0, n, d) = primal.A.transpose();
  dual.A.block(0, d, n, d) = -primal.A.transpose();
  dual.A.block(0, 2 * d, n, n).setIdentity();
  dual.b = primal.c;
  dual.c = Eigen::VectorXd::Zero(2 * d + n);
  dual.c.head(d) = -primal.b;
  dual.c.segment(d, d) = primal.b;
  return dual;
}

double barycenter_constant(std::span<const double> freq) {
  return std::accumulate(freq.begin(), freq.end() - 1, 0.0);
}

std::vector<double> barycenter_from_solution(const Eigen::VectorXd& x, std::size_t d) {
  std::vector<double> t(d);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < d; ++k) {
    t[k] = x(static_cast<Eigen::Index>(k));
    sum += t[k];
  }
  t[d - 1] = 1.0 - sum;
  return t;
}

double barycenter_direct_risk(std::span<const double> t, std::span<const double> freq) {
  if (t.size() != freq.size()) throw std::invalid_argument("barycenter_direct_risk: dimension mismatch");
  require_simplex(t, "barycenter_direct_risk");
  double risk = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) risk += freq[j] * (1.0 - t[j]);
  return risk;
}

std::vector<double> barycenter_direct_argmin(std::span<const double> freq) {
  require_simplex(freq, "barycenter_direct_argmin");
  const auto mode = static_cast<std::size_t>(std::max_element(freq.begin(), freq.end()) - freq.begin());
  std::vector<double> t(freq.size(), 0.0);
  t[mode] = 1.0;
  return t;
}

OtSolution solve_ot_lp(std::span<const double> mu, std::span<const double> nu,
                       const Eigen::MatrixXd& cost) {
  const auto n = static_cast<Eigen::Index>(mu.size());
  const auto m = static_cast<Eigen::Index>(nu.size());
  if (cost.rows() != n || cost.cols() != m) throw std::invalid_argument("solve_ot_lp: cost shape");
  double smu = 0.0;
  double snu = 0.0;
  for (double v : mu) {
    if (!(v >= 0.0)) throw std::domain_error("solve_ot_lp: negative weight");
    smu += v;
  }
  for (double v : nu) {
    if (!(v >= 0.0)) throw std::domain_error("solve_ot_lp: negative weight");
    snu += v;
  }
  if (std::abs(smu - snu) > 1e-9) throw std::domain_error("solve_ot_lp: marginal mass mismatch");

  // Variables pi_ij flattened row-major; n row-sum and m column-sum constraints.
  StandardLP lp;
  lp.A = Eigen::MatrixXd::Zero(n + m, n * m);
  lp.b.resize(n + m);
  lp.c.resize(n * m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      lp.A(i, i * m + j) = 1.0;
      lp.A(n + j, i * m + j) = 1.0;
      lp.c(i * m + j) = cost(i, j);
    }
    lp.b(i) = mu[static_cast<std::size_t>(i)];
  }
  for (Eigen::Index j = 0; j < m; ++j) lp.b(n + j) = nu[static_cast<std::size_t>(j)];

  const LpResult res = simplex_solve(lp);
  if (res.status != LpStatus::kOptimal) {
    throw std::runtime_error(std::string("solve_ot_lp: simplex returned ") + to_string(res.status));
  }
  OtSolution out;
  out.plan.plan.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) out.plan.plan(i, j) = res.x(i * m + j);
  }
  out.plan.row_marginals = out.plan.plan.rowwise().sum();
  out.plan.col_marginals = out.plan.plan.colwise().sum().transpose();
  out.cost = res.objective;
  return out;
}

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost, double* total_cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw std::invalid_argument("solve_assignment: cost must be square");
  if (n == 0) throw std::domain_error("solve_assignment: empty problem");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    assignment[static_cast<std::size_t>(match[j] - 1)] = j - 1;
    total += cost(match[j] - 1, j - 1);
  }
  if (total_cost != nullptr) *total_cost = total;
  return assignment;
}

double empirical_w2_1d(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::domain_error("empirical_w2_1d: empty sample");
  if (x.size() != y.size()) throw std::domain_error("empirical_w2_1d: sample sizes differ");
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) acc += (xs[i] - ys[i]) * (xs[i] - ys[i]);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

double empirical_w2_2d(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::domain_error("empirical_w2_2d: empty sample");
  if (x.size() % 2 != 0 || y.size() % 2 != 0) {
    throw std::invalid_argument("empirical_w2_2d: expects row-major M x 2 samples");
  }
  if (x.size() != y.size()) throw std::domain_error("empirical_w2_2d: sample sizes differ");
  const std::size_t m = x.size() / 2;
  if (m > kMaxExactAssignment) {
    throw std::domain_error("empirical_w2_2d: exact path limited to " +
                            std::to_string(kMaxExactAssignment) + " points");
  }
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double dx = x[2 * i] - y[2 * j];
      const double dy = x[2 * i + 1] - y[2 * j + 1];
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = dx * dx + dy * dy;
    }
  }
  double total = 0.0;
  solve_assignment(cost, &total);
  return std::sqrt(std::max(0.0, total) / static_cast<double>(m));
}

}  // namespace bvmlab::ot
