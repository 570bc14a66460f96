#pragma once

// Discrete optimal transport: a dense two-phase simplex solver, the
// multinomial barycenter program and its dual, exact transport plans and
// exact empirical 2-Wasserstein distances.

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

namespace bvmlab::ot {

/// min c^T x subject to A x = b, x >= 0.
struct StandardLP {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::kIterationLimit;
  Eigen::VectorXd x;
  double objective = 0.0;
  /// (entering column, leaving row) for every pivot, both phases.
  std::vector<std::pair<int, int>> pivots;
};

struct SimplexOptions {
  double tolerance = 1e-10;
  int max_pivots = 100000;
};

/// Dense tableau, two phases, Bland's rule for both entering and leaving
/// choices. Redundant equality rows are dropped after phase one.
LpResult simplex_solve(const StandardLP& lp, const SimplexOptions& options = {});

/// Cost vector convention for the barycenter program.
///   kDisplayed: c_k = 1 - N_k, as printed with the program.
///   kDerived:   c_k = 1 - 2 N_k, from expanding sum_j N_j sum_k |t_k - y_jk|;
///               add barycenter_constant() to recover that objective.
enum class BarycenterCost { kDisplayed, kDerived };

/// Standard-form barycenter program over x = (t_1..t_{d-1}, u_1..u_{d-1}, v).
StandardLP build_barycenter_lp(std::span<const double> freq,
                               BarycenterCost cost = BarycenterCost::kDisplayed);
/// Dual in standard form over (u, v, z) with lambda = u - v:
/// min (-b, b, 0)^T (u, v, z) s.t. (A^T, -A^T, I)(u, v, z) = c.
StandardLP build_barycenter_dual(std::span<const double> freq,
                                 BarycenterCost cost = BarycenterCost::kDisplayed);
/// sum_{k < d} N_k.
double barycenter_constant(std::span<const double> freq);
/// Full barycenter vector t from an LP solution x.
std::vector<double> barycenter_from_solution(const Eigen::VectorXd& x, std::size_t d);
/// (1/n) sum_i W2^2(t, X_i) = sum_j N_j (1 - t_j) for full probability vector t.
double barycenter_direct_risk(std::span<const double> t, std::span<const double> freq);
/// Minimizer of barycenter_direct_risk: the unit vector at the (first) mode of N.
std::vector<double> barycenter_direct_argmin(std::span<const double> freq);

struct TransportPlan {
  Eigen::MatrixXd plan;
  Eigen::VectorXd row_marginals;
  Eigen::VectorXd col_marginals;
};

struct OtSolution {
  TransportPlan plan;
  double cost = 0.0;
};

/// Exact discrete OT through simplex_solve on the flattened plan.
OtSolution solve_ot_lp(std::span<const double> mu, std::span<const double> nu,
                       const Eigen::MatrixXd& cost);

/// Minimum-cost perfect matching (shortest augmenting paths with potentials).
/// Returns assignment[row] = column.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost, double* total_cost = nullptr);

/// W2 between two equal-size 1-D samples (sorted pairing).
double empirical_w2_1d(std::span<const double> x, std::span<const double> y);

constexpr std::size_t kMaxExactAssignment = 512;

/// W2 between two equal-size planar samples (row-major M x 2), exact
/// assignment for M <= kMaxExactAssignment.
double empirical_w2_2d(std::span<const double> x, std::span<const double> y);

}  // namespace bvmlab::ot
