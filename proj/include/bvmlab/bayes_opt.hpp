#pragma once

// Bayes estimators as minimizers of Monte Carlo posterior risk over a fixed
// draw set (common random numbers across all candidate points).

#include "bvmlab/losses.hpp"

#include <span>
#include <string>
#include <vector>

namespace bvmlab::bayes {

struct OptimizerSettings {
  double tolerance = 1e-9;     // golden-section bracket width
  double simplex_tol = 1e-8;   // Nelder-Mead simplex diameter
  int max_iterations = 5000;
  int grid_points = 64;        // 1-D bracketing scan
  int restarts = 2;            // extra Nelder-Mead restarts from the best vertex
  /// Search domain is the loss domain shrunk by this margin.
  double margin = 1e-9;
};

class RiskProblem {
 public:
  /// draws: row-major S x loss.dim. Draws outside the loss domain are clamped
  /// onto it and counted.
  RiskProblem(std::vector<double> draws, losses::Loss loss, OptimizerSettings settings = {});

  std::size_t draw_count() const { return count_; }
  std::size_t dim() const { return loss_.dim; }
  std::size_t clamped_draws() const { return clamped_; }
  const std::vector<double>& draws() const { return draws_; }
  const losses::Loss& loss() const { return loss_; }
  const OptimizerSettings& settings() const { return settings_; }
  /// Search domain: loss domain shrunk by the margin (finite bounds only).
  const Domain& search_domain() const { return search_; }

  std::vector<double> draw_mean() const;

 private:
  std::vector<double> draws_;
  losses::Loss loss_;
  OptimizerSettings settings_;
  Domain search_;
  std::size_t count_ = 0;
  std::size_t clamped_ = 0;
};

/// Minimum draw count accepted by RiskProblem.
constexpr std::size_t kMinDraws = 100;

/// (1/S) sum_s l(t, draw_s). Throws std::domain_error for t outside the domain.
double mc_risk(const RiskProblem& problem, std::span<const double> t);

enum class OptStatus { kConverged, kMaxIterations };
const char* to_string(OptStatus status);

struct TracePoint {
  std::vector<double> t;
  double risk = 0.0;
};

struct RiskMinimum {
  std::vector<double> theta_hat;
  double risk = 0.0;
  OptStatus status = OptStatus::kConverged;
  int evaluations = 0;
  std::vector<TracePoint> trace;
};

/// 1-D: grid bracket then golden section. d-dim: Nelder-Mead with clamping
/// onto the search domain.
RiskMinimum minimize_risk(const RiskProblem& problem);

/// Golden-section search on [lo, hi] for a unimodal f; returns the bracket midpoint.
double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol,
                      int max_iterations, int* iterations = nullptr);

}  // namespace bvmlab::bayes
