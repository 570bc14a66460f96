#pragma once

// Simulation studies: Exponential-Gamma and Multinomial-Dirichlet Bayes
// estimators across sample sizes, with QQ, KS and W2-to-limit diagnostics.

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bvmlab::experiments {

struct ExperimentConfig {
  std::string experiment;            // "exp-gamma" | "mult-dirichlet"
  std::vector<double> theta0;        // exp-gamma: {theta0}; mult: reduced coordinates
  std::vector<double> prior;         // exp-gamma: {a, b}; mult: alpha (d entries)
  std::vector<std::string> losses;
  std::vector<std::size_t> n_grid;
  std::size_t replications = 500;    // M
  std::size_t draws = 2000;          // S
  std::string draw_scheme = "iid";   // "iid" | "stratified"
  std::size_t metric_repetitions = 1;
  std::uint64_t seed = 1;
  std::string output_dir;
  unsigned threads = 0;              // 0: hardware concurrency

  /// Desk-scale defaults for the named experiment.
  static ExperimentConfig defaults(const std::string& experiment);
  /// Missing keys fall back to defaults(experiment).
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Throws std::invalid_argument describing the first invalid field.
  void validate() const;
};

struct ReplicationRow {
  std::size_t rep = 0;
  std::size_t n = 0;
  std::string loss;
  std::vector<double> theta_hat;
  std::vector<double> scaled;        // sqrt(n) (theta_hat - theta0)
  std::string status;                // converged | max_iterations | failed
  std::string error;
  double reference_gap = 0.0;        // see CellSummary::max_reference_gap
  double mc_mean_z = 0.0;
  std::size_t clamped_draws = 0;
};

struct CellSummary {
  std::string loss;
  std::size_t n = 0;
  std::size_t count = 0;
  std::size_t failures = 0;
  double ks = 0.0;                   // per coordinate max, standardized values
  double median_abs_error = 0.0;     // median of ||theta_hat - theta0||_inf
  std::vector<double> limit_distances;  // one per metric repetition
  double median_limit_distance = 0.0;
  /// Largest deviation from the closed-form reference estimator:
  /// squared-euclidean: |theta_hat - draw mean|; l1-reparam: beta medians.
  double max_reference_gap = 0.0;
  /// squared-euclidean only: max |draw mean - posterior mean| in posterior sd / sqrt(S) units.
  double max_mc_mean_z = 0.0;
  std::size_t clamped_draws = 0;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ReplicationRow> rows;   // ordered by (loss, n, rep)
  std::vector<CellSummary> cells;     // ordered by (loss, n)
  std::vector<Check> checks;
  std::vector<std::vector<double>> fisher;
  double wall_seconds = 0.0;

  bool all_checks_passed() const;
  nlohmann::json summary_json() const;
};

ExperimentReport run_exp_gamma(const ExperimentConfig& config);
ExperimentReport run_mult_dirichlet(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Writes replications.csv, qq_<loss>_n<n>.csv/.svg, summary.json and (for
/// several metric repetitions) trend.svg into config.output_dir.
void write_report(const ExperimentReport& report);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace bvmlab::experiments
