#include "bvmlab/experiments.hpp"

#include "bvmlab/asymptotics.hpp"
#include "bvmlab/bayes_opt.hpp"
#include "bvmlab/discrete_ot.hpp"
#include "bvmlab/families.hpp"
#include "bvmlab/losses.hpp"
#include "bvmlab/posterior.hpp"
#include "bvmlab/rng.hpp"
#include "bvmlab/special.hpp"
#include "bvmlab/svg.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>
#include <thread>

namespace bvmlab::experiments {

namespace {

using nlohmann::json;

const char* const kExpGamma = "exp-gamma";
const char* const kMultDirichlet = "mult-dirichlet";

// A floating-point quadratic risk is flat to rounding within about
// sqrt(eps) * spread of its minimizer, so the optimizer cannot do better.
constexpr double kQuadraticResolution = 1e-6;

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

losses::Loss resolve_loss(const std::string& experiment, const std::string& name, std::size_t d) {
  if (experiment == kExpGamma) {
    if (name == "hellinger" || name == "w2" || name == "kl") return losses::loss_by_name(name);
    if (name == "squared") return losses::squared_euclidean_loss(1, Domain::positive_half_line());
    if (name == "absolute") return losses::absolute_loss(Domain::positive_half_line());
  } else if (experiment == kMultDirichlet) {
    if (name == "l1-reparam") return losses::l1_reparam_loss(d);
    if (name == "squared") return losses::squared_euclidean_loss(d - 1, Domain::reduced_simplex(d - 1));
  }
  throw std::invalid_argument("loss '" + name + "' is not available for experiment " + experiment);
}

Eigen::MatrixXd fisher_at(const ExperimentConfig& c) {
  if (c.experiment == kExpGamma) return Eigen::MatrixXd::Constant(1, 1, 1.0 / (c.theta0[0] * c.theta0[0]));
  return families::multinomial_family(c.theta0.size() + 1).fisher(c.theta0);
}

// One (loss, n) cell: R metric repetitions of M replications each.
struct CellJob {
  std::string loss;
  std::size_t n;
};

using ReplicationFn = std::function<ReplicationRow(const CellJob&, const losses::Loss&, std::size_t rep)>;

ExperimentReport run_generic(const ExperimentConfig& config, const ReplicationFn& replicate) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = config;
  const Eigen::MatrixXd fisher = fisher_at(config);
  for (Eigen::Index i = 0; i < fisher.rows(); ++i) {
    report.fisher.emplace_back(static_cast<std::size_t>(fisher.cols()));
    for (Eigen::Index k = 0; k < fisher.cols(); ++k) report.fisher.back()[k] = fisher(i, k);
  }
  const std::size_t d = config.theta0.size();
  const std::size_t per_cell = config.replications * config.metric_repetitions;

  for (const std::string& name : config.losses) {
    const losses::Loss loss = resolve_loss(config.experiment, name, d + 1);
    for (std::size_t n : config.n_grid) {
      const CellJob job{name, n};
      std::vector<ReplicationRow> rows(per_cell);
      parallel_for(per_cell, config.threads, [&](std::size_t rep) {
        try {
          rows[rep] = replicate(job, loss, rep);
        } catch (const std::exception& e) {
          ReplicationRow row;
          row.rep = rep;
          row.n = n;
          row.loss = name;
          row.theta_hat.assign(d, std::nan(""));
          row.scaled.assign(d, std::nan(""));
          row.status = "failed";
          row.error = e.what();
          rows[rep] = std::move(row);
        }
      });

      CellSummary cell;
      cell.loss = name;
      cell.n = n;
      cell.count = per_cell;
      std::vector<double> abs_err;
      asymptotics::ReplicationSet all{n, config.theta0, {}, name, config.seed};
      for (const auto& row : rows) {
        cell.clamped_draws += row.clamped_draws;
        if (row.status == "failed") {
          ++cell.failures;
          continue;
        }
        double e = 0.0;
        for (std::size_t k = 0; k < d; ++k) e = std::max(e, std::abs(row.theta_hat[k] - config.theta0[k]));
        abs_err.push_back(e);
        cell.max_reference_gap = std::max(cell.max_reference_gap, row.reference_gap);
        cell.max_mc_mean_z = std::max(cell.max_mc_mean_z, row.mc_mean_z);
        all.estimates.insert(all.estimates.end(), row.theta_hat.begin(), row.theta_hat.end());
      }
      cell.median_abs_error = median(abs_err);
      if (all.count() >= 2) {
        const std::vector<double> z = asymptotics::standardize(all, fisher);
        for (std::size_t k = 0; k < d; ++k) {
          std::vector<double> coord;
          for (std::size_t i = k; i < z.size(); i += d) coord.push_back(z[i]);
          cell.ks = std::max(cell.ks, asymptotics::ks_statistic(coord));
        }
      }
      for (std::size_t r = 0; r < config.metric_repetitions; ++r) {
        asymptotics::ReplicationSet block{n, config.theta0, {}, name, config.seed};
        for (std::size_t i = 0; i < config.replications; ++i) {
          const auto& row = rows[r * config.replications + i];
          if (row.status == "failed") continue;
          block.estimates.insert(block.estimates.end(), row.theta_hat.begin(), row.theta_hat.end());
        }
        if (block.count() < 2) continue;
        RngStream rng(config.seed, stream_hash(config.experiment + "/metric/" + name, {n, r}));
        cell.limit_distances.push_back(asymptotics::gaussian_limit_distance(block, fisher, rng));
      }
      cell.median_limit_distance = median(cell.limit_distances);
      report.cells.push_back(std::move(cell));
      for (auto& row : rows) report.rows.push_back(std::move(row));
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<double> posterior_draws(const posterior::Posterior& post, const ExperimentConfig& c,
                                    RngStream& rng) {
  return c.draw_scheme == "stratified" ? post.sample_stratified(c.draws, rng) : post.sample(c.draws, rng);
}

ReplicationRow finish_row(const CellJob& job, std::size_t rep, const ExperimentConfig& c,
                          const bayes::RiskProblem& problem, const bayes::RiskMinimum& min) {
  ReplicationRow row;
  row.rep = rep;
  row.n = job.n;
  row.loss = job.loss;
  row.theta_hat = min.theta_hat;
  const double root_n = std::sqrt(static_cast<double>(job.n));
  for (std::size_t k = 0; k < min.theta_hat.size(); ++k) {
    row.scaled.push_back(root_n * (min.theta_hat[k] - c.theta0[k]));
  }
  row.status = bayes::to_string(min.status);
  row.clamped_draws = problem.clamped_draws();
  return row;
}

void add_check(ExperimentReport& r, std::string name, bool passed, std::string detail) {
  r.checks.push_back({std::move(name), passed, std::move(detail)});
}

const CellSummary* find_cell(const ExperimentReport& r, const std::string& loss, std::size_t n) {
  for (const auto& c : r.cells) {
    if (c.loss == loss && c.n == n) return &c;
  }
  return nullptr;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ExperimentConfig ExperimentConfig::defaults(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == kExpGamma) {
    c.theta0 = {2.0};
    c.prior = {2.0, 2.0};
    c.losses = {"hellinger", "w2", "kl"};
    c.n_grid = {10, 100, 1000, 10000};
    c.draw_scheme = "iid";
    c.metric_repetitions = 1;
  } else if (experiment == kMultDirichlet) {
    c.theta0 = {1.0 / 3.0, 1.0 / 3.0};
    c.prior = {1.0, 1.0, 1.0};
    c.losses = {"l1-reparam"};
    c.n_grid = {16, 256, 4096};
    c.draw_scheme = "stratified";
    c.metric_repetitions = 20;
  } else {
    throw std::invalid_argument("unknown experiment: " + experiment);
  }
  c.output_dir = "out/" + experiment;
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  ExperimentConfig c = defaults(j.at("experiment").get<std::string>());
  c.theta0 = j.value("theta0", c.theta0);
  c.prior = j.value("prior", c.prior);
  c.losses = j.value("losses", c.losses);
  c.n_grid = j.value("n_grid", c.n_grid);
  c.replications = j.value("replications", c.replications);
  c.draws = j.value("draws", c.draws);
  c.draw_scheme = j.value("draw_scheme", c.draw_scheme);
  c.metric_repetitions = j.value("metric_repetitions", c.metric_repetitions);
  c.seed = j.value("seed", c.seed);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.threads = j.value("threads", c.threads);
  c.validate();
  return c;
}

json ExperimentConfig::to_json() const {
  return json{{"experiment", experiment},
              {"theta0", theta0},
              {"prior", prior},
              {"losses", losses},
              {"n_grid", n_grid},
              {"replications", replications},
              {"draws", draws},
              {"draw_scheme", draw_scheme},
              {"metric_repetitions", metric_repetitions},
              {"seed", seed},
              {"output_dir", output_dir},
              {"threads", threads}};
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (experiment != kExpGamma && experiment != kMultDirichlet) fail("unknown experiment '" + experiment + "'");
  for (double p : prior) {
    if (!(p > 0.0) || !std::isfinite(p)) fail("prior parameters must be positive");
  }
  if (experiment == kExpGamma) {
    if (theta0.size() != 1 || !(theta0[0] > 0.0) || !std::isfinite(theta0[0])) fail("theta0 must be one positive rate");
    if (prior.size() != 2) fail("prior must be [a, b]");
  } else {
    if (theta0.empty()) fail("theta0 must hold d-1 probabilities");
    if (prior.size() != theta0.size() + 1) fail("prior must hold d = theta0.size() + 1 concentrations");
    double sum = 0.0;
    for (double p : theta0) {
      if (!(p > 0.0)) fail("theta0 must be interior to the simplex");
      sum += p;
    }
    if (!(sum < 1.0)) fail("theta0 must be interior to the simplex");
    if (theta0.size() > 2) fail("the W2-to-limit metric supports d <= 3 categories");
    if (replications > ot::kMaxExactAssignment) fail("replications must not exceed 512 for exact assignment");
  }
  if (losses.empty()) fail("losses must not be empty");
  for (const auto& l : losses) resolve_loss(experiment, l, theta0.size() + 1);
  if (n_grid.empty()) fail("n_grid must not be empty");
  for (std::size_t n : n_grid) {
    if (n == 0) fail("sample sizes must be positive");
  }
  if (replications < 2) fail("replications must be at least 2");
  if (draws < bayes::kMinDraws) fail("draws must be at least 100");
  if (draw_scheme != "iid" && draw_scheme != "stratified") fail("draw_scheme must be iid or stratified");
  if (metric_repetitions < 1) fail("metric_repetitions must be at least 1");
}

bool ExperimentReport::all_checks_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

json ExperimentReport::summary_json() const {
  json cells_j = json::array();
  for (const auto& c : cells) {
    cells_j.push_back({{"loss", c.loss},
                       {"n", c.n},
                       {"count", c.count},
                       {"failures", c.failures},
                       {"ks_standardized", c.ks},
                       {"median_abs_error", c.median_abs_error},
                       {"limit_distances", c.limit_distances},
                       {"median_limit_distance", c.median_limit_distance},
                       {"max_reference_gap", c.max_reference_gap},
                       {"max_mc_mean_z", c.max_mc_mean_z},
                       {"clamped_draws", c.clamped_draws}});
  }
  json checks_j = json::array();
  for (const auto& c : checks) checks_j.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  json failures = json::array();
  for (const auto& r : rows) {
    if (r.status == "failed") failures.push_back({{"loss", r.loss}, {"n", r.n}, {"rep", r.rep}, {"error", r.error}});
  }
  return json{{"config", config.to_json()},
              {"fisher", fisher},
              {"scaled_columns", "sqrt(n) (theta_hat - theta0), not standardized"},
              {"standardized", "I^{1/2} sqrt(n) (theta_hat - theta0); used for ks and the qq files"},
              {"cells", cells_j},
              {"checks", checks_j},
              {"failures", failures}};
}

ExperimentReport run_exp_gamma(const ExperimentConfig& config) {
  if (config.experiment != kExpGamma) throw std::invalid_argument("run_exp_gamma: wrong experiment id");
  const families::ParametricFamily fam = families::exponential_family();
  const double a = config.prior[0];
  const double b = config.prior[1];
  ExperimentReport report = run_generic(config, [&](const CellJob& job, const losses::Loss& loss, std::size_t rep) {
    RngStream rng(config.seed, stream_hash(config.experiment + "/" + job.loss, {job.n, rep}));
    const std::vector<double> data = fam.sample(config.theta0, job.n, rng);
    const posterior::Posterior post = posterior::update_exp_gamma(a, b, data);
    bayes::RiskProblem problem(posterior_draws(post, config, rng), loss);
    const bayes::RiskMinimum min = bayes::minimize_risk(problem);
    ReplicationRow row = finish_row(job, rep, config, problem, min);
    if (job.loss == "squared") {
      // Exact minimizer of the Monte Carlo risk is the draw mean; record the
      // optimizer gap and, separately, the Monte Carlo error of that mean.
      const double m = problem.draw_mean()[0];
      row.reference_gap = std::abs(min.theta_hat[0] - m);
      const double se = post.sd()[0] / std::sqrt(static_cast<double>(config.draws));
      row.mc_mean_z = std::abs(m - post.mean()[0]) / se;
    }
    return row;
  });

  const auto [n_lo, n_hi] = std::minmax_element(config.n_grid.begin(), config.n_grid.end());
  for (const auto& loss : config.losses) {
    const CellSummary* lo = find_cell(report, loss, *n_lo);
    const CellSummary* hi = find_cell(report, loss, *n_hi);
    add_check(report, "failures_" + loss, lo && hi && std::all_of(report.cells.begin(), report.cells.end(), [&](const CellSummary& c) { return c.loss != loss || c.failures == 0; }),
              "no failed replications");
    if (loss == "squared") {
      double gap = 0.0;
      double z = 0.0;
      for (const auto& c : report.cells) {
        if (c.loss == loss) {
          gap = std::max(gap, c.max_reference_gap);
          z = std::max(z, c.max_mc_mean_z);
        }
      }
      add_check(report, "squared_matches_draw_mean", gap <= kQuadraticResolution,
                "max |theta_hat - draw mean| = " + format_double(gap));
      add_check(report, "draw_mean_matches_posterior_mean", z <= 5.0,
                "max |draw mean - (a+n)/(b+sum x)| / (sd/sqrt(S)) = " + format_double(z));
      continue;
    }
    const bool intrinsic = loss == "hellinger" || loss == "w2" || loss == "kl";
    if (intrinsic && *n_hi >= 10000) {
      add_check(report, "ks_" + loss + "_n" + std::to_string(*n_hi), hi->ks <= 0.09,
                "KS = " + format_double(hi->ks) + " (limit 0.09)");
    }
    if (*n_hi > *n_lo) {
      add_check(report, "consistency_" + loss, hi->median_abs_error < lo->median_abs_error,
                "median |theta_hat - theta0|: n=" + std::to_string(*n_lo) + " " + format_double(lo->median_abs_error) +
                    ", n=" + std::to_string(*n_hi) + " " + format_double(hi->median_abs_error));
    }
  }
  return report;
}

ExperimentReport run_mult_dirichlet(const ExperimentConfig& config) {
  if (config.experiment != kMultDirichlet) throw std::invalid_argument("run_mult_dirichlet: wrong experiment id");
  const std::size_t d = config.theta0.size() + 1;
  const families::ParametricFamily fam = families::multinomial_family(d);
  ExperimentReport report = run_generic(config, [&](const CellJob& job, const losses::Loss& loss, std::size_t rep) {
    RngStream rng(config.seed, stream_hash(config.experiment + "/" + job.loss, {job.n, rep}));
    const std::vector<double> data = fam.sample(config.theta0, job.n, rng);
    const posterior::Posterior post = posterior::update_mult_dirichlet(config.prior, data);
    bayes::RiskProblem problem(posterior_draws(post, config, rng), loss);
    const bayes::RiskMinimum min = bayes::minimize_risk(problem);
    ReplicationRow row = finish_row(job, rep, config, problem, min);
    if (job.loss == "l1-reparam") {
      for (std::size_t k = 0; k + 1 < d; ++k) {
        const auto [ak, bk] = post.marginal_beta(k);
        row.reference_gap = std::max(row.reference_gap, std::abs(min.theta_hat[k] - special::beta_median(ak, bk)));
      }
    } else if (job.loss == "squared") {
      const std::vector<double> m = problem.draw_mean();
      for (std::size_t k = 0; k + 1 < d; ++k) {
        row.reference_gap = std::max(row.reference_gap, std::abs(min.theta_hat[k] - m[k]));
      }
    }
    return row;
  });

  for (const auto& loss : config.losses) {
    double gap = 0.0;
    std::size_t failures = 0;
    std::vector<const CellSummary*> trend;
    for (std::size_t n : config.n_grid) {
      const CellSummary* c = find_cell(report, loss, n);
      gap = std::max(gap, c->max_reference_gap);
      failures += c->failures;
      trend.push_back(c);
    }
    add_check(report, "failures_" + loss, failures == 0, std::to_string(failures) + " failed replications");
    if (loss == "l1-reparam") {
      add_check(report, "beta_medians_" + loss, gap <= 1e-3,
                "max ||theta_hat - marginal beta medians||_inf = " + format_double(gap) + " (limit 1e-3)");
    } else if (loss == "squared") {
      add_check(report, "squared_matches_draw_mean", gap <= kQuadraticResolution, "max gap = " + format_double(gap));
    }
    std::vector<std::size_t> order(config.n_grid.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return config.n_grid[i] < config.n_grid[j]; });
    bool decreasing = true;
    std::string detail;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const CellSummary* c = trend[order[i]];
      if (i > 0 && !(c->median_limit_distance < trend[order[i - 1]]->median_limit_distance)) decreasing = false;
      detail += (i ? ", n=" : "n=") + std::to_string(c->n) + " " + format_double(c->median_limit_distance);
    }
    if (order.size() > 1) add_check(report, "limit_distance_decreasing_" + loss, decreasing, "median W2: " + detail);
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.experiment == kExpGamma) return run_exp_gamma(config);
  if (config.experiment == kMultDirichlet) return run_mult_dirichlet(config);
  throw std::invalid_argument("unknown experiment: " + config.experiment);
}

void write_report(const ExperimentReport& report) {
  namespace fs = std::filesystem;
  const ExperimentConfig& c = report.config;
  if (c.output_dir.empty()) throw std::invalid_argument("write_report: empty output directory");
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  const std::size_t d = c.theta0.size();

  auto open = [](const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
  };

  {
    std::ofstream out = open(dir / "replications.csv");
    out << "rep,n,loss";
    for (std::size_t k = 1; k <= d; ++k) out << ",theta_hat_" << k;
    for (std::size_t k = 1; k <= d; ++k) out << ",scaled_" << k;
    out << ",status\n";
    for (const auto& r : report.rows) {
      out << r.rep << ',' << r.n << ',' << r.loss;
      for (double v : r.theta_hat) out << ',' << format_double(v);
      for (double v : r.scaled) out << ',' << format_double(v);
      out << ',' << r.status << '\n';
    }
    if (!out) throw std::runtime_error("write failed for replications.csv");
  }

  Eigen::MatrixXd fisher(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) fisher(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = report.fisher[i][k];
  }
  std::map<std::string, std::vector<std::pair<double, double>>> trends;
  for (const auto& cell : report.cells) {
    asymptotics::ReplicationSet set{cell.n, c.theta0, {}, cell.loss, c.seed};
    for (const auto& r : report.rows) {
      if (r.loss == cell.loss && r.n == cell.n && r.status != "failed") {
        set.estimates.insert(set.estimates.end(), r.theta_hat.begin(), r.theta_hat.end());
      }
    }
    if (!std::isnan(cell.median_limit_distance)) {
      trends[cell.loss].emplace_back(std::log10(static_cast<double>(cell.n)), cell.median_limit_distance);
    }
    if (set.count() < 2) continue;
    const std::vector<double> z = asymptotics::standardize(set, fisher);
    std::vector<std::vector<std::pair<double, double>>> qq(d);
    for (std::size_t k = 0; k < d; ++k) {
      std::vector<double> coord;
      for (std::size_t i = k; i < z.size(); i += d) coord.push_back(z[i]);
      qq[k] = asymptotics::qq_points(coord);
    }
    const std::string stem = "qq_" + cell.loss + "_n" + std::to_string(cell.n);
    std::ofstream out = open(dir / (stem + ".csv"));
    out << "theoretical";
    for (std::size_t k = 1; k <= d; ++k) out << ",standardized_" << k;
    out << '\n';
    for (std::size_t i = 0; i < qq[0].size(); ++i) {
      out << format_double(qq[0][i].first);
      for (std::size_t k = 0; k < d; ++k) out << ',' << format_double(qq[k][i].second);
      out << '\n';
    }
    svg::render_svg(qq[0], svg::PlotKind::kQQ, (dir / (stem + ".svg")).string(),
                    {cell.loss + ", n = " + std::to_string(cell.n), "normal quantile", "standardized estimate"});
  }
  for (const auto& [loss, pts] : trends) {
    if (pts.size() < 2) continue;
    svg::render_svg(pts, svg::PlotKind::kTrend, (dir / ("trend_" + loss + ".svg")).string(),
                    {loss + ": W2 to Gaussian limit", "log10 n", "median W2"});
  }
  std::ofstream out = open(dir / "summary.json");
  out << report.summary_json().dump(2) << '\n';
}

}  // namespace bvmlab::experiments
