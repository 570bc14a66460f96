// bvmlab: loss tables, derivative checks, the multinomial barycenter LP,
// the simulation studies and QQ plots from the command line.

#include "bvmlab/asymptotics.hpp"
#include "bvmlab/discrete_ot.hpp"
#include "bvmlab/experiments.hpp"
#include "bvmlab/losses.hpp"
#include "bvmlab/svg.hpp"
#include "bvmlab/wass_calculus.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using bvmlab::experiments::format_double;
using nlohmann::json;

constexpr int kCheckFailed = 2;

struct Range {
  double lo;
  double hi;
};

Range default_range(const std::string& loss) {
  if (loss == "w2-pareto") return {2.5, 6.0};
  return {0.5, 4.0};
}

int loss_table(const std::vector<std::string>& names, int points, std::ostream& out) {
  out << "loss,t,theta,value,gradient\n";
  for (const auto& name : names) {
    const bvmlab::losses::Loss loss = bvmlab::losses::loss_by_name(name);
    if (loss.dim != 1) throw std::invalid_argument("loss-table: " + name + " is not a scalar-parameter loss");
    const Range r = default_range(name);
    for (int i = 0; i < points; ++i) {
      const double t = points == 1 ? r.lo : r.lo + (r.hi - r.lo) * i / (points - 1);
      for (int j = 0; j < points; ++j) {
        const double th = points == 1 ? r.lo : r.lo + (r.hi - r.lo) * j / (points - 1);
        out << name << ',' << format_double(t) << ',' << format_double(th) << ',' << format_double(loss(t, th))
            << ',' << (loss.grad_t ? format_double(loss.grad1(t, th)) : std::string()) << '\n';
      }
    }
  }
  return 0;
}

// Relative error with a floor for values that vanish on the diagonal t = theta.
double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-3); }

int check_derivatives(int points, bool check, std::ostream& out) {
  using bvmlab::losses::w2sq_pareto;
  const auto model = bvmlab::wass::pareto_dual_model();
  out << "t0,theta,grad_dual,grad_fd,grad_rel_err,grad_pass,hess_dual,hess_fd,hess_rel_err,hess_pass\n";
  bool all = true;
  for (int i = 0; i < points; ++i) {
    const double t0 = 2.5 + 3.5 * i / std::max(points - 1, 1);
    for (int j = 0; j < points; ++j) {
      const double th = 2.5 + 3.5 * j / std::max(points - 1, 1);
      const double g = bvmlab::wass::w2_gradient_dual(model, t0, th);
      const double hg = 1e-6;
      const double g_fd = (w2sq_pareto(t0 + hg, th) - w2sq_pareto(t0 - hg, th)) / (2 * hg);
      const double h = bvmlab::wass::w2_hessian_dual(model, t0, th);
      const double hh = 1e-4;
      const double h_fd =
          (w2sq_pareto(t0 + hh, th) - 2 * w2sq_pareto(t0, th) + w2sq_pareto(t0 - hh, th)) / (hh * hh);
      const double ge = rel_err(g, g_fd);
      const double he = rel_err(h, h_fd);
      const bool gp = ge <= 1e-5;
      const bool hp = he <= 1e-4;
      all = all && gp && hp;
      out << format_double(t0) << ',' << format_double(th) << ',' << format_double(g) << ',' << format_double(g_fd)
          << ',' << format_double(ge) << ',' << (gp ? "pass" : "fail") << ',' << format_double(h) << ','
          << format_double(h_fd) << ',' << format_double(he) << ',' << (hp ? "pass" : "fail") << '\n';
    }
  }
  return check && !all ? kCheckFailed : 0;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    v.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::invalid_argument("not a number: " + item);
  }
  return v;
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json lp_json(const bvmlab::ot::StandardLP& lp) {
  json a = json::array();
  for (Eigen::Index i = 0; i < lp.A.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(lp.A.cols()));
    for (Eigen::Index j = 0; j < lp.A.cols(); ++j) row[static_cast<std::size_t>(j)] = lp.A(i, j);
    a.push_back(row);
  }
  return {{"A", a}, {"b", vec_json(lp.b)}, {"c", vec_json(lp.c)}};
}

int barycenter_lp(const std::vector<double>& freq, std::ostream& out) {
  namespace ot = bvmlab::ot;
  const std::size_t d = freq.size();
  json report;
  report["freq"] = freq;
  double displayed_obj = 0.0;
  double derived_obj = 0.0;
  std::vector<double> displayed_t;
  std::vector<double> derived_t;
  for (auto cost : {ot::BarycenterCost::kDisplayed, ot::BarycenterCost::kDerived}) {
    const bool displayed = cost == ot::BarycenterCost::kDisplayed;
    const ot::StandardLP lp = ot::build_barycenter_lp(freq, cost);
    const ot::LpResult primal = ot::simplex_solve(lp);
    const ot::LpResult dual = ot::simplex_solve(ot::build_barycenter_dual(freq, cost));
    json j = lp_json(lp);
    j["status"] = ot::to_string(primal.status);
    j["objective"] = primal.objective;
    j["dual_status"] = ot::to_string(dual.status);
    j["dual_objective"] = -dual.objective;
    j["pivots"] = primal.pivots.size();
    if (primal.status == ot::LpStatus::kOptimal) {
      const std::vector<double> t = ot::barycenter_from_solution(primal.x, d);
      j["t"] = t;
      j["x"] = vec_json(primal.x);
      (displayed ? displayed_t : derived_t) = t;
      (displayed ? displayed_obj : derived_obj) = primal.objective;
    }
    if (!displayed) {
      j["constant"] = ot::barycenter_constant(freq);
      j["objective_plus_constant"] = primal.objective + ot::barycenter_constant(freq);
    }
    report[displayed ? "displayed" : "derived"] = j;
  }
  const std::vector<double> t_direct = ot::barycenter_direct_argmin(freq);
  const double risk_direct = ot::barycenter_direct_risk(t_direct, freq);
  report["direct"] = {{"t", t_direct}, {"risk", risk_direct}};

  auto same = [](const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a[i] - b[i]) > 1e-9) return false;
    }
    return true;
  };
  const double derived_total = derived_obj + ot::barycenter_constant(freq);
  report["flags"] = {
      {"derived_objective_matches_direct_risk", std::abs(derived_total - risk_direct) <= 1e-9},
      {"derived_argmin_matches_direct", same(derived_t, t_direct)},
      {"displayed_argmin_matches_direct", same(displayed_t, t_direct)},
      {"displayed_objective_matches_direct_risk", std::abs(displayed_obj - risk_direct) <= 1e-9}};
  out << report.dump(2) << '\n';
  return 0;
}

struct SimOptions {
  std::string experiment;
  std::string config;
  std::string out_dir;
  bool check = false;
  bool full_scale = false;
  int threads = -1;
};

int bvm_sim(const SimOptions& o) {
  namespace ex = bvmlab::experiments;
  ex::ExperimentConfig cfg;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw std::runtime_error("cannot read config " + o.config);
    json j = json::parse(in);
    if (!j.contains("experiment")) j["experiment"] = o.experiment;
    cfg = ex::ExperimentConfig::from_json(j);
    if (cfg.experiment != o.experiment) {
      throw std::invalid_argument("config experiment '" + cfg.experiment + "' does not match --experiment");
    }
  } else {
    cfg = ex::ExperimentConfig::defaults(o.experiment);
  }
  if (o.full_scale) {
    if (cfg.experiment == "exp-gamma") {
      cfg.n_grid = {10, 100, 10000, 1000000};
      cfg.replications = 500;
    } else {
      cfg.replications = bvmlab::ot::kMaxExactAssignment;
      cfg.metric_repetitions = 100;
    }
  }
  if (const char* env = std::getenv("BVMLAB_SEED")) cfg.seed = std::stoull(env);
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  if (o.threads >= 0) cfg.threads = static_cast<unsigned>(o.threads);
  cfg.validate();

  const ex::ExperimentReport report = ex::run_experiment(cfg);
  ex::write_report(report);
  std::cerr << "wall-clock: " << format_double(std::round(report.wall_seconds * 100) / 100) << " s\n";
  for (const auto& c : report.cells) {
    std::cout << c.loss << " n=" << c.n << " ks=" << format_double(c.ks)
              << " median_abs_error=" << format_double(c.median_abs_error)
              << " median_w2=" << format_double(c.median_limit_distance) << " failures=" << c.failures << '\n';
  }
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  std::cout << "report: " << cfg.output_dir << '\n';
  return o.check && !report.all_checks_passed() ? kCheckFailed : 0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

int qq_plot(const std::string& input, const std::string& output, const std::string& column) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot read " + input);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(input + " is empty");
  const std::vector<std::string> header = split_csv_line(line);
  std::vector<std::pair<double, double>> points;
  if (!header.empty() && header[0] == "theoretical" && column.empty()) {
    while (std::getline(in, line)) {
      const auto cells = split_csv_line(line);
      if (cells.size() >= 2) points.emplace_back(std::stod(cells[0]), std::stod(cells[1]));
    }
  } else {
    const std::string name = column.empty() ? "scaled_1" : column;
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("column '" + name + "' not found in " + input);
    const auto idx = static_cast<std::size_t>(it - header.begin());
    std::vector<double> values;
    while (std::getline(in, line)) {
      const auto cells = split_csv_line(line);
      if (cells.size() > idx) {
        const double v = std::stod(cells[idx]);
        if (std::isfinite(v)) values.push_back(v);
      }
    }
    if (values.empty()) throw std::invalid_argument("no values in column '" + name + "'");
    points = bvmlab::asymptotics::qq_points(values);
  }
  bvmlab::svg::render_svg(points, bvmlab::svg::PlotKind::kQQ, output, {"QQ plot", "normal quantile", "sample"});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bvmlab: Bayes estimators, intrinsic losses and Gaussian-limit diagnostics"};
  app.require_subcommand(1);

  std::vector<std::string> table_losses{"hellinger", "w2", "kl", "w2-pareto", "stein", "w1-gompertz"};
  int table_points = 5;
  std::string table_out;
  auto* table = app.add_subcommand("loss-table", "CSV of (t, theta, value, gradient) over a grid");
  table->add_option("--loss", table_losses, "Scalar losses to tabulate");
  table->add_option("--points", table_points, "Grid points per axis")->check(CLI::Range(1, 1000));
  table->add_option("--out", table_out, "Output file (default stdout)");

  int deriv_points = 5;
  bool deriv_check = false;
  auto* deriv = app.add_subcommand("check-derivatives", "Dual-potential W2 derivatives vs finite differences (Pareto)");
  deriv->add_option("--points", deriv_points, "Grid points per axis on [2.5, 6]")->check(CLI::Range(1, 100));
  deriv->add_flag("--check", deriv_check, "Exit with status 2 if any grid point fails");

  std::string freq_text;
  auto* bary = app.add_subcommand("barycenter-lp", "Solve the multinomial W2 barycenter LP and its dual");
  bary->add_option("--freq", freq_text, "Comma-separated category frequencies")->required();

  SimOptions sim;
  auto* bvm = app.add_subcommand("bvm-sim", "Run a simulation study and write its report");
  bvm->add_option("--experiment", sim.experiment, "exp-gamma | mult-dirichlet")
      ->required()
      ->check(CLI::IsMember({"exp-gamma", "mult-dirichlet"}));
  bvm->add_option("--config", sim.config, "JSON config (defaults when omitted)");
  bvm->add_option("--out", sim.out_dir, "Override the output directory");
  bvm->add_option("--threads", sim.threads, "Worker threads (0: all cores)");
  bvm->add_flag("--check", sim.check, "Exit with status 2 if an acceptance check fails");
  bvm->add_flag("--full-scale", sim.full_scale, "Use the large n grid and repetition counts");

  std::string qq_in;
  std::string qq_out;
  std::string qq_column;
  auto* qq = app.add_subcommand("qq", "Normal QQ plot (SVG) from a CSV column");
  qq->add_option("--input", qq_in, "CSV file")->required();
  qq->add_option("--out", qq_out, "SVG file")->required();
  qq->add_option("--column", qq_column, "Column to plot (default: qq CSV pairs, else scaled_1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*table) {
      if (table_out.empty()) return loss_table(table_losses, table_points, std::cout);
      std::ofstream out(table_out);
      if (!out) throw std::runtime_error("cannot write " + table_out);
      return loss_table(table_losses, table_points, out);
    }
    if (*deriv) return check_derivatives(deriv_points, deriv_check, std::cout);
    if (*bary) return barycenter_lp(parse_list(freq_text), std::cout);
    if (*bvm) return bvm_sim(sim);
    if (*qq) return qq_plot(qq_in, qq_out, qq_column);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
