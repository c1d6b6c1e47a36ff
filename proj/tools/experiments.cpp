#include "emlab/cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emlab/error.hpp"
#include "emlab/spectral.hpp"

namespace emlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string plot_timeseries_script(const fs::path& csv) {
  return "import matplotlib\n"
         "matplotlib.use('Agg')\n"
         "import matplotlib.pyplot as plt\n"
         "import pandas as pd\n\n"
         "df = pd.read_csv(r'" + csv.string() + "')\n"
         "cols = [c for c in df.columns if c.startswith('norm_') or c.startswith('E_')]\n"
         "fig, ax = plt.subplots()\n"
         "for c in cols:\n"
         "    ax.loglog(1 + df['time'], df[c].abs() + 1e-300, label=c)\n"
         "ax.set_xlabel('1 + t')\n"
         "ax.legend(fontsize='small')\n"
         "fig.savefig(r'" + (csv.parent_path() / "timeseries.png").string() + "', dpi=150)\n";
}

std::string plot_decay_script(const fs::path& report) {
  return "import json\n"
         "import matplotlib\n"
         "matplotlib.use('Agg')\n"
         "import matplotlib.pyplot as plt\n\n"
         "with open(r'" + report.string() + "') as fh:\n"
         "    rep = json.load(fh)\n"
         "fig, ax = plt.subplots()\n"
         "for s in rep['series']:\n"
         "    t = [1 + x for x in s['times']]\n"
         "    ax.loglog(t, s['values'], label=f\"{s['quantity']} k={s['metadata'].get('k', 0)}\")\n"
         "ax.set_xlabel('1 + t')\n"
         "ax.legend(fontsize='small')\n"
         "fig.savefig(r'" + (report.parent_path() / "decay.png").string() + "', dpi=150)\n";
}

void dump_state(const fs::path& path, const PerturbationState& state) {
  const Grid& g = state.grid();
  Table t;
  t.header = {"x", "y", "z", "n", "u1", "u2", "u3", "E1", "E2", "E3", "B1", "B2", "B3"};
  std::vector<RealArray> cols;
  cols.push_back(state.n.to_physical());
  for (const auto* v : {&state.u, &state.E, &state.B}) {
    for (int i = 0; i < 3; ++i) cols.push_back((*v)[i].to_physical());
  }
  const int n = g.points();
  const double h = g.box_length() / n;
  std::size_t idx = 0;
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz < n; ++iz, ++idx) {
        std::vector<double> row{ix * h, iy * h, iz * h};
        for (const auto& c : cols) row.push_back(c[idx]);
        t.rows.push_back(std::move(row));
      }
    }
  }
  write_text(path, "# time = " + std::to_string(state.time) + "\n" + format_csv(t));
}

json write_common(const RunConfig& config, const fs::path& out_dir, RunOutcome& outcome) {
  fs::create_directories(out_dir);
  const json resolved = resolved_json(config);
  write_json(out_dir / "resolved_config.json", resolved);
  outcome.files.push_back(out_dir / "resolved_config.json");
  return resolved;
}

}  // namespace

bool monotone_within(const std::vector<double>& values, double slack) {
  double lowest = std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (v > (1.0 + slack) * lowest) return false;
    lowest = std::min(lowest, v);
  }
  return true;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double sum = 0.0;
  for (std::size_t i = 1; i < t.size() && i < y.size(); ++i) sum += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  return sum;
}

RunOutcome run_simulate(const RunConfig& config, const fs::path& out_dir) {
  RunOutcome outcome;
  write_common(config, out_dir, outcome);
  const Grid grid(config.grid.points, config.grid.box_length);
  const PerturbationState initial = make_initial_data(config.initial, grid, config.constants);
  const CompatibilityReport initial_compat = verify_compatibility(initial, config.constants);

  Table table;
  for (const auto& c : FunctionalReport::columns(config.monitor)) table.header.push_back(c);
  auto observer = [&](const PerturbationState& s, const StepInfo&) {
    table.rows.push_back(functional_report(s, config.constants, config.monitor).row());
  };

  SimulationResult result = [&] {
    try {
      return simulate(initial, config.solver, config.constants, observer);
    } catch (const SolverFailure& failure) {
      write_csv(out_dir / "timeseries.csv", table);
      dump_state(out_dir / "last_good_state.csv", failure.last_good());
      throw;
    }
  }();
  write_csv(out_dir / "timeseries.csv", table);
  outcome.files.push_back(out_dir / "timeseries.csv");

  const std::vector<double> times = table.values(table.column("time"));
  json summary;
  summary["steps"] = result.steps;
  summary["dt"] = result.dt;
  summary["end_time"] = config.solver.end_time;
  summary["wraparound_horizon"] = result.horizon;
  summary["inside_horizon"] = config.solver.end_time <= result.horizon;
  summary["warnings"] = result.warnings;
  summary["projections"] = result.projections.size();
  double worst_before = 0.0;
  for (const auto& p : result.projections) worst_before = std::max(worst_before, p.residual_before);
  summary["max_residual_before_projection"] = worst_before;
  summary["initial_gauss_residual"] = initial_compat.gauss_residual;
  summary["initial_divB_residual"] = initial_compat.divB_residual;
  const CompatibilityReport final_compat = verify_compatibility(result.final_state, config.constants);
  summary["final_gauss_residual"] = final_compat.gauss_residual;
  summary["final_divB_residual"] = final_compat.divB_residual;
  summary["final_positivity_margin"] = final_compat.positivity_margin;

  json energies = json::object();
  for (int n : config.monitor.energy_N) {
    const std::string e_name = "E_" + std::to_string(n);
    const std::vector<double> e = table.values(table.column(e_name));
    json entry;
    entry["initial"] = e.front();
    entry["sup"] = *std::max_element(e.begin(), e.end());
    entry["monotone"] = monotone_within(e, 0.01);
    if (n >= 1) {
      const double integral = trapezoid(times, table.values(table.column("D_" + std::to_string(n))));
      entry["dissipation_integral"] = integral;
      entry["bound_ratio"] = e.front() > 0.0 ? (entry["sup"].get<double>() + integral) / e.front() : 0.0;
    }
    energies[e_name] = entry;
    summary[e_name + "_monotone"] = entry["monotone"];
    if (!entry["monotone"].get<bool>()) outcome.passed = false;
  }
  summary["energies"] = energies;

  // algebraic decay inside a short periodic run is qualitative only
  json fits = json::array();
  const FitWindow window{0.25 * config.solver.end_time, config.solver.end_time};
  for (const auto& norm : config.monitor.norms) {
    const std::string name = "norm_" + std::string(to_string(norm.quantity)) + "_k" + std::to_string(norm.k);
    NormSeries series{name, times, table.values(table.column(name)), json::object()};
    json row{{"column", name}};
    try {
      const DecayFit fit = fit_decay(series, window);
      row = to_json(fit);
      row["column"] = name;
      if (norm.quantity != Quantity::NDivU || config.constants.b_infty_zero()) {
        row["reference_exponent"] =
            theoretical_exponent(norm.quantity, norm.k, config.data.s, config.constants.b_infty_zero()).value;
      }
    } catch (const Error& e) {
      row["skipped"] = e.what();
    }
    fits.push_back(row);
  }
  summary["decay_fits"] = fits;
  summary["passed"] = outcome.passed;
  write_json(out_dir / "summary.json", summary);
  outcome.files.push_back(out_dir / "summary.json");

  if (config.plot_script) {
    write_text(out_dir / "plot_timeseries.py", plot_timeseries_script(out_dir / "timeseries.csv"));
    outcome.files.push_back(out_dir / "plot_timeseries.py");
  }
  outcome.summary = summary;
  return outcome;
}

RunOutcome run_linear(const RunConfig& config, const fs::path& out_dir) {
  const bool zero = config.constants.b_infty_zero();
  for (Quantity q : config.linear.quantities) {
    if (q == Quantity::NDivU && !zero) {
      throw Error(ErrorCode::RequiresBInftyZero, "n_divu decay needs B_infty = 0");
    }
  }
  RunOutcome outcome;
  write_common(config, out_dir, outcome);
  const LinearDecayReport report = linear_decay_report(config.linear, config.constants);
  json j = to_json(report);
  j["data"] = {{"s", config.data.s}};
  if (config.data.p) j["data"]["p"] = *config.data.p;
  json series = json::array();
  for (const auto& s : report.series) series.push_back(to_json(s));
  j["series"] = series;
  write_json(out_dir / "decay_report.json", j);
  outcome.files.push_back(out_dir / "decay_report.json");
  if (config.plot_script) {
    write_text(out_dir / "plot_decay.py", plot_decay_script(out_dir / "decay_report.json"));
    outcome.files.push_back(out_dir / "plot_decay.py");
  }
  outcome.passed = report.all_passed();
  j.erase("series");
  outcome.summary = j;
  return outcome;
}

RunOutcome run_inequalities(const RunConfig& config, const fs::path& out_dir) {
  RunOutcome outcome;
  write_common(config, out_dir, outcome);
  const auto& suite = config.inequalities;
  EnsembleSpec ensemble;
  ensemble.points = suite.points;
  ensemble.box_length = suite.box_length;
  ensemble.seed = config.seed;
  ensemble.trials = suite.trials;

  json reports = json::array();
  bool hard_ok = true;
  bool plateau_ok = true;
  auto record = [&](const InequalityReport& r) {
    json j = to_json(r);
    if (r.exact && !r.hard_assertion_holds()) hard_ok = false;
    if (r.lemma == "commutator" && !(r.identity_error <= 1e-10)) hard_ok = false;
    if (!r.plateau()) plateau_ok = false;
    reports.push_back(j);
  };

  for (const auto& g : suite.gn) record(check_gn(g.p, g.alpha, g.m, g.l, ensemble));
  for (int k : suite.f_k) {
    for (const auto& r : check_f_estimates(k, suite.f_gamma, suite.f_amplitude, ensemble)) record(r);
  }
  for (int k : suite.commutator_k) record(check_commutator(k, ensemble));
  for (const auto& e : suite.embeddings) {
    const double p = 1.0 / (0.5 + e.s / 3.0);
    record(check_embeddings(e.s, p, e.kind, ensemble));
  }
  for (const auto& e : suite.interpolation) {
    try {
      record(check_exact_interpolation(e.l, e.s, e.kind, ensemble));
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ExactViolated) throw;
      hard_ok = false;
      reports.push_back({{"lemma", "sobolev_interpolation"}, {"error", err.what()}, {"l", e.l}, {"s", e.s}});
    }
  }
  json j{{"seed", config.seed},
         {"hard_assertions_passed", hard_ok},
         {"all_plateau", plateau_ok},
         {"reports", reports}};
  write_json(out_dir / "inequality_report.json", j);
  outcome.files.push_back(out_dir / "inequality_report.json");
  outcome.passed = hard_ok && plateau_ok;
  outcome.summary = {{"hard_assertions_passed", hard_ok}, {"all_plateau", plateau_ok}, {"reports", reports.size()}};
  return outcome;
}

json fit_table(const Table& table, const FitConfig& config, bool& passed) {
  passed = true;
  const std::size_t tcol = table.column(config.time_column);
  const std::vector<double> times = table.values(tcol);
  std::vector<std::string> columns = config.columns;
  if (columns.empty()) {
    for (const auto& h : table.header) {
      if (h != config.time_column) columns.push_back(h);
    }
  }
  for (const auto& [name, target] : config.targets) {
    if (std::find(columns.begin(), columns.end(), name) == columns.end()) {
      throw Error(ErrorCode::Config, "fit target for unknown column '" + name + "'");
    }
  }
  json rows = json::array();
  for (const auto& name : columns) {
    NormSeries series{name, times, table.values(table.column(name)), json::object()};
    json row;
    try {
      DecayFit fit = fit_decay(series, config.window, config.floor);
      if (auto it = config.targets.find(name); it != config.targets.end()) {
        fit = with_target(fit, it->second, config.tolerance);
        if (!fit.passed()) passed = false;
      }
      row = to_json(fit);
    } catch (const Error& e) {
      row = {{"quantity", name}, {"skipped", e.what()}};
      if (config.targets.count(name)) passed = false;
    }
    rows.push_back(row);
  }
  return {{"window", {config.window.t_min, config.window.t_max}}, {"fits", rows}, {"all_passed", passed}};
}

RunOutcome run_fit(const RunConfig& config, const fs::path& csv_path, const fs::path& out_dir) {
  RunOutcome outcome;
  const Table table = read_csv(csv_path);
  write_common(config, out_dir, outcome);
  json j = fit_table(table, config.fit, outcome.passed);
  j["csv"] = csv_path.string();
  write_json(out_dir / "fit_report.json", j);
  outcome.files.push_back(out_dir / "fit_report.json");
  outcome.summary = {{"all_passed", outcome.passed}, {"fits", j["fits"].size()}};
  return outcome;
}

}  // namespace emlab::cli
