#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "emlab/cli/config.hpp"
#include "emlab/cli/io.hpp"

namespace emlab::cli {

struct RunOutcome {
  /// False if any verdict carrying a target failed (drives --ci).
  bool passed = true;
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;
};

/// timeseries.csv, resolved_config.json, summary.json and plot_timeseries.py.
/// A solver failure writes last_good_state.csv before rethrowing.
RunOutcome run_simulate(const RunConfig& config, const std::filesystem::path& out_dir);

/// decay_report.json (+ plot_decay.py). Throws RequiresBInftyZero when n_divu
/// is requested with B_infty != 0.
RunOutcome run_linear(const RunConfig& config, const std::filesystem::path& out_dir);

/// inequality_report.json. passed is false on a hard-assertion failure
/// (exact interpolation violated or commutator identity off by > 1e-10).
RunOutcome run_inequalities(const RunConfig& config, const std::filesystem::path& out_dir);

/// fit_report.json from any CSV with a time column.
RunOutcome run_fit(const RunConfig& config, const std::filesystem::path& csv_path,
                   const std::filesystem::path& out_dir);

/// Refit of an in-memory table (used by run_fit and the tests).
nlohmann::json fit_table(const Table& table, const FitConfig& config, bool& passed);

/// E(t_j) <= (1 + slack) min_{i<j} E(t_i) for every j.
bool monotone_within(const std::vector<double>& values, double slack);

/// Trapezoid rule on a nonuniform grid.
double trapezoid(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace emlab::cli
