#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "emlab/cli/experiments.hpp"
#include "emlab/error.hpp"

namespace cli = emlab::cli;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool ci = false;
  std::string csv;
  std::vector<double> window;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "YAML or JSON run configuration");
  sub->add_option("--out", o.out, "output directory (overrides the config)");
  sub->add_option("--seed", o.seed, "random seed (overrides the config)");
  sub->add_flag("--ci", o.ci, "exit with status 2 when any verdict fails");
}

cli::RunConfig configure(const Options& o, cli::Experiment kind) {
  cli::RunConfig c = o.config.empty() ? cli::RunConfig{} : cli::load_config(o.config);
  c.experiment = kind;
  if (!o.out.empty()) c.output = o.out;
  if (o.seed) c.seed = *o.seed;
  if (!o.window.empty()) {
    if (o.window.size() != 2 || !(o.window[1] > o.window[0]) || o.window[0] < 0.0) {
      throw emlab::Error(emlab::ErrorCode::Config, "--window needs t_min t_max with 0 <= t_min < t_max");
    }
    c.fit.window = {o.window[0], o.window[1]};
    c.linear.window = {o.window[0], o.window[1]};
  }
  if (!o.csv.empty()) c.fit.csv = o.csv;
  c.resolve();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Euler-Maxwell decay laboratory"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "nonlinear pseudo-spectral run with energy monitors");
  auto* lin = app.add_subcommand("linear", "linearized decay rates by Fourier quadrature");
  auto* ineq = app.add_subcommand("inequalities", "randomized functional-inequality oracles");
  auto* fit = app.add_subcommand("fit", "refit power laws to a CSV time series");
  for (auto* sub : {sim, lin, ineq, fit}) add_common(sub, o);
  lin->add_option("--window", o.window, "fit window t_min t_max")->expected(2);
  fit->add_option("--window", o.window, "fit window t_min t_max")->expected(2);
  fit->add_option("--csv", o.csv, "input CSV with a time column");

  CLI11_PARSE(app, argc, argv);

  try {
    cli::RunOutcome outcome;
    if (sim->parsed()) {
      const auto c = configure(o, cli::Experiment::Simulate);
      outcome = cli::run_simulate(c, c.output);
    } else if (lin->parsed()) {
      const auto c = configure(o, cli::Experiment::Linear);
      outcome = cli::run_linear(c, c.output);
    } else if (ineq->parsed()) {
      const auto c = configure(o, cli::Experiment::Inequalities);
      outcome = cli::run_inequalities(c, c.output);
    } else {
      const auto c = configure(o, cli::Experiment::Fit);
      if (c.fit.csv.empty()) throw emlab::Error(emlab::ErrorCode::Config, "fit needs --csv or fit.csv");
      outcome = cli::run_fit(c, c.fit.csv, c.output);
    }
    std::cout << outcome.summary.dump(2) << "\n";
    for (const auto& f : outcome.files) std::cerr << "wrote " << f.string() << "\n";
    if (o.ci && !outcome.passed) return 2;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
