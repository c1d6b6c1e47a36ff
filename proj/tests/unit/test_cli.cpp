#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

#include "emlab/cli/config.hpp"
#include "emlab/cli/experiments.hpp"
#include "emlab/cli/io.hpp"
#include "emlab/error.hpp"

using namespace emlab;
using namespace emlab::cli;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("emlab_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig tiny_simulation(double amplitude) {
  RunConfig c = parse_config(
      "grid: {points: 8, box_length: 10}\n"
      "solver: {end_time: 0.5, output_stride: 2}\n"
      "plot_script: false\n");
  c.initial.amplitude = amplitude;
  return c;
}

}  // namespace

TEST(Config, DefaultsResolve) {
  const RunConfig c = parse_config("{}");
  EXPECT_EQ(c.experiment, Experiment::Simulate);
  EXPECT_EQ(c.grid.points, 32);
  EXPECT_DOUBLE_EQ(c.data.s, 1.5);
  EXPECT_DOUBLE_EQ(c.linear.s, 1.5);
  EXPECT_EQ(c.initial.seed, 1u);
  EXPECT_EQ(c.inequalities.trials, 500);
}

TEST(Config, UnknownKeyNamesPathAndLine) {
  const std::string msg = message_of([] { (void)parse_config("grid: {points: 16}\nsolver:\n  end_tim: 3\n", "run.yaml"); });
  EXPECT_NE(msg.find("run.yaml:3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("solver.end_tim"), std::string::npos) << msg;
}

TEST(Config, TypeErrorsAreConfigErrors) {
  EXPECT_EQ(code_of([] { (void)parse_config("grid: {points: many}\n"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { (void)parse_config("grid: {points: 9}\n"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { (void)parse_config("experiment: sideways\n"); }), ErrorCode::Config);
}

TEST(Config, PSetsS) {
  const RunConfig c = parse_config("data: {p: 1}\n");
  EXPECT_DOUBLE_EQ(c.data.s, 1.5);
  EXPECT_DOUBLE_EQ(c.linear.s, 1.5);
  EXPECT_EQ(code_of([] { (void)parse_config("data: {p: 1, s: 1.0}\n"); }), ErrorCode::Config);
  EXPECT_NO_THROW((void)parse_config("data: {p: 1.2, s: 1.0}\n"));
}

TEST(Config, ResolvedJsonRoundTrips) {
  RunConfig c = parse_config(
      "experiment: linear\nseed: 7\ndata: {s: 1.0}\nconstants: {B_infty: [0, 0.5, 0]}\n"
      "inequalities: {gn: [{p: inf, alpha: 0, m: 1, l: 2}]}\n");
  const nlohmann::json j = resolved_json(c);
  EXPECT_EQ(j["inequalities"]["gn"][0]["p"], "inf");
  const RunConfig back = parse_config(j.dump());
  EXPECT_EQ(resolved_json(back), j);
  EXPECT_EQ(back.seed, 7u);
  EXPECT_DOUBLE_EQ(back.constants.B_infty[1], 0.5);
}

TEST(Csv, RoundTripIsExact) {
  Table t;
  t.header = {"time", "a"};
  t.rows = {{0.0, 1.0 / 3.0}, {0.1, std::nextafter(1.0, 2.0)}, {1e-300, -2.5e17}};
  const Table back = parse_csv(format_csv(t));
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
}

TEST(Csv, MalformedInputReportsLine) {
  EXPECT_EQ(code_of([] { (void)parse_csv(""); }), ErrorCode::Io);
  const std::string ragged = message_of([] { (void)parse_csv("time,a\n0,1\n1\n", "x.csv"); });
  EXPECT_NE(ragged.find("x.csv:3"), std::string::npos) << ragged;
  const std::string bad = message_of([] { (void)parse_csv("time,a\n0,one\n", "x.csv"); });
  EXPECT_NE(bad.find("x.csv:2"), std::string::npos) << bad;
  EXPECT_EQ(code_of([] { (void)Table{{"time"}, {}}.column("a"); }), ErrorCode::Io);
}

TEST(Fit, SyntheticPowerLaw) {
  Table t;
  t.header = {"time", "q"};
  for (int i = 0; i <= 200; ++i) {
    const double time = 5.0 * i;
    t.rows.push_back({time, 3.0 * std::pow(1.0 + time, -0.75)});
  }
  FitConfig f;
  f.targets["q"] = -0.75;
  bool passed = false;
  const nlohmann::json j = fit_table(t, f, passed);
  EXPECT_TRUE(passed);
  EXPECT_NEAR(j["fits"][0]["fitted_slope"].get<double>(), -0.75, 1e-12);

  f.targets["q"] = -1.0;
  (void)fit_table(t, f, passed);
  EXPECT_FALSE(passed);

  f.targets.clear();
  f.targets["missing"] = -1.0;
  EXPECT_EQ(code_of([&] { (void)fit_table(t, f, passed); }), ErrorCode::Config);
}

TEST(Fit, WindowSelectsSamples) {
  Table t;
  t.header = {"time", "q"};
  for (int i = 0; i <= 100; ++i) {
    const double time = i;
    // slope changes at t = 50
    t.rows.push_back({time, time < 50 ? std::pow(1.0 + time, -0.5) : std::pow(51.0, 0.5) * std::pow(1.0 + time, -1.5)});
  }
  FitConfig f;
  f.window = {60.0, 100.0};
  bool passed = true;
  const nlohmann::json j = fit_table(t, f, passed);
  EXPECT_NEAR(j["fits"][0]["fitted_slope"].get<double>(), -1.5, 1e-12);
}

TEST(Helpers, MonotoneAndTrapezoid) {
  EXPECT_TRUE(monotone_within({3.0, 2.0, 2.0, 1.0}, 0.0));
  EXPECT_FALSE(monotone_within({3.0, 2.0, 2.1}, 0.01));
  EXPECT_TRUE(monotone_within({3.0, 2.0, 2.01}, 0.01));
  EXPECT_DOUBLE_EQ(trapezoid({0.0, 1.0, 3.0}, {0.0, 1.0, 3.0}), 4.5);
}

TEST(Simulate, ZeroDataStaysZero) {
  const fs::path out = scratch("zero");
  const RunOutcome r = run_simulate(tiny_simulation(0.0), out);
  const Table t = read_csv(out / "timeseries.csv");
  ASSERT_GE(t.rows.size(), 2u);
  for (const auto& row : t.rows)
    for (std::size_t c = 1; c < row.size(); ++c) EXPECT_EQ(row[c], 0.0) << t.header[c];
  EXPECT_TRUE(fs::exists(out / "summary.json"));
  EXPECT_TRUE(fs::exists(out / "resolved_config.json"));
  EXPECT_FALSE(fs::exists(out / "plot_timeseries.py"));
  (void)r;
}

TEST(Simulate, SameSeedSameBytes) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  (void)run_simulate(tiny_simulation(1e-2), a);
  (void)run_simulate(tiny_simulation(1e-2), b);
  EXPECT_EQ(slurp(a / "timeseries.csv"), slurp(b / "timeseries.csv"));
}

TEST(Simulate, EnergyMonotoneForSmallData) {
  const fs::path out = scratch("mono");
  const RunOutcome r = run_simulate(tiny_simulation(1e-2), out);
  EXPECT_TRUE(r.summary["E_3_monotone"].get<bool>()) << r.summary.dump(2);
}

TEST(Linear, DivergenceQuantityNeedsZeroField) {
  RunConfig c = parse_config("experiment: linear\nconstants: {B_infty: [0, 0, 1]}\nlinear: {quantities: [n_divu]}\n");
  EXPECT_EQ(code_of([&] { (void)run_linear(c, scratch("nbinf")); }), ErrorCode::RequiresBInftyZero);
}

TEST(Linear, PAndSConfigsGiveSameTargets) {
  const RunConfig a = parse_config("data: {p: 1}\n");
  const RunConfig b = parse_config("data: {s: 1.5}\n");
  EXPECT_EQ(resolved_json(a)["linear"], resolved_json(b)["linear"]);
  EXPECT_DOUBLE_EQ(theoretical_exponent(Quantity::FullState, 0, a.data.s, true).value,
                   theoretical_exponent(Quantity::FullState, 0, b.data.s, true).value);
}

TEST(Config, ShippedConfigsParse) {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(EMLAB_CONFIG_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    ++seen;
    EXPECT_NO_THROW((void)load_config(entry.path())) << entry.path();
  }
  EXPECT_GE(seen, 5);
}
