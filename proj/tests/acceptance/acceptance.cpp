// Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned here
// rather than read from the library tables.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "emlab/analysis.hpp"
#include "emlab/cli/config.hpp"
#include "emlab/cli/experiments.hpp"
#include "emlab/dynamics.hpp"
#include "emlab/energetics.hpp"
#include "emlab/inequality_lab.hpp"
#include "emlab/linear.hpp"
#include "emlab/model.hpp"
#include "emlab/spectral.hpp"

using namespace emlab;

namespace {

int failures = 0;

void verdict(int id, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

void note(const std::string& text) {
  std::printf("    %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

PhysicalConstants zero_background() {
  PhysicalConstants c;
  c.B_infty = {0.0, 0.0, 0.0};
  return c;
}

const DecayFit& find_fit(const LinearDecayReport& r, Quantity q, int k) {
  for (std::size_t i = 0; i < r.fits.size(); ++i) {
    if (r.fits[i].quantity == to_string(q) && r.series[i].metadata.value("k", 0) == k) return r.fits[i];
  }
  throw Error(ErrorCode::InvalidArgument, "missing fit " + std::string(to_string(q)));
}

// Fit checked against a target and tolerance fixed in this file.
bool slope_ok(const DecayFit& f, double target, double tol, const char* label) {
  const bool ok = std::abs(f.slope - target) <= tol && !f.floor_contaminated;
  note(fmt("%-22s slope %+.4f  target %+.3f +- %.2f  r2 %.5f%s  %s", label, f.slope, target, tol,
           f.r_squared, f.floor_contaminated ? "  [noise floor]" : "", ok ? "ok" : "off"));
  return ok;
}

double distance(const PerturbationState& a, const PerturbationState& b) {
  const double dn = l2_norm(a.n - b.n), du = l2_norm(a.u - b.u);
  const double dE = l2_norm(a.E - b.E), dB = l2_norm(a.B - b.B);
  return std::sqrt(dn * dn + du * du + dE * dE + dB * dB);
}

// --- 1-3: linear analyzer at s = 3/2, B_infty = 0 ---

void linear_basic(const LinearDecayReport& r) {
  bool ok = slope_ok(find_fit(r, Quantity::FullState, 0), -0.75, 0.08, "||(n,u,E,B)||");
  ok = slope_ok(find_fit(r, Quantity::FullState, 1), -1.25, 0.10, "||grad(n,u,E,B)||") && ok;
  verdict(1, ok, "linear basic rate at s = 3/2");
}

void regularity_loss(const LinearDecayReport& r) {
  const DecayFit& b = find_fit(r, Quantity::BOnly, 0);
  const DecayFit& nue = find_fit(r, Quantity::NuE, 0);
  bool ok = slope_ok(b, -0.75, 0.08, "||B||");
  // the (n,u,E) part gains 1/2 while B does not; require the gap net of both tolerances
  const double gap = b.slope - nue.slope;
  const double min_gap = 0.5 - 0.08 - 0.10;
  note(fmt("gap ||B|| - ||(n,u,E)|| slopes %.4f, required >= %.2f", gap, min_gap));
  ok = ok && gap >= min_gap;
  verdict(2, ok, "B stays at the basic rate while (n,u,E) improves");
}

void hierarchy(const LinearDecayReport& r) {
  bool ok = slope_ok(find_fit(r, Quantity::NuE, 0), -1.25, 0.10, "||(n,u,E)||");
  ok = slope_ok(find_fit(r, Quantity::NOnly, 0), -1.75, 0.10, "||n||") && ok;
  ok = slope_ok(find_fit(r, Quantity::NDivU, 0), -3.25, 0.15, "||(n, div u)||") && ok;
  // informational: with a background field the blocks couple and ||n|| turns algebraic
  PhysicalConstants with_field;
  LinearReportConfig cfg;
  cfg.s = 1.5;
  cfg.k_list = {0};
  cfg.quantities = {Quantity::NOnly};
  cfg.window = {200.0, 500.0};
  const LinearDecayReport rb = linear_decay_report(cfg, with_field);
  note(fmt("[info] B_infty = (0,0,1): ||n|| slope over [200, 500] %+.4f", rb.fits[0].slope));
  verdict(3, ok, "further decay hierarchy (n, u, E), n, (n, div u)");
}

// --- 4: s sweep and p/s equivalence ---

void s_sweep(const LinearDecayReport& at_three_halves, const PhysicalConstants& zero) {
  bool ok = true;
  for (double s : {0.5, 1.0, 1.5}) {
    DecayFit fit;
    if (s == 1.5) {
      fit = find_fit(at_three_halves, Quantity::FullState, 0);
    } else {
      LinearReportConfig cfg;
      cfg.s = s;
      cfg.k_list = {0};
      cfg.quantities = {Quantity::FullState};
      fit = linear_decay_report(cfg, zero).fits[0];
    }
    ok = slope_ok(fit, -s / 2.0, 0.08, fmt("s = %.1f basic", s).c_str()) && ok;
  }
  for (auto [p, s] : {std::pair{1.5, 0.5}, std::pair{1.2, 1.0}, std::pair{1.0, 1.5}}) {
    const cli::RunConfig by_p = cli::parse_config(fmt("experiment: linear\ndata: {p: %.17g}\n", p));
    const cli::RunConfig by_s = cli::parse_config(fmt("experiment: linear\ndata: {s: %.17g}\n", s));
    bool same = cli::resolved_json(by_p)["linear"] == cli::resolved_json(by_s)["linear"];
    for (Quantity q : {Quantity::FullState, Quantity::NuE, Quantity::NOnly, Quantity::NDivU, Quantity::BOnly}) {
      for (int k : {0, 1}) {
        same = same && theoretical_exponent(q, k, by_p.linear.s, true).value ==
                           theoretical_exponent(q, k, by_s.linear.s, true).value;
      }
    }
    note(fmt("p = %.2f and s = %.2f configs: %s", p, s, same ? "identical targets" : "targets differ"));
    ok = ok && same;
  }
  verdict(4, ok, "s sweep -s/2 and p/s configuration equivalence");
}

// --- 5: exact interpolation ---

void exact_interpolation() {
  EnsembleSpec ens;
  ens.points = 32;
  ens.trials = 1000;
  ens.seed = 5;
  bool ok = true;
  double worst = 0.0;
  for (double l : {0.0, 1.0, 2.0}) {
    for (double s : {0.5, 1.0, 1.5}) {
      try {
        const InequalityReport r = check_exact_interpolation(l, s, NegativeNorm::Sobolev, ens);
        worst = std::max(worst, r.max_ratio);
        ok = ok && r.max_ratio <= 1.0 + 1e-9 && int(r.ratios.size()) == ens.trials;
      } catch (const Error& e) {
        note(e.what());
        ok = false;
      }
    }
  }
  verdict(5, ok, fmt("exact interpolation, 9 (l, s) pairs x 1000 fields at 32^3, max ratio - 1 = %.2e", worst - 1.0));
}

// --- 6: closure f(n) ---

void closure() {
  double id_err = 0.0;
  for (int i = -200; i <= 200; ++i) {
    const double n = 0.004 * i;
    id_err = std::max(id_err, std::abs(f_of_n(n, 3.0) - n));
  }
  {
    InitialDataSpec d;
    d.amplitude = 0.05;
    const Grid g(16, 20.0);
    const PerturbationState s = make_initial_data(d, g, PhysicalConstants{});
    const RealArray n = s.n.to_physical();
    const RealArray fn = f_of_n(std::span<const double>(n), 3.0);
    for (std::size_t i = 0; i < n.size(); ++i) id_err = std::max(id_err, std::abs(fn[i] - n[i]));
  }
  const bool id_ok = id_err <= 1e-14;
  note(fmt("gamma = 3: max |f(n) - n| = %.2e (<= 1e-14)", id_err));

  // remainder order from a log-log fit of |f(h) - h| against h
  const double gamma = 5.0 / 3.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (double h = 1e-2; h >= 1e-4 * 0.999; h /= std::sqrt(10.0), ++m) {
    const double x = std::log(h), y = std::log(std::abs(f_of_n(h, gamma) - h));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const bool order_ok = std::abs(order - 2.0) <= 0.05;
  note(fmt("gamma = 5/3: remainder order %.4f (2 +- 0.05)", order));

  EnsembleSpec ens;
  ens.trials = 200;
  ens.seed = 6;
  bool ratio_ok = true;
  for (int k = 0; k <= 3; ++k) {
    const auto reports = check_f_estimates(k, gamma, 0.05, ens);
    const double r = reports[0].max_ratio;
    note(fmt("k = %d: max ||grad^k f(n)|| / ||grad^k n|| = %.5f (<= 1.1)", k, r));
    ratio_ok = ratio_ok && r <= 1.1;
  }
  verdict(6, id_ok && order_ok && ratio_ok, "closure f(n): identity, quadratic remainder, derivative ratios");
}

// --- 7-9: nonlinear 64^3 run ---

struct Sample {
  double t, E3, D3, full, B, gauss, divB;
};

void nonlinear() {
  const Grid grid(64, 80.0);
  const PhysicalConstants c = zero_background();
  InitialDataSpec d;
  d.kind = InitialKind::FlatLow;
  d.amplitude = 1e-2;
  d.seed = 1;
  const PerturbationState s0 = make_initial_data(d, grid, c);

  Stopwatch order_clock;
  std::vector<PerturbationState> finals;
  for (double dt : {0.05, 0.025, 0.0125}) {
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.end_time = 0.5;
    cfg.gauss_projection_every = 0;
    cfg.output_stride = 1 << 20;
    finals.push_back(simulate(s0, cfg, c).final_state);
  }
  const double e1 = distance(finals[0], finals[1]), e2 = distance(finals[1], finals[2]);
  const double order = std::log2(e1 / e2);
  note(fmt("RK4 self-convergence to t = 0.5: errors %.3e, %.3e, order %.4f (%.0f s)", e1, e2, order,
           order_clock.seconds()));

  MonitorSpec spec;
  spec.energy_N = {3};
  spec.norms = {{Quantity::FullState, 0}, {Quantity::BOnly, 0}};
  std::vector<Sample> samples;
  SolverConfig cfg;
  cfg.dt = 0.02;
  cfg.end_time = 20.0;
  cfg.gauss_projection_every = 0;
  cfg.output_stride = 10;
  Stopwatch run_clock;
  const SimulationResult result = simulate(s0, cfg, c, [&](const PerturbationState& s, const StepInfo&) {
    const FunctionalReport r = functional_report(s, c, spec);
    samples.push_back({s.time, r.E_N[0], r.D_N[0], r.norms[0], r.norms[1], r.residuals.gauss_residual,
                       r.residuals.divB_residual});
  });
  note(fmt("nonlinear run: %ld RK4 steps, dt %.3f, t = %.1f, horizon %.1f, %zu samples (%.0f s)",
           result.steps, result.dt, cfg.end_time, result.horizon, samples.size(), run_clock.seconds()));
  for (const auto& w : result.warnings) note("[warning] " + w);

  double divB_rel = 0.0, gauss = 0.0;
  for (const auto& s : samples) {
    divB_rel = std::max(divB_rel, s.B > 0 ? s.divB / s.B : s.divB);
    gauss = std::max(gauss, s.gauss);
  }
  const bool steps_ok = result.steps >= 1000;
  const bool divB_ok = divB_rel <= 1e-10;
  const bool gauss_ok = gauss <= 1e-6 * d.amplitude;
  const bool order_ok = std::abs(order - 4.0) <= 0.1;
  note(fmt("max div B / ||B|| = %.2e (<= 1e-10); max Gauss residual = %.2e (<= %.0e)", divB_rel, gauss,
           1e-6 * d.amplitude));
  verdict(7, steps_ok && divB_ok && gauss_ok && order_ok, "constraint preservation and RK4 order");

  std::vector<double> t, E3, D3, full;
  for (const auto& s : samples) {
    t.push_back(s.t);
    E3.push_back(s.E3);
    D3.push_back(s.D3);
    full.push_back(s.full);
  }
  const bool inside = cfg.end_time <= result.horizon;
  const bool mono = cli::monotone_within(E3, 0.01);
  const double integral = cli::trapezoid(t, D3);
  const double E0 = E3.front();
  note(fmt("E_3(0) = %.4e, E_3(20) = %.4e, sup E_3 / E_3(0) = %.6f, int D_3 / E_3(0) = %.4f (<= 10)", E0,
           E3.back(), *std::max_element(E3.begin(), E3.end()) / E0, integral / E0));
  verdict(8, inside && mono && integral <= 10.0 * E0, "energy inequality shadow on the 64^3 run to t = 20");

  // the L = 80 box ends at t = 20, where even the linear flow is pre-asymptotic
  const DecayFit short_fit = fit_decay(NormSeries{"full_state", t, full, {}}, FitWindow{5.0, 20.0});
  note(fmt("[info] L = 80 run, ||(n,u,E,B)|| slope over [5, 20] %+.4f", short_fit.slope));
}

// --- 9: qualitative nonlinear decay on a box whose horizon reaches the algebraic regime ---

void long_horizon() {
  note("Full nonlinear whole-space decay rates are NOT reproducible at desk scale: a periodic box has");
  note("no whole-space dispersion, and beyond the wraparound horizon L/4 the flow interacts with its");
  note("own images. The rates are verified for the linearized system (criteria 1-4) and only");
  note("qualitatively here: monotone decay inside the horizon with a slope within 0.25 of -3/4.");

  const Grid grid(64, 400.0);
  const PhysicalConstants c = zero_background();
  InitialDataSpec d;
  d.kind = InitialKind::FlatLow;
  d.amplitude = 1e-2;
  d.seed = 1;
  const PerturbationState s0 = make_initial_data(d, grid, c);
  SolverConfig cfg;
  cfg.dt = 0.1;
  cfg.end_time = wraparound_horizon(grid);
  cfg.gauss_projection_every = 0;
  cfg.output_stride = 10;
  std::vector<double> t, full;
  Stopwatch clock;
  const SimulationResult result = simulate(s0, cfg, c, [&](const PerturbationState& s, const StepInfo&) {
    t.push_back(s.time);
    full.push_back(quantity_norm(s, Quantity::FullState, 0));
  });
  note(fmt("L = 400 run: %ld RK4 steps, dt %.2f, t = %.0f = horizon (%.0f s)", result.steps, result.dt,
           cfg.end_time, clock.seconds()));
  for (const auto& w : result.warnings) note("[warning] " + w);

  const FitWindow window{0.25 * cfg.end_time, cfg.end_time};
  const DecayFit fit = fit_decay(NormSeries{"full_state", t, full, {}}, window);
  const bool slope = slope_ok(fit, -0.75, 0.25, "nonlinear ||(n,u,E,B)||");
  const bool norm_mono = cli::monotone_within(full, 0.01);
  note(fmt("||(n,u,E,B)|| monotone within 1%%: %s", norm_mono ? "yes" : "no"));

  LinearReportConfig lin;
  lin.s = 1.5;
  lin.k_list = {0};
  lin.quantities = {Quantity::FullState};
  lin.window = window;
  note(fmt("[info] linear analyzer over the same window: slope %+.4f",
           linear_decay_report(lin, c).fits[0].slope));
  verdict(9, result.warnings.empty() && norm_mono && slope,
          "non-reproducibility statement and qualitative nonlinear decay inside the horizon");
}

// --- 10: inequality plateaus ---

void plateaus() {
  cli::RunConfig config = cli::parse_config("experiment: inequalities\n");
  const std::filesystem::path out = std::filesystem::temp_directory_path() / "emlab_acceptance_inequalities";
  const cli::RunOutcome r = cli::run_inequalities(config, out);
  bool ok = r.summary["hard_assertions_passed"].get<bool>() && r.summary["all_plateau"].get<bool>();
  // re-read the report for the identity errors and any non-plateau lemma
  std::ifstream in(out / "inequality_report.json");
  const nlohmann::json j = nlohmann::json::parse(in);
  double identity = 0.0;
  int n = 0;
  for (const auto& rep : j["reports"]) {
    ++n;
    if (rep.contains("identity_error")) identity = std::max(identity, rep["identity_error"].get<double>());
    if (rep.contains("plateau") && !rep["plateau"].get<bool>()) {
      note(fmt("no plateau: %s max %.4f last half %.4f", rep["lemma"].get<std::string>().c_str(),
               rep["max_ratio"].get<double>(), rep["last_half_max"].get<double>()));
    }
  }
  note(fmt("%d ensembles of %d trials; max commutator identity error %.2e (<= 1e-10)", n,
           config.inequalities.trials, identity));
  ok = ok && identity <= 1e-10 && config.inequalities.trials == 500;
  verdict(10, ok, "inequality max-ratio plateaus and commutator identity");
}

// ids lists every criterion fn would have printed, so a throw still yields one line each
template <class Fn>
void guarded(std::initializer_list<int> ids, Fn fn) {
  Stopwatch clock;
  try {
    fn();
  } catch (const std::exception& e) {
    for (int id : ids) verdict(id, false, std::string("threw: ") + e.what());
  }
  note(fmt("(%.0f s)", clock.seconds()));
}

}  // namespace

int main() {
  const PhysicalConstants zero = zero_background();
  LinearDecayReport base;
  bool have_base = false;
  {
    Stopwatch clock;
    try {
      LinearReportConfig cfg;
      cfg.s = 1.5;
      cfg.k_list = {0, 1};
      base = linear_decay_report(cfg, zero);
      have_base = true;
      note(fmt("linear report s = 3/2: %d radial nodes, %d directions (%.0f s)", base.quadrature_info.radial_nodes,
               base.quadrature_info.directions, clock.seconds()));
    } catch (const std::exception& e) {
      note(std::string("linear report failed: ") + e.what());
    }
  }
  auto need_base = [&](int id, auto fn) {
    guarded({id}, [&] {
      if (!have_base) throw Error(ErrorCode::InvalidArgument, "no linear report");
      fn();
    });
  };
  need_base(1, [&] { linear_basic(base); });
  need_base(2, [&] { regularity_loss(base); });
  need_base(3, [&] { hierarchy(base); });
  need_base(4, [&] { s_sweep(base, zero); });
  guarded({5}, exact_interpolation);
  guarded({6}, closure);
  guarded({7, 8}, nonlinear);
  guarded({9}, long_horizon);
  guarded({10}, plateaus);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
