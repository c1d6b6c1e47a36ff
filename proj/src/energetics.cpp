#include "emlab/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "emlab/error.hpp"
#include "emlab/spectral.hpp"

namespace emlab {

namespace {

// ||grad^l f||^2 for l = 0..top.
std::vector<double> levels(const ScalarField& f, int top) {
  const Grid& g = f.grid();
  const auto k2 = g.k2();
  const auto w = g.weight();
  std::vector<double> out(std::size_t(top) + 1, 0.0);
  for (std::size_t i = 0; i < k2.size(); ++i) {
    const double a = w[i] * std::norm(f[i]);
    if (a == 0.0) continue;
    double p = 1.0;
    for (int l = 0; l <= top; ++l) {
      out[std::size_t(l)] += a * p;
      p *= k2[i];
    }
  }
  for (auto& v : out) v *= g.volume();
  return out;
}

std::vector<double> levels(const VectorField& v, int top) {
  std::vector<double> out(std::size_t(top) + 1, 0.0);
  for (const auto& c : v.c) {
    const auto part = levels(c, top);
    for (std::size_t l = 0; l < out.size(); ++l) out[l] += part[l];
  }
  return out;
}

// sum_k w |k|^{2l} Re(conj(a) b) * L^3
double weighted_inner(const ScalarField& a, const ScalarField& b, int l) {
  const Grid& g = a.grid();
  const auto k2 = g.k2();
  const auto w = g.weight();
  double sum = 0.0;
  for (std::size_t i = 0; i < k2.size(); ++i) {
    const double m = l == 0 ? 1.0 : std::pow(k2[i], l);
    sum += w[i] * m * (std::conj(a[i]) * b[i]).real();
  }
  return g.volume() * sum;
}

double weighted_inner(const VectorField& a, const VectorField& b, int l) {
  return weighted_inner(a[0], b[0], l) + weighted_inner(a[1], b[1], l) + weighted_inner(a[2], b[2], l);
}

void require_order(int k, const char* what) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, std::string(what) + " order must be >= 0");
}

}  // namespace

double energy(const PerturbationState& s, int N) {
  require_order(N, "energy");
  double sum = 0.0;
  for (const auto& part : {levels(s.n, N), levels(s.u, N), levels(s.E, N), levels(s.B, N)}) {
    for (double v : part) sum += v;
  }
  return sum;
}

double dissipation(const PerturbationState& s, int N) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "dissipation requires N >= 1");
  const auto n = levels(s.n, N), u = levels(s.u, N), E = levels(s.E, N), B = levels(s.B, N);
  double sum = 0.0;
  for (int l = 0; l <= N; ++l) {
    const auto ul = std::size_t(l);
    sum += n[ul] + u[ul];
    if (l <= N - 1) sum += E[ul];
    if (l >= 1 && l <= N - 1) sum += B[ul];
  }
  return sum;
}

WindowEnergy window_energy(const PerturbationState& s, int k) {
  require_order(k, "window");
  const int top = k + 2;
  const auto n = levels(s.n, top), u = levels(s.u, top), E = levels(s.E, top), B = levels(s.B, top);
  WindowEnergy w;
  for (int l = k; l <= top; ++l) {
    const auto ul = std::size_t(l);
    w.E += n[ul] + u[ul] + E[ul] + B[ul];
    w.D += n[ul] + u[ul];
    if (l <= k + 1) w.D += E[ul];
  }
  w.D += B[std::size_t(k + 1)];
  return w;
}

Interactive interactive(const PerturbationState& s, int k) {
  require_order(k, "interactive");
  Interactive out;
  const VectorField gn = grad(s.n);
  for (int l = k; l <= k + 1; ++l) {
    out.I_n += weighted_inner(s.u, gn, l);
    out.I_E += weighted_inner(s.u, s.E, l);
  }
  out.I_B = -weighted_inner(s.E, curl(s.B), k);
  return out;
}

Certified F_functional(const PerturbationState& s, int k, double eps) {
  require_order(k, "F");
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "F requires eps in (0, 1)");
  const double uu = levels(s.u, k)[std::size_t(k)];
  const double ee = levels(s.E, k)[std::size_t(k)];
  const double cross = weighted_inner(s.u, s.E, k);
  const double x = uu + ee;
  Certified c{x + eps * cross, (1.0 - eps) * x, (1.0 + eps) * x};
  const double slack = 1e-12 * x;
  if (c.value < c.lower - slack || c.value > c.upper + slack) {
    throw Error(ErrorCode::EquivalenceViolated, "F_k left its equivalence bounds");
  }
  return c;
}

Certified G_functional(const PerturbationState& s, int k, double eps, double nu) {
  require_order(k, "G");
  if (!(eps > 0.0 && eps < 2.0 * nu * std::min(nu, 1.0))) {
    throw Error(ErrorCode::InvalidArgument, "G requires 0 < eps < 2 nu min(nu, 1)");
  }
  const ScalarField psi = div(s.u);
  const double nn = levels(s.n, k)[std::size_t(k)];
  const double pp = levels(psi, k)[std::size_t(k)];
  const double cross = weighted_inner(psi, s.n, k);
  const double value = nu * nu * nn + pp - eps * cross;
  // eigenvalues of [[nu^2, -eps/2], [-eps/2, 1]]
  const double mid = 0.5 * (nu * nu + 1.0);
  const double rad = std::sqrt(0.25 * (nu * nu - 1.0) * (nu * nu - 1.0) + 0.25 * eps * eps);
  const double x = nn + pp;
  Certified c{value, (mid - rad) * x, (mid + rad) * x};
  const double slack = 1e-12 * x;
  if (c.value < c.lower - slack || c.value > c.upper + slack) {
    throw Error(ErrorCode::EquivalenceViolated, "G_k left its equivalence bounds");
  }
  return c;
}

double instant_energy(const PerturbationState& s, int k, double eps, double eta) {
  const WindowEnergy w = window_energy(s, k);
  const Interactive i = interactive(s, k);
  return w.E + eps * (i.I_n + i.I_E + eta * i.I_B);
}

double quantity_norm(const PerturbationState& s, Quantity q, int k) {
  require_order(k, "norm");
  auto at = [k](const auto& f) { return levels(f, k)[std::size_t(k)]; };
  double sum = 0.0;
  switch (q) {
    case Quantity::FullState: sum = at(s.n) + at(s.u) + at(s.E) + at(s.B); break;
    case Quantity::NuE: sum = at(s.n) + at(s.u) + at(s.E); break;
    case Quantity::NOnly: sum = at(s.n); break;
    case Quantity::NDivU: sum = at(s.n) + at(div(s.u)); break;
    case Quantity::BOnly: sum = at(s.B); break;
    case Quantity::UOnly: sum = at(s.u); break;
    case Quantity::EOnly: sum = at(s.E); break;
  }
  return std::sqrt(sum);
}

std::optional<std::string> resolution_warning(const PerturbationState& s, int N) {
  const Grid& g = s.grid();
  const auto k2 = g.k2();
  const auto w = g.weight();
  const auto mask = g.dealias_mask();
  double inside = 0.0, outside = 0.0;
  for (const ScalarField* f : {&s.n, &s.u[0], &s.u[1], &s.u[2], &s.E[0], &s.E[1], &s.E[2],
                               &s.B[0], &s.B[1], &s.B[2]}) {
    for (std::size_t i = 0; i < k2.size(); ++i) {
      const double v = w[i] * std::pow(k2[i], N) * std::norm((*f)[i]);
      (mask[i] ? inside : outside) += v;
    }
  }
  const double total = inside + outside;
  if (total > 0.0 && outside > 1e-3 * total) {
    std::ostringstream msg;
    msg << "derivative order " << N << ": " << outside / total
        << " of the weighted energy lies outside the 2/3 band";
    return msg.str();
  }
  return std::nullopt;
}

std::vector<std::string> FunctionalReport::columns(const MonitorSpec& spec) {
  std::vector<std::string> c{"time"};
  for (int N : spec.energy_N) {
    c.push_back("E_" + std::to_string(N));
    c.push_back("D_" + std::to_string(N));
  }
  for (int k : spec.window_k) {
    const std::string s = std::to_string(k);
    for (const char* name : {"Ewin_", "Dwin_", "I_n_", "I_E_", "I_B_", "F_", "G_", "Etilde_"}) {
      c.push_back(name + s);
    }
  }
  c.push_back("gauss_residual");
  c.push_back("divB_residual");
  for (const auto& n : spec.norms) {
    c.push_back("norm_" + std::string(to_string(n.quantity)) + "_k" + std::to_string(n.k));
  }
  return c;
}

std::vector<double> FunctionalReport::row() const {
  std::vector<double> r{time};
  for (std::size_t i = 0; i < E_N.size(); ++i) {
    r.push_back(E_N[i]);
    r.push_back(D_N[i]);
  }
  for (std::size_t i = 0; i < windows.size(); ++i) {
    r.push_back(windows[i].E);
    r.push_back(windows[i].D);
    r.push_back(interactive[i].I_n);
    r.push_back(interactive[i].I_E);
    r.push_back(interactive[i].I_B);
    r.push_back(F[i].value);
    r.push_back(G[i].value);
    r.push_back(instant[i]);
  }
  r.push_back(residuals.gauss_residual);
  r.push_back(residuals.divB_residual);
  for (double v : norms) r.push_back(v);
  return r;
}

FunctionalReport functional_report(const PerturbationState& s, const PhysicalConstants& constants,
                                   const MonitorSpec& spec) {
  FunctionalReport rep;
  rep.time = s.time;
  for (int N : spec.energy_N) {
    rep.E_N.push_back(energy(s, N));
    rep.D_N.push_back(dissipation(s, N));
  }
  for (int k : spec.window_k) {
    const WindowEnergy w = window_energy(s, k);
    const Interactive i = interactive(s, k);
    rep.windows.push_back(w);
    rep.interactive.push_back(i);
    rep.F.push_back(F_functional(s, k, spec.eps));
    rep.G.push_back(G_functional(s, k, spec.eps, constants.nu()));
    rep.instant.push_back(w.E + spec.eps * (i.I_n + i.I_E + spec.eta * i.I_B));
  }
  for (const auto& n : spec.norms) rep.norms.push_back(quantity_norm(s, n.quantity, n.k));
  rep.residuals = verify_compatibility(s, constants);
  return rep;
}

DissipationFit fit_dissipation_rate(std::span<const double> t, std::span<const double> e,
                                    std::span<const double> d) {
  if (t.size() != e.size() || t.size() != d.size()) {
    throw Error(ErrorCode::InvalidArgument, "dissipation fit: series lengths differ");
  }
  if (t.size() < 3) throw Error(ErrorCode::InsufficientSamples, "dissipation fit needs 3 samples");
  DissipationFit fit;
  fit.lambda = 1.0;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double h1 = t[i] - t[i - 1];
    const double h2 = t[i + 1] - t[i];
    // second-order derivative on a nonuniform grid
    const double de = (-h2 / (h1 * (h1 + h2))) * e[i - 1] + ((h2 - h1) / (h1 * h2)) * e[i] +
                      (h1 / (h2 * (h1 + h2))) * e[i + 1];
    if (d[i] <= 0.0) continue;
    fit.lambda = std::min(fit.lambda, -de / d[i]);
    ++fit.samples;
  }
  fit.positive = fit.samples > 0 && fit.lambda > 0.0;
  return fit;
}

}  // namespace emlab
