#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emlab/analysis.hpp"
#include "emlab/model.hpp"

namespace emlab {

/// E_N = sum_{l <= N} ||grad^l (n, u, E, B)||^2.
double energy(const PerturbationState& state, int N);

/// D_N = sum_{l <= N} ||grad^l (n, u)||^2 + sum_{l <= N-1} ||grad^l E||^2
///       + sum_{1 <= l <= N-1} ||grad^l B||^2.
double dissipation(const PerturbationState& state, int N);

struct WindowEnergy {
  double E = 0.0;  // sum_{l=k}^{k+2} ||grad^l (n, u, E, B)||^2
  double D = 0.0;  // sum_{l=k}^{k+2} ||grad^l (n,u)||^2 + sum_{l=k}^{k+1} ||grad^l E||^2 + ||grad^{k+1} B||^2
};

WindowEnergy window_energy(const PerturbationState& state, int k);

struct Interactive {
  double I_n = 0.0;  // sum_{l=k}^{k+1} int grad^l u . grad grad^l n
  double I_E = 0.0;  // sum_{l=k}^{k+1} int grad^l u . grad^l E
  double I_B = 0.0;  // -int grad^k E . curl grad^k B
};

Interactive interactive(const PerturbationState& state, int k);

/// A functional value with the equivalence bounds it was checked against.
struct Certified {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// F_k = ||grad^k (u, E)||^2 + eps int grad^k u . grad^k E, certified in
/// [(1 - eps) X, (1 + eps) X] with X = ||grad^k (u, E)||^2.
Certified F_functional(const PerturbationState& state, int k, double eps);

/// G_k = nu^2 ||grad^k n||^2 + ||grad^k psi||^2 - eps int grad^k psi . grad^k n,
/// psi = div u. Requires eps < 2 nu min(nu, 1); certified between the extreme
/// eigenvalues of [[nu^2, -eps/2], [-eps/2, 1]] times ||grad^k (n, psi)||^2.
Certified G_functional(const PerturbationState& state, int k, double eps, double nu);

/// Window energy plus the declared cross terms:
/// E_k^{k+2} + eps (I_n + I_E + eta I_B).
double instant_energy(const PerturbationState& state, int k, double eps, double eta);

/// ||grad^k X|| for a monitored quantity, Euclidean over components.
double quantity_norm(const PerturbationState& state, Quantity q, int k);

/// Message when more than 1e-3 of the grad^N-weighted energy sits outside the
/// 2/3 band, where the weights are dominated by truncation effects.
std::optional<std::string> resolution_warning(const PerturbationState& state, int N);

struct MonitorSpec {
  std::vector<int> energy_N{3};
  std::vector<int> window_k{0, 1};
  double eps = 0.1;
  double eta = 0.1;
  struct Norm {
    Quantity quantity = Quantity::FullState;
    int k = 0;
  };
  std::vector<Norm> norms{{Quantity::FullState, 0}, {Quantity::BOnly, 0}, {Quantity::NuE, 0}, {Quantity::NOnly, 0}};
};

struct FunctionalReport {
  double time = 0.0;
  std::vector<double> E_N;
  std::vector<double> D_N;
  std::vector<WindowEnergy> windows;
  std::vector<Interactive> interactive;
  std::vector<Certified> F;
  std::vector<Certified> G;
  std::vector<double> instant;
  std::vector<double> norms;
  CompatibilityReport residuals;

  /// Column names matching row(), given the spec that produced the report.
  static std::vector<std::string> columns(const MonitorSpec& spec);
  std::vector<double> row() const;
};

FunctionalReport functional_report(const PerturbationState& state, const PhysicalConstants& constants,
                                   const MonitorSpec& spec);

struct DissipationFit {
  double lambda = 0.0;  // min over samples of -(dE/dt) / D, capped at 1
  bool positive = false;
  int samples = 0;
};

/// Centered differences of energy against dissipation on a (possibly
/// nonuniform) time grid; endpoints are skipped.
DissipationFit fit_dissipation_rate(std::span<const double> times, std::span<const double> energy,
                                    std::span<const double> dissipation);

}  // namespace emlab
