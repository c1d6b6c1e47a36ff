#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "emlab/field.hpp"

namespace emlab {

using Vec3 = std::array<double, 3>;

struct PhysicalConstants {
  double gamma = 5.0 / 3.0;
  double A = 1.0;
  double tau = 1.0;
  double lambda = 1.0;
  double epsilon = 1.0;
  double n_infty = 1.0;
  Vec3 B_infty{0.0, 0.0, 1.0};

  double mu() const noexcept { return 0.5 * (gamma - 1.0); }
  double nu() const noexcept;
  bool b_infty_zero() const noexcept;
  /// True when A = tau = lambda = epsilon = n_infty = 1.
  bool normalized() const noexcept;
  /// Throws InvalidArgument on gamma < 1 or a nonpositive parameter.
  void validate() const;
};

/// (n, u, E, B) in the reformulated variables, plus rescaled time.
struct PerturbationState {
  ScalarField n;
  VectorField u;
  VectorField E;
  VectorField B;
  double time = 0.0;

  explicit PerturbationState(const Grid& grid) : n(grid), u(grid), E(grid), B(grid) {}

  const Grid& grid() const noexcept { return n.grid(); }

  /// this += factor * other on every field (time untouched).
  PerturbationState& axpy(double factor, const PerturbationState& other);
  PerturbationState& operator*=(double factor) noexcept;
  void set_zero() noexcept;
};

/// f(n) = (1 + mu n)^{2/(gamma-1)} - 1, and exp(n) - 1 for gamma = 1.
double f_of_n(double n, double gamma);
double f_prime(double n, double gamma);
/// Closed-form inverse: n = ((1 + y)^mu - 1) / mu, log(1 + y) for gamma = 1.
double f_inverse(double y, double gamma);

/// Pointwise f on physical samples; throws DensityNonpositive if 1 + mu n <= 0.
RealArray f_of_n(std::span<const double> n, double gamma);
ScalarField f_of_n(const ScalarField& n, double gamma);

/// Fields of the original system sampled in physical space.
struct OriginalFields {
  RealArray density;
  std::array<RealArray, 3> velocity;
  std::array<RealArray, 3> electric;
  std::array<RealArray, 3> magnetic;
  double time = 0.0;
};

/// Change of variables to the perturbation unknowns. For gamma > 1,
/// n = 2/(gamma-1) ((rho / n_infty)^{(gamma-1)/2} - 1); for gamma = 1,
/// n = sqrt(A) (ln rho - ln n_infty). u, E scale by 1/sqrt(gamma),
/// B = B~ / sqrt(gamma) - B_infty and t = sqrt(gamma) t~.
PerturbationState to_perturbation(const Grid& grid, const OriginalFields& fields,
                                  const PhysicalConstants& constants);
OriginalFields from_perturbation(const PerturbationState& state, const PhysicalConstants& constants);

enum class InitialKind { LowFreq, FlatLow, Bump, SingleMode };

std::string_view to_string(InitialKind kind);
/// 0.05 for flat_low (a nearly sharp plateau edge), 0.5 otherwise.
double default_rolloff(InitialKind kind);
InitialKind parse_initial_kind(std::string_view name);

struct InitialDataSpec {
  InitialKind kind = InitialKind::FlatLow;
  double amplitude = 1e-2;
  std::uint64_t seed = 1;
  /// low_freq: negative Sobolev index the spectrum is shaped for.
  double s = 1.0;
  /// Rolloff K: exp(-|k|^2 / K^2) for low_freq, exp(-(|k|-1)^2 / K^2) above
  /// the plateau for flat_low. <= 0 selects default_rolloff(kind).
  double rolloff = 0.0;
  /// bump: support radius of each bump.
  double bump_radius = 4.0;
  /// single_mode: lattice mode of the excited shell.
  std::array<int, 3> mode{1, 0, 0};
  /// Scale of the free transverse part of E0 relative to the seed (0 = none).
  double transverse_E = 0.0;
};

/// Compatible initial data: B0 transverse, E0 longitudinal part solved from
/// div E0 = -nu f(n0). Random kinds draw band-limited seeds for u, E and B,
/// each rescaled to box L2 norm `amplitude`; the density follows from the
/// seed's divergence so the Gauss law and periodic neutrality hold exactly.
PerturbationState make_initial_data(const InitialDataSpec& spec, const Grid& grid,
                                    const PhysicalConstants& constants);

struct CompatibilityReport {
  double gauss_residual = 0.0;   // ||div E + nu f(n)||_{L2}
  double divB_residual = 0.0;    // ||div B||_{L2}
  double positivity_margin = 1.0;  // min over the grid of 1 + mu n
};

CompatibilityReport verify_compatibility(const PerturbationState& state,
                                         const PhysicalConstants& constants);

/// Replaces the longitudinal part of E by i k nu fhat(n) / |k|^2.
void solve_gauss_law(PerturbationState& state, const PhysicalConstants& constants);

}  // namespace emlab
