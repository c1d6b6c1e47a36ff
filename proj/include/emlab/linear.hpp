#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "emlab/analysis.hpp"
#include "emlab/model.hpp"

namespace emlab {

using Matrix10 = Eigen::Matrix<std::complex<double>, 10, 10>;
using Vector10 = Eigen::Matrix<std::complex<double>, 10, 1>;

/// Linearized system at one wavenumber, unknowns ordered
/// (n, u1, u2, u3, E1, E2, E3, B1, B2, B3).
struct ModeSystem {
  Vec3 xi{0.0, 0.0, 0.0};
  Matrix10 matrix = Matrix10::Zero();
  PhysicalConstants constants;
};

ModeSystem mode_matrix(const Vec3& xi, const PhysicalConstants& constants);

/// Largest real part of the eigenvalues.
double spectral_abscissa(const ModeSystem& mode);

enum class ExpmMethod {
  Pade,   // scaling and squaring; keeps exact zero blocks exact
  Eigen,  // eigendecomposition, falls back to Pade when ill-conditioned
};

/// exp(t A).
Matrix10 propagator(const ModeSystem& mode, double t, ExpmMethod method = ExpmMethod::Pade);
/// exp(t A) S0; t must be >= 0.
Vector10 evolve_mode(const ModeSystem& mode, double t, const Vector10& S0,
                     ExpmMethod method = ExpmMethod::Pade);

/// Diagonalization of A reused across many times. ok() is false when the
/// eigenvector matrix is too ill-conditioned to trust.
class ModeEigen {
 public:
  explicit ModeEigen(const ModeSystem& mode, double max_condition = 1e8);
  bool ok() const noexcept { return ok_; }
  double condition() const noexcept { return condition_; }
  /// exp(t A) applied to each column of S.
  Eigen::Matrix<std::complex<double>, 10, Eigen::Dynamic> apply(
      double t, const Eigen::Matrix<std::complex<double>, 10, Eigen::Dynamic>& S) const;

 private:
  Matrix10 vectors_;
  Matrix10 inverse_;
  Vector10 values_;
  double condition_ = 0.0;
  bool ok_ = false;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

enum class ProfileKind {
  FlatLow,   // a = 1 for r <= 1, exp(-(r-1)^2 / K^2) above
  LowFreq,   // a = min(1, r)^{s - 3/2} exp(-r^2 / K^2)
  FlatBall,  // a = 1 for r <= 1, 0 above
  Shell,     // all weight on |xi| = radius, averaged over directions
};

/// Radial amplitude a(|xi|) of the initial data. Per wavenumber the data is
/// a random vector with covariance built from a local frame (xi/|xi|, e1, e2):
/// u isotropic with E|u|^2 = a^2, E longitudinal with |E_L| = a and the
/// density fixed by the Gauss law, n = -i |xi| E_L / nu, B transverse with
/// E|B|^2 = a^2, and an optional transverse E with E|E_T|^2 = (transverse_E a)^2.
/// Norms are expectations over this ensemble, which makes them independent of
/// the frame choice.
struct SpectralProfile {
  ProfileKind kind = ProfileKind::FlatLow;
  double s = 1.5;
  double rolloff = 0.5;
  double radius = 1.0;
  double transverse_E = 0.0;
  bool excite_u = true;
  bool excite_E = true;
  bool excite_B = true;

  double amplitude(double r) const;
  /// Radius beyond which the data carries a relative share below tol of the
  /// t = 0 norm (generous for derivative orders up to 2).
  double reach(double tol) const;
};

/// Covariance factor at xi: columns whose outer products sum to the data
/// covariance. Uses an explicit frame vector e1 orthogonal to xi.
Eigen::Matrix<std::complex<double>, 10, Eigen::Dynamic> initial_columns(
    const SpectralProfile& profile, const Vec3& xi, const Vec3& e1, const PhysicalConstants& constants);

struct QuadratureSpec {
  double xi_min = 1e-5;
  int panels_per_decade = 20;
  int nodes_per_panel = 8;
  double tail_tol = 1e-6;
  int polar_nodes = 32;
  int azimuth_nodes = 64;
  /// With B_infty != 0 the integrand is invariant under rotations about
  /// B_infty, so one azimuth suffices; false uses the full product rule.
  bool axisymmetric = true;
  bool check_convergence = true;
  double convergence_tol = 5e-3;
  /// Times where the series is below this fraction of its t = 0 value are
  /// left out of the convergence comparison.
  double convergence_floor = 1e-10;
};

struct SeriesRequest {
  Quantity quantity = Quantity::FullState;
  int k = 0;
};

struct LinearSeries {
  std::vector<NormSeries> series;
  int radial_nodes = 0;
  int directions = 0;
  double xi_max = 0.0;
  /// Largest relative change under doubling of the radial nodes (0 if not checked).
  double max_relative_change = 0.0;
};

/// (int |xi|^{2k} |P exp(tA(xi)) S0(xi)|^2 dxi)^{1/2} for each request and time,
/// P selecting the requested quantity. Throws QuadratureNotConverged when the
/// doubled-node result differs by more than convergence_tol.
LinearSeries weighted_norm_series(const SpectralProfile& profile,
                                  std::span<const SeriesRequest> requests,
                                  std::span<const double> times, const PhysicalConstants& constants,
                                  const QuadratureSpec& quadrature = {});

struct LinearReportConfig {
  double s = 1.5;
  std::vector<int> k_list{0, 1};
  /// Empty selects full_state, nuE, n_only, B_only and (B_infty = 0) n_divu.
  std::vector<Quantity> quantities;
  FitWindow window{20.0, 500.0};
  int n_times = 64;
  /// <= 0 selects the data-class default (see profile_for_s).
  double rolloff = 0.0;
  QuadratureSpec quadrature;
};

struct LinearDecayReport {
  double s = 0.0;
  std::vector<DecayFit> fits;
  std::vector<NormSeries> series;
  LinearSeries quadrature_info;
  bool b_infty_zero = true;

  bool all_passed() const;
};

/// Slope tolerance used for a linear-analyzer fit.
double linear_tolerance(Quantity q, int k);

/// Profile used for data class s: flat_low at s = 3/2, low_freq(s) below.
/// rolloff <= 0 picks 0.05 for flat_low and 0.5 for low_freq.
SpectralProfile profile_for_s(double s, double rolloff);

LinearDecayReport linear_decay_report(const LinearReportConfig& config,
                                      const PhysicalConstants& constants);

nlohmann::json to_json(const LinearDecayReport& report);

}  // namespace emlab
