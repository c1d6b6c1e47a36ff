#pragma once

#include <span>
#include <vector>

#include "emlab/field.hpp"

namespace emlab {

/// What a negative-order multiplier does with the k = 0 coefficient.
enum class MeanPolicy {
  Reject,   // throw NegativePowerOnNonzeroMean if the mean is not negligible
  Exclude,  // silently drop the mean (used for localized data in large boxes)
};

// --- differential operators (spectral multipliers, Nyquist-safe) ---

ScalarField partial(const ScalarField& f, int axis);
VectorField grad(const ScalarField& f);
ScalarField div(const VectorField& v);
VectorField curl(const VectorField& v);
ScalarField laplacian(const ScalarField& f);

/// Every order-l partial derivative d_{i1}...d_{il} f with i_j in {0,1,2}, in
/// lexicographic order (3^l components). Sum of squared component norms equals
/// homog_norm(f, l)^2 for fields without Nyquist content.
std::vector<ScalarField> derivative_tensor(const ScalarField& f, int order);

/// Lambda^s f = F^{-1}(|k|^s F f). The zero mode maps to zero for s != 0;
/// s == 0 is the identity.
ScalarField fractional(const ScalarField& f, double s, MeanPolicy policy = MeanPolicy::Reject);
VectorField fractional(const VectorField& v, double s, MeanPolicy policy = MeanPolicy::Reject);

VectorField transverse_part(const VectorField& v);
VectorField longitudinal_part(const VectorField& v);

/// Applies the 2/3 truncation in place.
void dealias(ScalarField& f);
void dealias(VectorField& v);

// --- norms; all use box-measure quadrature so they scale like continuum norms ---

/// Integral of a*b over the box.
double inner_product(const ScalarField& a, const ScalarField& b);
double inner_product(const VectorField& a, const VectorField& b);

double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& v);

/// ||Lambda^l f||_{L2}; equals ||grad^l f||_{L2} for integer l.
double homog_norm(const ScalarField& f, double l);
double homog_norm(const VectorField& v, double l);

/// ||f||_{H^k}, with ||f||_{H^k}^2 = sum_{l<=k} ||grad^l f||^2.
double sobolev_norm(const ScalarField& f, int k);
double sobolev_norm(const VectorField& v, int k);

/// ||Lambda^{-s} f||_{L2}.
double neg_sobolev_norm(const ScalarField& f, double s, MeanPolicy policy = MeanPolicy::Reject);
double neg_sobolev_norm(const VectorField& v, double s, MeanPolicy policy = MeanPolicy::Reject);

/// Physical-space L^p norm by grid quadrature; p = infinity gives the max.
double lp_norm(std::span<const double> samples, const Grid& grid, double p);
double lp_norm(const ScalarField& f, double p);
/// L^p norm of the pointwise Euclidean magnitude of a tensor/vector field.
double lp_norm(std::span<const ScalarField> components, double p);

/// Smallest |k| carrying a coefficient above rel_tol * max|fhat|. Reported
/// next to negative-order norms so truncation effects can be judged.
double lowest_active_wavenumber(const ScalarField& f, double rel_tol = 1e-12);
double lowest_active_wavenumber(const VectorField& v, double rel_tol = 1e-12);

/// Homogeneous Littlewood-Paley family on a grid. The cutoff phi is 1 for
/// r <= 1 and 0 for r >= 2 with the C-infinity ramp
///   phi(r) = 1 - int_{-1}^{2r-3} b / int_{-1}^{1} b,  b(t) = exp(1/(t^2-1)),
/// both integrals evaluated with 30-point Gauss-Legendre. Rings are
/// phi_j(r) = phi(2^-j r) - phi(2^{1-j} r), and j_min..j_max covers every
/// nonzero resolved |k|, so the rings sum to one there.
class LittlewoodPaley {
 public:
  explicit LittlewoodPaley(const Grid& grid);

  static double cutoff(double r);
  static double ring(int j, double r);

  int j_min() const noexcept { return j_min_; }
  int j_max() const noexcept { return j_max_; }
  const Grid& grid() const noexcept { return grid_; }

  /// Delta_j f; throws BlockOutOfRange outside [j_min, j_max].
  ScalarField block(const ScalarField& f, int j) const;
  VectorField block(const VectorField& v, int j) const;

  double block_norm(const ScalarField& f, int j) const;
  double block_norm(const VectorField& v, int j) const;

  /// ||f||_{B^{-s}_{2,inf}} = sup_j 2^{-s j} ||Delta_j f||_{L2}.
  double besov_norm(const ScalarField& f, double s) const;
  double besov_norm(const VectorField& v, double s) const;

 private:
  double ring_weight(int j, std::int32_t shell) const;

  Grid grid_;
  int j_min_ = 0;
  int j_max_ = 0;
  std::int32_t max_shell_ = 0;
  std::vector<double> table_;  // [(j - j_min) * (max_shell + 1) + shell]
};

}  // namespace emlab
