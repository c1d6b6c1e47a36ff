#pragma once

#include <array>
#include <span>

#include "emlab/grid.hpp"

namespace emlab {

/// Real scalar field stored by its half-spectrum Fourier coefficients.
class ScalarField {
 public:
  explicit ScalarField(Grid grid);
  ScalarField(Grid grid, CoeffArray coeffs);

  static ScalarField from_physical(const Grid& grid, std::span<const double> samples);

  const Grid& grid() const noexcept { return grid_; }
  std::span<Complex> coeffs() noexcept { return coeffs_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  Complex& operator[](std::size_t i) noexcept { return coeffs_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return coeffs_[i]; }

  RealArray to_physical() const;

  /// Spatial mean (the k = 0 coefficient, always real for real fields).
  double mean() const noexcept { return coeffs_[0].real(); }

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double factor) noexcept;
  /// this += factor * other
  ScalarField& axpy(double factor, const ScalarField& other);

  void set_zero() noexcept;

 private:
  Grid grid_;
  CoeffArray coeffs_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double factor, ScalarField a);

struct VectorField {
  std::array<ScalarField, 3> c;

  explicit VectorField(const Grid& grid) : c{ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}
  VectorField(ScalarField x, ScalarField y, ScalarField z)
      : c{std::move(x), std::move(y), std::move(z)} {}

  const Grid& grid() const noexcept { return c[0].grid(); }
  ScalarField& operator[](int i) noexcept { return c[static_cast<std::size_t>(i)]; }
  const ScalarField& operator[](int i) const noexcept { return c[static_cast<std::size_t>(i)]; }

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(double factor) noexcept;
  VectorField& axpy(double factor, const VectorField& other);
  void set_zero() noexcept;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double factor, VectorField a);

/// Largest violation of fhat(-k) = conj(fhat(k)) on the self-conjugate planes,
/// relative to the largest coefficient magnitude.
double hermitian_defect(const ScalarField& f);

/// Symmetrizes the iz = 0 and iz = N/2 planes so the field is exactly real.
void enforce_hermitian(ScalarField& f);

/// Zeroes every coefficient on a Nyquist plane of any axis.
void clear_nyquist(ScalarField& f);

}  // namespace emlab
