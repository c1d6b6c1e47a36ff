#include "emlab/field.hpp"

#include <algorithm>
#include <cmath>

#include "emlab/error.hpp"

namespace emlab {

namespace {

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw Error(ErrorCode::InvalidArgument, "fields live on different grids");
}

}  // namespace

ScalarField::ScalarField(Grid grid) : grid_(std::move(grid)), coeffs_(grid_.spectral_size()) {}

ScalarField::ScalarField(Grid grid, CoeffArray coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.spectral_size()) {
    throw Error(ErrorCode::InvalidArgument, "coefficient array does not match grid");
  }
}

ScalarField ScalarField::from_physical(const Grid& grid, std::span<const double> samples) {
  ScalarField f(grid);
  grid.forward(samples, f.coeffs_);
  return f;
}

RealArray ScalarField::to_physical() const {
  RealArray out(grid_.physical_size());
  grid_.inverse(coeffs_, out);
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double factor) noexcept {
  for (auto& c : coeffs_) c *= factor;
  return *this;
}

ScalarField& ScalarField::axpy(double factor, const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += factor * other.coeffs_[i];
  return *this;
}

void ScalarField::set_zero() noexcept { std::fill(coeffs_.begin(), coeffs_.end(), Complex{}); }

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double factor, ScalarField a) { return a *= factor; }

VectorField& VectorField::operator+=(const VectorField& other) {
  for (int i = 0; i < 3; ++i) (*this)[i] += other[i];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
  for (int i = 0; i < 3; ++i) (*this)[i] -= other[i];
  return *this;
}

VectorField& VectorField::operator*=(double factor) noexcept {
  for (auto& comp : c) comp *= factor;
  return *this;
}

VectorField& VectorField::axpy(double factor, const VectorField& other) {
  for (int i = 0; i < 3; ++i) (*this)[i].axpy(factor, other[i]);
  return *this;
}

void VectorField::set_zero() noexcept {
  for (auto& comp : c) comp.set_zero();
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double factor, VectorField a) { return a *= factor; }

double hermitian_defect(const ScalarField& f) {
  const Grid& g = f.grid();
  const int n = g.points();
  double scale = 0.0;
  for (const auto& c : f.coeffs()) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (int iz : {0, n / 2}) {
    for (int ix = 0; ix < n; ++ix) {
      for (int iy = 0; iy < n; ++iy) {
        const Complex a = f[g.index(ix, iy, iz)];
        const Complex b = f[g.conjugate_index(ix, iy, iz)];
        worst = std::max(worst, std::abs(a - std::conj(b)));
      }
    }
  }
  return worst / scale;
}

void enforce_hermitian(ScalarField& f) {
  const Grid& g = f.grid();
  const int n = g.points();
  for (int iz : {0, n / 2}) {
    for (int ix = 0; ix < n; ++ix) {
      for (int iy = 0; iy < n; ++iy) {
        const std::size_t i = g.index(ix, iy, iz);
        const std::size_t j = g.conjugate_index(ix, iy, iz);
        if (j < i) continue;
        if (i == j) {
          f[i] = Complex(f[i].real(), 0.0);
        } else {
          const Complex avg = 0.5 * (f[i] + std::conj(f[j]));
          f[i] = avg;
          f[j] = std::conj(avg);
        }
      }
    }
  }
}

void clear_nyquist(ScalarField& f) {
  const Grid& g = f.grid();
  const int n = g.points();
  const int h = n / 2;
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz <= h; ++iz) {
        if (ix == h || iy == h || iz == h) f[g.index(ix, iy, iz)] = Complex{};
      }
    }
  }
}

}  // namespace emlab
