#include "emlab/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "emlab/error.hpp"

namespace emlab {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Grid::Impl {
  int n = 0;
  int nzh = 0;
  double length = 0.0;
  double dk = 0.0;
  std::vector<double> kx, ky, kz, k2, weight;
  std::vector<std::int32_t> shell;
  std::vector<std::uint8_t> dealias;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

Grid::Grid(int points_per_axis, double box_length) {
  if (points_per_axis < 4 || points_per_axis % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "points_per_axis must be even and >= 4, got " + std::to_string(points_per_axis));
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw Error(ErrorCode::InvalidArgument, "box_length must be positive");
  }
  auto impl = std::make_shared<Impl>();
  const int n = points_per_axis;
  impl->n = n;
  impl->nzh = n / 2 + 1;
  impl->length = box_length;
  impl->dk = 2.0 * std::numbers::pi / box_length;

  const std::size_t size = static_cast<std::size_t>(n) * n * impl->nzh;
  impl->kx.resize(size);
  impl->ky.resize(size);
  impl->kz.resize(size);
  impl->k2.resize(size);
  impl->weight.resize(size);
  impl->shell.resize(size);
  impl->dealias.resize(size);

  auto mode = [n](int i) { return i <= n / 2 ? i : i - n; };
  const int keep = n / 3;
  std::size_t s = 0;
  for (int ix = 0; ix < n; ++ix) {
    const int mx = mode(ix);
    for (int iy = 0; iy < n; ++iy) {
      const int my = mode(iy);
      for (int iz = 0; iz < impl->nzh; ++iz, ++s) {
        const int mz = iz;
        impl->kx[s] = (ix == n / 2) ? 0.0 : impl->dk * mx;
        impl->ky[s] = (iy == n / 2) ? 0.0 : impl->dk * my;
        impl->kz[s] = (iz == n / 2) ? 0.0 : impl->dk * mz;
        impl->shell[s] = mx * mx + my * my + mz * mz;
        impl->k2[s] = impl->dk * impl->dk * impl->shell[s];
        impl->weight[s] = (iz == 0 || iz == n / 2) ? 1.0 : 2.0;
        impl->dealias[s] =
            (std::abs(mx) <= keep && std::abs(my) <= keep && mz <= keep) ? 1 : 0;
      }
    }
  }

  {
    std::lock_guard lock(planner_mutex());
    RealArray real(static_cast<std::size_t>(n) * n * n);
    CoeffArray spec(size);
    auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
    impl->r2c = fftw_plan_dft_r2c_3d(n, n, n, real.data(), cplx, FFTW_ESTIMATE);
    impl->c2r = fftw_plan_dft_c2r_3d(n, n, n, cplx, real.data(), FFTW_ESTIMATE);
  }
  if (!impl->r2c || !impl->c2r) throw Error(ErrorCode::InvalidArgument, "FFTW planning failed");
  impl_ = std::move(impl);
}

int Grid::points() const noexcept { return impl_->n; }
double Grid::box_length() const noexcept { return impl_->length; }
double Grid::dk() const noexcept { return impl_->dk; }
double Grid::volume() const noexcept { return std::pow(impl_->length, 3); }
double Grid::cell_volume() const noexcept { return std::pow(impl_->length / impl_->n, 3); }
int Grid::half_points() const noexcept { return impl_->nzh; }
std::size_t Grid::spectral_size() const noexcept { return impl_->k2.size(); }
std::size_t Grid::physical_size() const noexcept {
  return static_cast<std::size_t>(impl_->n) * impl_->n * impl_->n;
}
double Grid::k_min() const noexcept { return impl_->dk; }
double Grid::k_max_axis() const noexcept {
  return std::numbers::pi * impl_->n / impl_->length;
}
int Grid::mode_number(int index) const noexcept {
  return index <= impl_->n / 2 ? index : index - impl_->n;
}

std::span<const double> Grid::kx() const noexcept { return impl_->kx; }
std::span<const double> Grid::ky() const noexcept { return impl_->ky; }
std::span<const double> Grid::kz() const noexcept { return impl_->kz; }
std::span<const double> Grid::k2() const noexcept { return impl_->k2; }
std::span<const double> Grid::weight() const noexcept { return impl_->weight; }
std::span<const std::int32_t> Grid::shell() const noexcept { return impl_->shell; }
std::span<const std::uint8_t> Grid::dealias_mask() const noexcept { return impl_->dealias; }

std::size_t Grid::index(int ix, int iy, int iz) const noexcept {
  return (static_cast<std::size_t>(ix) * impl_->n + iy) * impl_->nzh + iz;
}

std::size_t Grid::conjugate_index(int ix, int iy, int iz) const noexcept {
  const int n = impl_->n;
  return index((n - ix) % n, (n - iy) % n, iz);
}

namespace {

bool aligned(const void* p) { return reinterpret_cast<std::uintptr_t>(p) % 64 == 0; }

}  // namespace

void Grid::forward(std::span<const double> physical, std::span<Complex> spectral) const {
  if (physical.size() != physical_size() || spectral.size() != spectral_size()) {
    throw Error(ErrorCode::InvalidArgument, "forward transform size mismatch");
  }
  RealArray in_copy;
  const double* in = physical.data();
  if (!aligned(in)) {
    in_copy.assign(physical.begin(), physical.end());
    in = in_copy.data();
  }
  CoeffArray out_copy;
  Complex* out = spectral.data();
  if (!aligned(out)) {
    out_copy.resize(spectral.size());
    out = out_copy.data();
  }
  // r2c does not modify its input.
  fftw_execute_dft_r2c(impl_->r2c, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
  const double scale = 1.0 / static_cast<double>(physical_size());
  for (std::size_t i = 0; i < spectral.size(); ++i) spectral[i] = out[i] * scale;
}

void Grid::inverse(std::span<const Complex> spectral, std::span<double> physical) const {
  if (physical.size() != physical_size() || spectral.size() != spectral_size()) {
    throw Error(ErrorCode::InvalidArgument, "inverse transform size mismatch");
  }
  CoeffArray work(spectral.begin(), spectral.end());
  if (aligned(physical.data())) {
    fftw_execute_dft_c2r(impl_->c2r, reinterpret_cast<fftw_complex*>(work.data()),
                         physical.data());
    return;
  }
  RealArray out(physical.size());
  fftw_execute_dft_c2r(impl_->c2r, reinterpret_cast<fftw_complex*>(work.data()), out.data());
  std::copy(out.begin(), out.end(), physical.begin());
}

bool Grid::operator==(const Grid& other) const noexcept {
  return impl_ == other.impl_ ||
         (impl_->n == other.impl_->n && impl_->length == other.impl_->length);
}

}  // namespace emlab
