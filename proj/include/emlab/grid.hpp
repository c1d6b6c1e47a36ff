#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <new>
#include <span>
#include <vector>

namespace emlab {

using Complex = std::complex<double>;

/// Allocator returning 64-byte aligned storage so FFTW's new-array execute
/// interface can be used on any buffer.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), alignment));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using RealArray = std::vector<double, AlignedAllocator<double>>;
using CoeffArray = std::vector<Complex, AlignedAllocator<Complex>>;

/// Periodic cube [0, L)^3 sampled on N^3 points. Spectral data uses the
/// real-to-complex half layout: (ix, iy, iz) with iz in [0, N/2], flattened as
/// (ix * N + iy) * (N/2 + 1) + iz. Fourier coefficients follow the convention
/// f(x) = sum_k fhat(k) exp(i k.x), so that the box L2 norm squared is
/// L^3 * sum_k |fhat(k)|^2.
///
/// A Grid is a cheap handle to immutable shared wavenumber tables and FFT
/// plans; copies compare equal.
class Grid {
 public:
  Grid(int points_per_axis, double box_length);

  int points() const noexcept;
  double box_length() const noexcept;
  double dk() const noexcept;
  double volume() const noexcept;
  double cell_volume() const noexcept;
  int half_points() const noexcept;  // N/2 + 1
  std::size_t spectral_size() const noexcept;
  std::size_t physical_size() const noexcept;

  /// Smallest nonzero |k| (2 pi / L) and largest per-axis |k| (pi N / L).
  double k_min() const noexcept;
  double k_max_axis() const noexcept;

  /// Signed integer mode number along one axis for an index in [0, N).
  int mode_number(int index) const noexcept;

  /// Wavenumbers used by odd-order derivative multipliers (Nyquist zeroed).
  std::span<const double> kx() const noexcept;
  std::span<const double> ky() const noexcept;
  std::span<const double> kz() const noexcept;
  /// True |k|^2, Nyquist included.
  std::span<const double> k2() const noexcept;
  /// Multiplicity of a stored mode in the full spectrum: 1 on the iz = 0 and
  /// iz = N/2 planes, 2 elsewhere.
  std::span<const double> weight() const noexcept;
  /// |m|^2 in integer lattice units; identifies the spherical shell.
  std::span<const std::int32_t> shell() const noexcept;
  /// 1 for modes kept by the 2/3 truncation (|m_i| <= N/3 on every axis).
  std::span<const std::uint8_t> dealias_mask() const noexcept;

  std::size_t index(int ix, int iy, int iz) const noexcept;
  /// Index of the conjugate partner for entries on the iz = 0 or iz = N/2 planes.
  std::size_t conjugate_index(int ix, int iy, int iz) const noexcept;

  void forward(std::span<const double> physical, std::span<Complex> spectral) const;
  void inverse(std::span<const Complex> spectral, std::span<double> physical) const;

  bool operator==(const Grid& other) const noexcept;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace emlab
