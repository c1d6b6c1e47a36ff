#include "emlab/rng.hpp"

#include <cmath>
#include <numbers>

#include "emlab/error.hpp"

namespace emlab {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

ScalarField random_field(const Grid& grid, Rng& rng, int band,
                         const std::function<double(double)>& amplitude) {
  const int n = grid.points();
  if (band < 1 || 2 * band >= n) {
    throw Error(ErrorCode::InvalidArgument, "random field band must satisfy 1 <= band < N/2");
  }
  auto wrap = [n](int m) { return m < 0 ? m + n : m; };
  ScalarField f(grid);
  for (int mz = 0; mz <= band; ++mz) {
    for (int my = -band; my <= band; ++my) {
      for (int mx = -band; mx <= band; ++mx) {
        const double g1 = rng.normal();
        const double g2 = rng.normal();
        // keep one representative of each conjugate pair
        const bool upper = mz > 0 || my > 0 || (my == 0 && mx > 0);
        if (!upper) continue;
        const double kk = grid.dk() * std::sqrt(double(mx * mx + my * my + mz * mz));
        const Complex c = amplitude(kk) * Complex(g1, g2) / std::sqrt(2.0);
        f[grid.index(wrap(mx), wrap(my), mz)] = c;
        if (mz == 0) f[grid.index(wrap(-mx), wrap(-my), 0)] = std::conj(c);
      }
    }
  }
  return f;
}

VectorField random_vector_field(const Grid& grid, Rng& rng, int band,
                                const std::function<double(double)>& amplitude) {
  ScalarField x = random_field(grid, rng, band, amplitude);
  ScalarField y = random_field(grid, rng, band, amplitude);
  ScalarField z = random_field(grid, rng, band, amplitude);
  return {std::move(x), std::move(y), std::move(z)};
}

double smooth_bump(double r) {
  if (std::abs(r) >= 1.0) return 0.0;
  return std::exp(1.0 / (r * r - 1.0));
}

ScalarField random_bump(const Grid& grid, Rng& rng, double radius, double spread, int count) {
  const int n = grid.points();
  const double h = grid.box_length() / n;
  const double mid = 0.5 * grid.box_length();
  RealArray values(grid.physical_size(), 0.0);
  for (int b = 0; b < count; ++b) {
    const double cx = mid + rng.uniform(-spread, spread);
    const double cy = mid + rng.uniform(-spread, spread);
    const double cz = mid + rng.uniform(-spread, spread);
    const double r0 = rng.uniform(0.5 * radius, radius);
    const double weight = rng.uniform(-1.0, 1.0);
    for (int ix = 0; ix < n; ++ix) {
      const double dx = ix * h - cx;
      for (int iy = 0; iy < n; ++iy) {
        const double dy = iy * h - cy;
        for (int iz = 0; iz < n; ++iz) {
          const double dz = iz * h - cz;
          const double r = std::sqrt(dx * dx + dy * dy + dz * dz) / r0;
          if (r < 1.0) values[(std::size_t(ix) * n + iy) * n + iz] += weight * smooth_bump(r);
        }
      }
    }
  }
  return ScalarField::from_physical(grid, values);
}

}  // namespace emlab
