#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "emlab/field.hpp"

namespace emlab {

/// mt19937_64 with hand-rolled uniform and normal draws. The standard
/// distributions are implementation-defined, these are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Random real field with fhat(k) = amplitude(|k|) * (g1 + i g2) / sqrt(2) for
/// every lattice mode 0 < max|m_i| <= band, g1, g2 standard normal. Modes are
/// visited in a fixed order independent of the grid size, so the same seed
/// gives the same field on any grid with N > 2 * band.
ScalarField random_field(const Grid& grid, Rng& rng, int band,
                         const std::function<double(double)>& amplitude);

VectorField random_vector_field(const Grid& grid, Rng& rng, int band,
                                const std::function<double(double)>& amplitude);

/// Sum of a few smooth compactly supported bumps b(|x - c| / R) with random
/// signed weights, centres within `spread` of the box centre and radii in
/// [radius / 2, radius]. b(r) = exp(1 / (r^2 - 1)) for r < 1.
ScalarField random_bump(const Grid& grid, Rng& rng, double radius, double spread, int count = 4);

/// exp(1 / (r^2 - 1)) for |r| < 1, else 0.
double smooth_bump(double r);

}  // namespace emlab
