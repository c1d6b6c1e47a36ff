#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "emlab/error.hpp"
#include "emlab/rng.hpp"
#include "emlab/spectral.hpp"

using namespace emlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Samples fn(x, y, z) on the grid.
template <class Fn>
ScalarField sample(const Grid& g, Fn fn) {
  const int n = g.points();
  const double h = g.box_length() / n;
  RealArray x(g.physical_size());
  std::size_t i = 0;
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) x[i++] = fn(ix * h, iy * h, iz * h);
  return ScalarField::from_physical(g, x);
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  const RealArray x = a.to_physical();
  const RealArray y = b.to_physical();
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

ScalarField random_scalar(const Grid& g, std::uint64_t seed, int band = 4) {
  Rng rng(seed);
  return random_field(g, rng, band, [](double k) { return 1.0 / (1.0 + k * k); });
}

}  // namespace

TEST(Grid, RoundTripIsIdentity) {
  Grid g(16, 3.0);
  const ScalarField f = random_scalar(g, 3);
  const ScalarField back = ScalarField::from_physical(g, f.to_physical());
  for (std::size_t i = 0; i < g.spectral_size(); ++i) EXPECT_NEAR(std::abs(back[i] - f[i]), 0.0, 1e-15);
}

TEST(Grid, ParsevalMatchesPhysicalQuadrature) {
  Grid g(16, 5.0);
  const ScalarField f = random_scalar(g, 5);
  const RealArray x = f.to_physical();
  double sum = 0.0;
  for (double v : x) sum += v * v;
  EXPECT_NEAR(l2_norm(f), std::sqrt(sum * g.cell_volume()), 1e-12 * l2_norm(f));
}

TEST(Grid, CopiesShareTablesAndCompareEqual) {
  Grid a(8, 1.0);
  Grid b = a;
  EXPECT_TRUE(a == b);
  EXPECT_DOUBLE_EQ(a.k_min(), 2.0 * kPi);
  EXPECT_DOUBLE_EQ(a.k_max_axis(), kPi * 8.0);
}

TEST(Field, RandomFieldIsRealAndSeedStable) {
  Grid g16(16, 2.0 * kPi);
  Grid g32(32, 2.0 * kPi);
  const ScalarField a = random_scalar(g16, 11, 3);
  const ScalarField b = random_scalar(g32, 11, 3);
  EXPECT_LT(hermitian_defect(a), 1e-15);
  // the same seed gives the same function on a finer grid
  EXPECT_NEAR(l2_norm(a), l2_norm(b), 1e-13);
  EXPECT_NEAR(std::abs(a.mean()), 0.0, 1e-300);
}

TEST(Spectral, DerivativesOfTrigonometricField) {
  Grid g(16, 2.0 * kPi);
  const ScalarField f = sample(g, [](double x, double y, double z) { return std::sin(2 * x) * std::cos(y + z); });
  const ScalarField fx = sample(g, [](double x, double y, double z) { return 2 * std::cos(2 * x) * std::cos(y + z); });
  const ScalarField fz = sample(g, [](double x, double y, double z) { return -std::sin(2 * x) * std::sin(y + z); });
  EXPECT_LT(max_abs_diff(partial(f, 0), fx), 1e-13);
  EXPECT_LT(max_abs_diff(partial(f, 2), fz), 1e-13);
  const ScalarField lap = laplacian(f);
  EXPECT_LT(max_abs_diff(lap, -6.0 * f), 1e-12);
}

TEST(Spectral, VectorIdentities) {
  Grid g(16, 4.0);
  Rng rng(7);
  const VectorField v = random_vector_field(g, rng, 5, [](double) { return 1.0; });
  const ScalarField f = random_scalar(g, 8, 5);
  EXPECT_LT(l2_norm(div(curl(v))), 1e-12 * l2_norm(v));
  EXPECT_LT(l2_norm(curl(grad(f))), 1e-12 * l2_norm(grad(f)));
  const VectorField t = transverse_part(v);
  const VectorField l = longitudinal_part(v);
  EXPECT_LT(l2_norm(div(t)), 1e-12 * l2_norm(div(v)));
  EXPECT_LT(l2_norm(curl(l)), 1e-12 * l2_norm(curl(v)));
  EXPECT_LT(l2_norm(t + l - v), 1e-14 * l2_norm(v));
}

TEST(Spectral, NyquistModeHasNoOddDerivative) {
  Grid g(8, 2.0 * kPi);
  const ScalarField f = sample(g, [](double x, double, double) { return std::cos(4 * x); });
  EXPECT_LT(l2_norm(partial(f, 0)), 1e-14);
}

TEST(Spectral, FractionalPowersCompose) {
  Grid g(16, 3.0);
  const ScalarField f = random_scalar(g, 21);
  const ScalarField back = fractional(fractional(f, 0.7), -0.7);
  EXPECT_LT(l2_norm(back - f), 1e-13 * l2_norm(f));
  EXPECT_NEAR(homog_norm(f, 2.0), l2_norm(laplacian(f)), 1e-12 * l2_norm(laplacian(f)));
}

TEST(Spectral, NegativePowerOnMeanIsRejectedOrExcluded) {
  Grid g(8, 1.0);
  ScalarField f = random_scalar(g, 2, 2);
  f[0] = 0.5;
  try {
    (void)neg_sobolev_norm(f, 1.0);
    FAIL() << "expected NegativePowerOnNonzeroMean";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NegativePowerOnNonzeroMean);
  }
  ScalarField g0 = f;
  g0[0] = 0.0;
  EXPECT_DOUBLE_EQ(neg_sobolev_norm(f, 1.0, MeanPolicy::Exclude), neg_sobolev_norm(g0, 1.0));
}

TEST(Spectral, SingleModeNorms) {
  Grid g(16, 2.0 * kPi);
  const ScalarField f = sample(g, [](double x, double y, double) { return std::cos(3 * x + 4 * y); });
  const double l2 = std::sqrt(0.5 * g.volume());
  EXPECT_NEAR(l2_norm(f), l2, 1e-12);
  EXPECT_NEAR(homog_norm(f, 1.5), std::pow(5.0, 1.5) * l2, 1e-10);
  EXPECT_NEAR(neg_sobolev_norm(f, 0.5), l2 / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(sobolev_norm(f, 2), l2 * std::sqrt(1 + 25 + 625), 1e-9);
  double tensor = 0.0;
  for (const auto& c : derivative_tensor(f, 2)) tensor += std::pow(l2_norm(c), 2);
  EXPECT_NEAR(std::sqrt(tensor), homog_norm(f, 2.0), 1e-10);
  EXPECT_NEAR(lp_norm(f, std::numeric_limits<double>::infinity()), 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(lowest_active_wavenumber(f), 5.0);
}

TEST(Spectral, LpNormOfConstant) {
  Grid g(8, 2.0);
  ScalarField c(g);
  c[0] = 3.0;
  EXPECT_NEAR(lp_norm(c, 1.0), 3.0 * 8.0, 1e-12);
  EXPECT_NEAR(lp_norm(c, 4.0), 3.0 * std::pow(8.0, 0.25), 1e-12);
}

TEST(LittlewoodPaley, CutoffShape) {
  EXPECT_DOUBLE_EQ(LittlewoodPaley::cutoff(0.3), 1.0);
  EXPECT_DOUBLE_EQ(LittlewoodPaley::cutoff(1.0), 1.0);
  EXPECT_NEAR(LittlewoodPaley::cutoff(1.5), 0.5, 1e-14);  // the bump is even
  EXPECT_NEAR(LittlewoodPaley::cutoff(2.0), 0.0, 1e-15);
  double prev = 1.0;
  for (double r = 1.0; r <= 2.0; r += 0.01) {
    const double v = LittlewoodPaley::cutoff(r);
    EXPECT_LE(v, prev + 1e-15);
    prev = v;
  }
}

TEST(LittlewoodPaley, BlocksSumToMeanFreePart) {
  Grid g(16, 7.0);
  const LittlewoodPaley lp(g);
  ScalarField f = random_scalar(g, 31, 7);
  f[0] = 2.0;
  ScalarField sum(g);
  double sq = 0.0;
  for (int j = lp.j_min(); j <= lp.j_max(); ++j) {
    sum += lp.block(f, j);
    sq += std::pow(lp.block_norm(f, j), 2);
  }
  ScalarField ref = f;
  ref[0] = 0.0;
  EXPECT_LT(l2_norm(sum - ref), 1e-13 * l2_norm(ref));
  // almost orthogonality: block energies bracket the total within a factor 2
  EXPECT_LE(sq, std::pow(l2_norm(ref), 2) * (1 + 1e-12));
  EXPECT_GE(sq, 0.5 * std::pow(l2_norm(ref), 2));
}

TEST(LittlewoodPaley, BesovNormOfDyadicMode) {
  Grid g(16, 2.0 * kPi);
  const LittlewoodPaley lp(g);
  // |k| = 4 = 2^2 sits where a single ring equals one
  const ScalarField f = sample(g, [](double x, double, double) { return std::cos(4 * x); });
  EXPECT_NEAR(lp.besov_norm(f, 0.5), std::pow(2.0, -1.0) * l2_norm(f), 1e-13);
  try {
    (void)lp.block(f, lp.j_max() + 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BlockOutOfRange);
  }
}
