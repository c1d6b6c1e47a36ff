#include "emlab/spectral.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "emlab/error.hpp"

namespace emlab {

namespace {

constexpr Complex kI{0.0, 1.0};

std::span<const double> axis_k(const Grid& g, int axis) {
  switch (axis) {
    case 0: return g.kx();
    case 1: return g.ky();
    case 2: return g.kz();
    default: throw Error(ErrorCode::InvalidArgument, "axis must be 0, 1 or 2");
  }
}

// sum_k w |k|^{2 l} |fhat|^2, zero mode included only for l == 0.
double weighted_power(const ScalarField& f, double two_l) {
  const Grid& g = f.grid();
  const auto k2 = g.k2();
  const auto w = g.weight();
  const auto c = f.coeffs();
  double sum = 0.0;
  if (two_l == 0.0) {
    for (std::size_t i = 0; i < c.size(); ++i) sum += w[i] * std::norm(c[i]);
  } else {
    for (std::size_t i = 1; i < c.size(); ++i) {
      sum += w[i] * std::pow(k2[i], 0.5 * two_l) * std::norm(c[i]);
    }
  }
  return sum;
}

void check_mean(const ScalarField& f, double s, MeanPolicy policy) {
  if (s >= 0.0 || policy == MeanPolicy::Exclude) return;
  const double rms = std::sqrt(weighted_power(f, 0.0));
  if (std::abs(f[0]) > 1e-12 * rms) {
    throw Error(ErrorCode::NegativePowerOnNonzeroMean,
                "negative-order multiplier applied to a field with mean " +
                    std::to_string(std::abs(f[0])));
  }
}

double bump(double t) { return std::abs(t) < 1.0 ? std::exp(1.0 / (t * t - 1.0)) : 0.0; }

double bump_integral(double a, double b) {
  // the bump is flat to all orders at +-1, which tanh-sinh handles and fixed Gauss rules do not
  static boost::math::quadrature::tanh_sinh<double> rule;
  if (b <= a) return 0.0;
  return rule.integrate([](double t) { return bump(t); }, a, b, 1e-15);
}

}  // namespace

ScalarField partial(const ScalarField& f, int axis) {
  const auto k = axis_k(f.grid(), axis);
  ScalarField out(f.grid());
  for (std::size_t i = 0; i < k.size(); ++i) out[i] = kI * k[i] * f[i];
  return out;
}

VectorField grad(const ScalarField& f) { return {partial(f, 0), partial(f, 1), partial(f, 2)}; }

ScalarField div(const VectorField& v) {
  const Grid& g = v.grid();
  const auto kx = g.kx(), ky = g.ky(), kz = g.kz();
  ScalarField out(g);
  for (std::size_t i = 0; i < out.coeffs().size(); ++i) {
    out[i] = kI * (kx[i] * v[0][i] + ky[i] * v[1][i] + kz[i] * v[2][i]);
  }
  return out;
}

VectorField curl(const VectorField& v) {
  const Grid& g = v.grid();
  const auto kx = g.kx(), ky = g.ky(), kz = g.kz();
  VectorField out(g);
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    out[0][i] = kI * (ky[i] * v[2][i] - kz[i] * v[1][i]);
    out[1][i] = kI * (kz[i] * v[0][i] - kx[i] * v[2][i]);
    out[2][i] = kI * (kx[i] * v[1][i] - ky[i] * v[0][i]);
  }
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const auto k2 = f.grid().k2();
  ScalarField out(f.grid());
  for (std::size_t i = 0; i < k2.size(); ++i) out[i] = -k2[i] * f[i];
  return out;
}

std::vector<ScalarField> derivative_tensor(const ScalarField& f, int order) {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
  std::vector<ScalarField> current{f};
  for (int level = 0; level < order; ++level) {
    std::vector<ScalarField> next;
    next.reserve(current.size() * 3);
    for (const auto& comp : current) {
      for (int axis = 0; axis < 3; ++axis) next.push_back(partial(comp, axis));
    }
    current = std::move(next);
  }
  return current;
}

ScalarField fractional(const ScalarField& f, double s, MeanPolicy policy) {
  check_mean(f, s, policy);
  if (s == 0.0) return f;
  const auto k2 = f.grid().k2();
  ScalarField out(f.grid());
  for (std::size_t i = 1; i < k2.size(); ++i) out[i] = std::pow(k2[i], 0.5 * s) * f[i];
  return out;
}

VectorField fractional(const VectorField& v, double s, MeanPolicy policy) {
  return {fractional(v[0], s, policy), fractional(v[1], s, policy), fractional(v[2], s, policy)};
}

VectorField longitudinal_part(const VectorField& v) {
  const Grid& g = v.grid();
  const auto kx = g.kx(), ky = g.ky(), kz = g.kz();
  VectorField out(g);
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const double kk = kx[i] * kx[i] + ky[i] * ky[i] + kz[i] * kz[i];
    if (kk == 0.0) continue;
    const Complex proj = (kx[i] * v[0][i] + ky[i] * v[1][i] + kz[i] * v[2][i]) / kk;
    out[0][i] = kx[i] * proj;
    out[1][i] = ky[i] * proj;
    out[2][i] = kz[i] * proj;
  }
  return out;
}

VectorField transverse_part(const VectorField& v) { return v - longitudinal_part(v); }

void dealias(ScalarField& f) {
  const auto mask = f.grid().dealias_mask();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) f[i] = Complex{};
  }
}

void dealias(VectorField& v) {
  for (auto& comp : v.c) dealias(comp);
}

double inner_product(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::InvalidArgument, "grid mismatch");
  const auto w = a.grid().weight();
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * (std::conj(a[i]) * b[i]).real();
  return a.grid().volume() * sum;
}

double inner_product(const VectorField& a, const VectorField& b) {
  return inner_product(a[0], b[0]) + inner_product(a[1], b[1]) + inner_product(a[2], b[2]);
}

double l2_norm(const ScalarField& f) { return homog_norm(f, 0.0); }
double l2_norm(const VectorField& v) { return homog_norm(v, 0.0); }

double homog_norm(const ScalarField& f, double l) {
  if (l < 0.0) throw Error(ErrorCode::InvalidArgument, "homog_norm order must be >= 0");
  return std::sqrt(f.grid().volume() * weighted_power(f, 2.0 * l));
}

double homog_norm(const VectorField& v, double l) {
  if (l < 0.0) throw Error(ErrorCode::InvalidArgument, "homog_norm order must be >= 0");
  double sum = 0.0;
  for (const auto& comp : v.c) sum += weighted_power(comp, 2.0 * l);
  return std::sqrt(v.grid().volume() * sum);
}

double sobolev_norm(const ScalarField& f, int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "Sobolev order must be >= 0");
  double sum = 0.0;
  for (int l = 0; l <= k; ++l) sum += std::pow(homog_norm(f, l), 2);
  return std::sqrt(sum);
}

double sobolev_norm(const VectorField& v, int k) {
  double sum = 0.0;
  for (const auto& comp : v.c) sum += std::pow(sobolev_norm(comp, k), 2);
  return std::sqrt(sum);
}

double neg_sobolev_norm(const ScalarField& f, double s, MeanPolicy policy) {
  if (s < 0.0) throw Error(ErrorCode::InvalidArgument, "neg_sobolev_norm expects s >= 0");
  check_mean(f, -s, policy);
  if (s == 0.0) return l2_norm(f);
  return std::sqrt(f.grid().volume() * weighted_power(f, -2.0 * s));
}

double neg_sobolev_norm(const VectorField& v, double s, MeanPolicy policy) {
  double sum = 0.0;
  for (const auto& comp : v.c) sum += std::pow(neg_sobolev_norm(comp, s, policy), 2);
  return std::sqrt(sum);
}

double lp_norm(std::span<const double> samples, const Grid& grid, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "L^p norm requires p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : samples) m = std::max(m, std::abs(x));
    return m;
  }
  double sum = 0.0;
  for (double x : samples) sum += std::pow(std::abs(x), p);
  return std::pow(sum * grid.cell_volume(), 1.0 / p);
}

double lp_norm(const ScalarField& f, double p) {
  const RealArray x = f.to_physical();
  return lp_norm(x, f.grid(), p);
}

double lp_norm(std::span<const ScalarField> components, double p) {
  if (components.empty()) return 0.0;
  const Grid& g = components.front().grid();
  RealArray magnitude(g.physical_size(), 0.0);
  for (const auto& comp : components) {
    const RealArray x = comp.to_physical();
    for (std::size_t i = 0; i < x.size(); ++i) magnitude[i] += x[i] * x[i];
  }
  for (auto& m : magnitude) m = std::sqrt(m);
  return lp_norm(magnitude, g, p);
}

double lowest_active_wavenumber(const ScalarField& f, double rel_tol) {
  const auto k2 = f.grid().k2();
  double peak = 0.0;
  for (std::size_t i = 1; i < k2.size(); ++i) peak = std::max(peak, std::abs(f[i]));
  if (peak == 0.0) return std::numeric_limits<double>::infinity();
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < k2.size(); ++i) {
    if (std::abs(f[i]) > rel_tol * peak) lowest = std::min(lowest, k2[i]);
  }
  return std::sqrt(lowest);
}

double lowest_active_wavenumber(const VectorField& v, double rel_tol) {
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& comp : v.c) lowest = std::min(lowest, lowest_active_wavenumber(comp, rel_tol));
  return lowest;
}

// --- Littlewood-Paley ---

double LittlewoodPaley::cutoff(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  static const double total = bump_integral(-1.0, 1.0);
  const double t = 2.0 * r - 3.0;
  return 1.0 - bump_integral(-1.0, t) / total;
}

double LittlewoodPaley::ring(int j, double r) {
  return cutoff(std::ldexp(r, -j)) - cutoff(std::ldexp(r, 1 - j));
}

LittlewoodPaley::LittlewoodPaley(const Grid& grid) : grid_(grid) {
  const double kmin = grid.k_min();
  const double kmax = std::sqrt(3.0) * grid.k_max_axis();
  j_min_ = static_cast<int>(std::floor(std::log2(kmin)));
  j_max_ = static_cast<int>(std::ceil(std::log2(kmax)));
  const int h = grid.points() / 2;
  max_shell_ = 3 * h * h;
  const std::size_t width = static_cast<std::size_t>(max_shell_) + 1;
  table_.assign(static_cast<std::size_t>(j_max_ - j_min_ + 1) * width, 0.0);
  for (int j = j_min_; j <= j_max_; ++j) {
    for (std::int32_t s = 1; s <= max_shell_; ++s) {
      const double r = grid.dk() * std::sqrt(static_cast<double>(s));
      table_[static_cast<std::size_t>(j - j_min_) * width + static_cast<std::size_t>(s)] = ring(j, r);
    }
  }
}

double LittlewoodPaley::ring_weight(int j, std::int32_t shell) const {
  const std::size_t width = static_cast<std::size_t>(max_shell_) + 1;
  return table_[static_cast<std::size_t>(j - j_min_) * width + static_cast<std::size_t>(shell)];
}

ScalarField LittlewoodPaley::block(const ScalarField& f, int j) const {
  if (j < j_min_ || j > j_max_) {
    throw Error(ErrorCode::BlockOutOfRange, "block " + std::to_string(j) + " outside [" +
                                                std::to_string(j_min_) + ", " +
                                                std::to_string(j_max_) + "]");
  }
  if (!(f.grid() == grid_)) throw Error(ErrorCode::InvalidArgument, "grid mismatch");
  const auto shell = grid_.shell();
  ScalarField out(grid_);
  for (std::size_t i = 1; i < shell.size(); ++i) out[i] = ring_weight(j, shell[i]) * f[i];
  return out;
}

VectorField LittlewoodPaley::block(const VectorField& v, int j) const {
  return {block(v[0], j), block(v[1], j), block(v[2], j)};
}

double LittlewoodPaley::block_norm(const ScalarField& f, int j) const {
  return l2_norm(block(f, j));
}

double LittlewoodPaley::block_norm(const VectorField& v, int j) const {
  return l2_norm(block(v, j));
}

double LittlewoodPaley::besov_norm(const ScalarField& f, double s) const {
  double best = 0.0;
  for (int j = j_min_; j <= j_max_; ++j) best = std::max(best, std::pow(2.0, -s * j) * block_norm(f, j));
  return best;
}

double LittlewoodPaley::besov_norm(const VectorField& v, double s) const {
  double best = 0.0;
  for (int j = j_min_; j <= j_max_; ++j) best = std::max(best, std::pow(2.0, -s * j) * block_norm(v, j));
  return best;
}

}  // namespace emlab
