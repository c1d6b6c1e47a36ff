#include "emlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "emlab/error.hpp"
#include "emlab/rng.hpp"
#include "emlab/spectral.hpp"

namespace emlab {

double PhysicalConstants::nu() const noexcept { return 1.0 / std::sqrt(gamma); }

bool PhysicalConstants::b_infty_zero() const noexcept {
  return B_infty[0] == 0.0 && B_infty[1] == 0.0 && B_infty[2] == 0.0;
}

bool PhysicalConstants::normalized() const noexcept {
  return A == 1.0 && tau == 1.0 && lambda == 1.0 && epsilon == 1.0 && n_infty == 1.0;
}

void PhysicalConstants::validate() const {
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidArgument, "gamma must be >= 1");
  }
  for (double v : {A, tau, lambda, epsilon, n_infty}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "A, tau, lambda, epsilon and n_infty must be positive");
    }
  }
  for (double b : B_infty) {
    if (!std::isfinite(b)) throw Error(ErrorCode::InvalidArgument, "B_infty must be finite");
  }
}

PerturbationState& PerturbationState::axpy(double factor, const PerturbationState& other) {
  n.axpy(factor, other.n);
  u.axpy(factor, other.u);
  E.axpy(factor, other.E);
  B.axpy(factor, other.B);
  return *this;
}

PerturbationState& PerturbationState::operator*=(double factor) noexcept {
  n *= factor;
  u *= factor;
  E *= factor;
  B *= factor;
  return *this;
}

void PerturbationState::set_zero() noexcept {
  n.set_zero();
  u.set_zero();
  E.set_zero();
  B.set_zero();
}

// --- closure ---

double f_of_n(double n, double gamma) {
  if (std::isnan(n)) throw Error(ErrorCode::NonFinite, "density perturbation is nan");
  if (gamma == 1.0) return std::expm1(n);
  const double mu = 0.5 * (gamma - 1.0);
  const double base = 1.0 + mu * n;
  if (!(base > 0.0)) {
    throw Error(ErrorCode::DensityNonpositive, "1 + mu n = " + std::to_string(base) + " <= 0");
  }
  return std::expm1(std::log1p(mu * n) / mu);
}

double f_prime(double n, double gamma) {
  if (std::isnan(n)) throw Error(ErrorCode::NonFinite, "density perturbation is nan");
  if (gamma == 1.0) return std::exp(n);
  const double mu = 0.5 * (gamma - 1.0);
  const double base = 1.0 + mu * n;
  if (!(base > 0.0)) {
    throw Error(ErrorCode::DensityNonpositive, "1 + mu n = " + std::to_string(base) + " <= 0");
  }
  return std::pow(base, 1.0 / mu - 1.0);
}

double f_inverse(double y, double gamma) {
  if (!(1.0 + y > 0.0)) {
    throw Error(ErrorCode::OutOfRange, "f_inverse requires 1 + y > 0, got y = " + std::to_string(y));
  }
  if (gamma == 1.0) return std::log1p(y);
  const double mu = 0.5 * (gamma - 1.0);
  return std::expm1(mu * std::log1p(y)) / mu;
}

RealArray f_of_n(std::span<const double> n, double gamma) {
  RealArray out(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) out[i] = f_of_n(n[i], gamma);
  return out;
}

ScalarField f_of_n(const ScalarField& n, double gamma) {
  const RealArray x = n.to_physical();
  const RealArray y = f_of_n(x, gamma);
  return ScalarField::from_physical(n.grid(), y);
}

// --- change of variables ---

PerturbationState to_perturbation(const Grid& grid, const OriginalFields& fields,
                                  const PhysicalConstants& constants) {
  constants.validate();
  const std::size_t size = grid.physical_size();
  if (fields.density.size() != size) {
    throw Error(ErrorCode::InvalidArgument, "density samples do not match grid");
  }
  const double gamma = constants.gamma;
  const double mu = constants.mu();
  const double root = std::sqrt(gamma);
  RealArray n(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double rho = fields.density[i];
    if (!(rho > 0.0)) throw Error(ErrorCode::DensityNonpositive, "density must be positive");
    const double log_ratio = std::log(rho / constants.n_infty);
    n[i] = gamma == 1.0 ? std::sqrt(constants.A) * log_ratio : std::expm1(mu * log_ratio) / mu;
  }
  PerturbationState state(grid);
  state.n = ScalarField::from_physical(grid, n);
  RealArray tmp(size);
  for (int a = 0; a < 3; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    for (const auto* arr : {&fields.velocity[ua], &fields.electric[ua], &fields.magnetic[ua]}) {
      if (arr->size() != size) throw Error(ErrorCode::InvalidArgument, "field samples do not match grid");
    }
    for (std::size_t i = 0; i < size; ++i) tmp[i] = fields.velocity[ua][i] / root;
    state.u[a] = ScalarField::from_physical(grid, tmp);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = fields.electric[ua][i] / root;
    state.E[a] = ScalarField::from_physical(grid, tmp);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = fields.magnetic[ua][i] / root - constants.B_infty[ua];
    state.B[a] = ScalarField::from_physical(grid, tmp);
  }
  state.time = root * fields.time;
  return state;
}

OriginalFields from_perturbation(const PerturbationState& state, const PhysicalConstants& constants) {
  constants.validate();
  const double gamma = constants.gamma;
  const double mu = constants.mu();
  const double root = std::sqrt(gamma);
  OriginalFields out;
  out.density = state.n.to_physical();
  for (auto& v : out.density) {
    if (gamma == 1.0) {
      v = constants.n_infty * std::exp(v / std::sqrt(constants.A));
    } else {
      if (!(1.0 + mu * v > 0.0)) throw Error(ErrorCode::DensityNonpositive, "1 + mu n <= 0");
      v = constants.n_infty * std::exp(std::log1p(mu * v) / mu);
    }
  }
  for (int a = 0; a < 3; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    out.velocity[ua] = state.u[a].to_physical();
    out.electric[ua] = state.E[a].to_physical();
    out.magnetic[ua] = state.B[a].to_physical();
    for (auto& v : out.velocity[ua]) v *= root;
    for (auto& v : out.electric[ua]) v *= root;
    for (auto& v : out.magnetic[ua]) v = root * (v + constants.B_infty[ua]);
  }
  out.time = state.time / root;
  return out;
}

// --- initial data ---

std::string_view to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::LowFreq: return "low_freq";
    case InitialKind::FlatLow: return "flat_low";
    case InitialKind::Bump: return "bump";
    case InitialKind::SingleMode: return "single_mode";
  }
  return "unknown";
}

double default_rolloff(InitialKind kind) { return kind == InitialKind::FlatLow ? 0.05 : 0.5; }

InitialKind parse_initial_kind(std::string_view name) {
  if (name == "low_freq") return InitialKind::LowFreq;
  if (name == "flat_low") return InitialKind::FlatLow;
  if (name == "bump") return InitialKind::Bump;
  if (name == "single_mode") return InitialKind::SingleMode;
  throw Error(ErrorCode::InvalidArgument, "unknown initial data kind '" + std::string(name) + "'");
}

namespace {

void rescale_to(VectorField& v, double target) {
  const double norm = l2_norm(v);
  if (norm > 0.0) v *= target / norm;
}

void zero_mean(VectorField& v) {
  for (auto& c : v.c) c[0] = Complex{};
}

// Density whose f-image is rho, after checking positivity.
ScalarField density_from_rho(const ScalarField& rho, double gamma) {
  RealArray x = rho.to_physical();
  for (auto& v : x) {
    if (!(1.0 + v > 0.0)) {
      throw Error(ErrorCode::AmplitudeTooLarge, "initial density perturbation violates positivity");
    }
    v = f_inverse(v, gamma);
  }
  return ScalarField::from_physical(rho.grid(), x);
}

std::pair<Vec3, Vec3> transverse_basis(const Vec3& k) {
  const double norm = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
  const Vec3 h{k[0] / norm, k[1] / norm, k[2] / norm};
  // pick the coordinate axis least aligned with h
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (std::abs(h[std::size_t(a)]) < std::abs(h[std::size_t(axis)])) axis = a;
  }
  Vec3 e{0.0, 0.0, 0.0};
  e[std::size_t(axis)] = 1.0;
  const double proj = e[0] * h[0] + e[1] * h[1] + e[2] * h[2];
  Vec3 e1{e[0] - proj * h[0], e[1] - proj * h[1], e[2] - proj * h[2]};
  const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (auto& c : e1) c /= n1;
  const Vec3 e2{h[1] * e1[2] - h[2] * e1[1], h[2] * e1[0] - h[0] * e1[2], h[0] * e1[1] - h[1] * e1[0]};
  return {e1, e2};
}

PerturbationState single_mode_data(const InitialDataSpec& spec, const Grid& grid,
                                   const PhysicalConstants& constants) {
  const double delta = spec.amplitude;
  if (spec.mode == std::array<int, 3>{0, 0, 0}) {
    throw Error(ErrorCode::InvalidArgument, "single_mode requires a nonzero mode");
  }
  for (int m : spec.mode) {
    if (2 * std::abs(m) >= grid.points()) {
      throw Error(ErrorCode::InvalidArgument, "single_mode mode is not resolved on the grid");
    }
  }
  if (delta >= 1.0) throw Error(ErrorCode::AmplitudeTooLarge, "single_mode amplitude must be < 1");
  const Vec3 k{spec.mode[0] * grid.dk(), spec.mode[1] * grid.dk(), spec.mode[2] * grid.dk()};
  const auto [e1, e2] = transverse_basis(k);
  const int n = grid.points();
  const double h = grid.box_length() / n;
  RealArray wave(grid.physical_size());
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz < n; ++iz) {
        wave[(std::size_t(ix) * n + iy) * n + iz] =
            delta * std::cos(h * (k[0] * ix + k[1] * iy + k[2] * iz));
      }
    }
  }
  const ScalarField c = ScalarField::from_physical(grid, wave);
  PerturbationState state(grid);
  state.n = density_from_rho(c, constants.gamma);
  for (int a = 0; a < 3; ++a) {
    state.u[a] = e1[std::size_t(a)] * c;
    state.B[a] = e2[std::size_t(a)] * c;
  }
  return state;
}

}  // namespace

PerturbationState make_initial_data(const InitialDataSpec& spec, const Grid& grid,
                                    const PhysicalConstants& constants) {
  constants.validate();
  if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude)) {
    throw Error(ErrorCode::InvalidArgument, "amplitude must be a finite nonnegative number");
  }
  if (spec.amplitude == 0.0) return PerturbationState(grid);
  if (spec.kind == InitialKind::SingleMode) {
    PerturbationState state = single_mode_data(spec, grid, constants);
    solve_gauss_law(state, constants);
    return state;
  }

  const double delta = spec.amplitude;
  const double K = spec.rolloff > 0.0 ? spec.rolloff : default_rolloff(spec.kind);
  if (!(K > 0.0)) throw Error(ErrorCode::InvalidArgument, "rolloff must be positive");
  Rng rng(spec.seed);
  VectorField u(grid), seed_E(grid), seed_B(grid);

  if (spec.kind == InitialKind::Bump) {
    if (!(spec.bump_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "bump_radius must be positive");
    const double spread = grid.box_length() / 8.0;
    for (VectorField* v : {&u, &seed_E, &seed_B}) {
      for (auto& comp : v->c) comp = random_bump(grid, rng, spec.bump_radius, spread);
      dealias(*v);
    }
  } else {
    std::function<double(double)> profile;
    double reach = 0.0;
    const double tail = K * std::sqrt(std::log(1e8));
    if (spec.kind == InitialKind::FlatLow) {
      profile = [K](double r) { return r <= 1.0 ? 1.0 : std::exp(-(r - 1.0) * (r - 1.0) / (K * K)); };
      reach = 1.0 + tail;
    } else {
      if (!(spec.s > 0.0 && spec.s <= 1.5)) {
        throw Error(ErrorCode::SOutOfRange, "low_freq requires s in (0, 3/2]");
      }
      const double s = spec.s;
      profile = [K, s](double r) { return std::pow(std::min(1.0, r), s - 1.5) * std::exp(-r * r / (K * K)); };
      reach = tail;
    }
    const int band = std::max(1, std::min(grid.points() / 3,
                                          static_cast<int>(std::ceil(reach / grid.dk()))));
    u = random_vector_field(grid, rng, band, profile);
    seed_E = random_vector_field(grid, rng, band, profile);
    seed_B = random_vector_field(grid, rng, band, profile);
    dealias(u);
    dealias(seed_E);
    dealias(seed_B);
  }

  zero_mean(u);
  zero_mean(seed_E);
  zero_mean(seed_B);
  seed_B = transverse_part(seed_B);
  rescale_to(u, delta);
  rescale_to(seed_E, delta);
  rescale_to(seed_B, delta);

  const double nu = constants.nu();
  PerturbationState state(grid);
  state.u = std::move(u);
  state.B = std::move(seed_B);
  VectorField longitudinal = longitudinal_part(seed_E);
  ScalarField rho = div(longitudinal);
  rho *= -1.0 / nu;
  rho[0] = Complex{};
  state.n = density_from_rho(rho, constants.gamma);
  state.E = transverse_part(seed_E);
  state.E *= spec.transverse_E;
  solve_gauss_law(state, constants);
  return state;
}

void solve_gauss_law(PerturbationState& state, const PhysicalConstants& constants) {
  const Grid& g = state.grid();
  const ScalarField fn = f_of_n(state.n, constants.gamma);
  const double nu = constants.nu();
  VectorField E = transverse_part(state.E);
  const auto kx = g.kx(), ky = g.ky(), kz = g.kz();
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const double kk = kx[i] * kx[i] + ky[i] * ky[i] + kz[i] * kz[i];
    if (kk == 0.0) continue;
    const Complex c = Complex(0.0, nu) * fn[i] / kk;
    E[0][i] += kx[i] * c;
    E[1][i] += ky[i] * c;
    E[2][i] += kz[i] * c;
  }
  // keep the mean of E: it is not fixed by the constraint
  for (int a = 0; a < 3; ++a) E[a][0] = state.E[a][0];
  state.E = std::move(E);
}

CompatibilityReport verify_compatibility(const PerturbationState& state,
                                         const PhysicalConstants& constants) {
  CompatibilityReport report;
  const RealArray n = state.n.to_physical();
  const double mu = constants.mu();
  double margin = std::numeric_limits<double>::infinity();
  for (double v : n) margin = std::min(margin, 1.0 + mu * v);
  report.positivity_margin = n.empty() ? 1.0 : margin;
  report.divB_residual = l2_norm(div(state.B));
  if (constants.gamma > 1.0 && !(margin > 0.0)) {
    report.gauss_residual = std::numeric_limits<double>::infinity();
    return report;
  }
  ScalarField gauss = div(state.E);
  gauss.axpy(constants.nu(), f_of_n(state.n, constants.gamma));
  report.gauss_residual = l2_norm(gauss);
  return report;
}

}  // namespace emlab
