#include "emlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "emlab/spectral.hpp"

namespace emlab {

void SolverConfig::validate() const {
  if (!std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "dt must be finite");
  if (!(cfl > 0.0)) throw Error(ErrorCode::InvalidArgument, "cfl must be positive");
  if (!(end_time >= 0.0)) throw Error(ErrorCode::InvalidArgument, "end_time must be >= 0");
  if (gauss_projection_every < 0) {
    throw Error(ErrorCode::InvalidArgument, "gauss_projection_every must be >= 0 (0 = off)");
  }
  if (output_stride < 1) throw Error(ErrorCode::InvalidArgument, "output_stride must be >= 1");
  if (!(gauss_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "gauss_tol must be positive");
}

namespace {

void require_normalized(const PhysicalConstants& constants) {
  constants.validate();
  if (!constants.normalized()) {
    throw Error(ErrorCode::NonNormalizedConstants,
                "the reformulated system assumes A = tau = lambda = epsilon = n_infty = 1");
  }
}

ScalarField truncated(const ScalarField& f, bool on) {
  ScalarField out = f;
  if (on) dealias(out);
  return out;
}

}  // namespace

PerturbationState linear_rhs(const PerturbationState& s, const PhysicalConstants& constants) {
  const double nu = constants.nu();
  const Vec3& b = constants.B_infty;
  const Grid& g = s.grid();
  const auto kx = g.kx(), ky = g.ky(), kz = g.kz();
  PerturbationState d(g);
  // one fused pass over the modes; this is the hot loop of every step
  for (std::size_t i = 0; i < kx.size(); ++i) {
    const std::array<double, 3> k{kx[i], ky[i], kz[i]};
    const Complex n = s.n[i];
    const std::array<Complex, 3> u{s.u[0][i], s.u[1][i], s.u[2][i]};
    const std::array<Complex, 3> E{s.E[0][i], s.E[1][i], s.E[2][i]};
    const std::array<Complex, 3> B{s.B[0][i], s.B[1][i], s.B[2][i]};
    const Complex div_u = k[0] * u[0] + k[1] * u[1] + k[2] * u[2];
    d.n[i] = Complex(div_u.imag(), -div_u.real());  // -i k.u
    for (std::size_t a = 0; a < 3; ++a) {
      const std::size_t p = (a + 1) % 3;
      const std::size_t q = (a + 2) % 3;
      const Complex curl_B = k[p] * B[q] - k[q] * B[p];  // (i k x B)_a / i
      const Complex curl_E = k[p] * E[q] - k[q] * E[p];
      // -(u x B_inf)_a - i k_a n - nu (u_a + E_a)
      d.u[int(a)][i] = -(u[p] * b[q] - u[q] * b[p]) - nu * (u[a] + E[a]) +
                       Complex(k[a] * n.imag(), -k[a] * n.real());
      d.E[int(a)][i] = nu * (Complex(-curl_B.imag(), curl_B.real()) + u[a]);
      d.B[int(a)][i] = -nu * Complex(-curl_E.imag(), curl_E.real());
    }
  }
  return d;
}

PerturbationState rhs(const PerturbationState& s, const PhysicalConstants& constants,
                      bool dealias_products) {
  require_normalized(constants);
  const Grid& g = s.grid();
  const std::size_t size = g.physical_size();
  const double mu = constants.mu();
  const double nu = constants.nu();
  PerturbationState d = linear_rhs(s, constants);

  const ScalarField n_t = truncated(s.n, dealias_products);
  const RealArray n = n_t.to_physical();
  const RealArray div_u = truncated(div(s.u), dealias_products).to_physical();
  std::array<RealArray, 3> u, B, gn;
  for (int a = 0; a < 3; ++a) {
    const auto ua = std::size_t(a);
    u[ua] = truncated(s.u[a], dealias_products).to_physical();
    B[ua] = truncated(s.B[a], dealias_products).to_physical();
    gn[ua] = partial(n_t, a).to_physical();
  }
  const RealArray fn = f_of_n(n, constants.gamma);

  RealArray work(size);
  // density: -(u . grad n + mu n div u)
  for (std::size_t i = 0; i < size; ++i) {
    work[i] = u[0][i] * gn[0][i] + u[1][i] * gn[1][i] + u[2][i] * gn[2][i] + mu * n[i] * div_u[i];
  }
  ScalarField prod = ScalarField::from_physical(g, work);
  if (dealias_products) dealias(prod);
  d.n -= prod;

  for (int a = 0; a < 3; ++a) {
    const auto ua = std::size_t(a);
    const auto up = std::size_t((a + 1) % 3);
    const auto uq = std::size_t((a + 2) % 3);
    const ScalarField ua_t = truncated(s.u[a], dealias_products);
    std::array<RealArray, 3> gu;
    for (int c = 0; c < 3; ++c) gu[std::size_t(c)] = partial(ua_t, c).to_physical();
    // velocity: -(u . grad u_a + mu n d_a n + (u x B)_a)
    for (std::size_t i = 0; i < size; ++i) {
      work[i] = u[0][i] * gu[0][i] + u[1][i] * gu[1][i] + u[2][i] * gu[2][i] +
                mu * n[i] * gn[ua][i] + (u[up][i] * B[uq][i] - u[uq][i] * B[up][i]);
    }
    prod = ScalarField::from_physical(g, work);
    if (dealias_products) dealias(prod);
    d.u[a] -= prod;

    // electric: + nu f(n) u_a
    for (std::size_t i = 0; i < size; ++i) work[i] = fn[i] * u[ua][i];
    prod = ScalarField::from_physical(g, work);
    if (dealias_products) dealias(prod);
    d.E[a].axpy(nu, prod);
  }
  return d;
}

PerturbationState step(const PerturbationState& s, double dt, const PhysicalConstants& constants,
                       bool dealias_products) {
  const PerturbationState k1 = rhs(s, constants, dealias_products);
  PerturbationState tmp = s;
  tmp.axpy(0.5 * dt, k1);
  const PerturbationState k2 = rhs(tmp, constants, dealias_products);
  tmp = s;
  tmp.axpy(0.5 * dt, k2);
  const PerturbationState k3 = rhs(tmp, constants, dealias_products);
  tmp = s;
  tmp.axpy(dt, k3);
  const PerturbationState k4 = rhs(tmp, constants, dealias_products);

  PerturbationState out = s;
  out.axpy(dt / 6.0, k1);
  out.axpy(dt / 3.0, k2);
  out.axpy(dt / 3.0, k3);
  out.axpy(dt / 6.0, k4);
  out.time = s.time + dt;
  return out;
}

double cfl_dt(const PerturbationState& s, const PhysicalConstants& constants, double c_cfl) {
  const std::array<ScalarField, 3> u{s.u[0], s.u[1], s.u[2]};
  const double u_max = lp_norm(std::span<const ScalarField>(u), HUGE_VAL);
  const double n_max = lp_norm(s.n, HUGE_VAL);
  return c_cfl / (s.grid().k_max_axis() * (1.0 + constants.nu() + u_max + n_max));
}

double wraparound_horizon(const Grid& grid) { return grid.box_length() / 4.0; }

namespace {

bool finite_state(const PerturbationState& s) {
  double sum = 0.0;
  for (const ScalarField* f : {&s.n, &s.u[0], &s.u[1], &s.u[2], &s.E[0], &s.E[1], &s.E[2],
                               &s.B[0], &s.B[1], &s.B[2]}) {
    for (const Complex& c : f->coeffs()) sum += std::abs(c.real()) + std::abs(c.imag());
  }
  return std::isfinite(sum);
}

}  // namespace

SimulationResult simulate(const PerturbationState& initial, const SolverConfig& config,
                          const PhysicalConstants& constants, const Observer& observer) {
  config.validate();
  require_normalized(constants);
  if (!finite_state(initial)) throw SolverFailure(ErrorCode::NonFinite, "initial state is not finite", initial);
  SimulationResult result{initial, 0, 0.0, wraparound_horizon(initial.grid()), {}, {}};
  PerturbationState& state = result.final_state;
  const double start = state.time;
  const double stop = start + config.end_time;
  const double dt = config.dt > 0.0 ? config.dt : cfl_dt(initial, constants, config.cfl);
  result.dt = dt;
  if (config.end_time > result.horizon) {
    std::ostringstream msg;
    msg << "end_time " << config.end_time << " exceeds the wraparound horizon " << result.horizon;
    result.warnings.push_back(msg.str());
  }
  if (config.dt > 0.0) {
    const double limit = cfl_dt(initial, constants, config.cfl);
    if (config.dt > limit) {
      std::ostringstream msg;
      msg << "dt " << config.dt << " exceeds the CFL bound " << limit;
      result.warnings.push_back(msg.str());
    }
  }

  if (observer) observer(state, StepInfo{0, dt, config.end_time == 0.0});
  long count = 0;
  const double eps = 1e-12 * std::max(1.0, std::abs(stop));
  while (state.time < stop - eps) {
    const double h = std::min(dt, stop - state.time);
    PerturbationState next = [&] {
      try {
        return step(state, h, constants, config.dealias);
      } catch (const Error& e) {
        throw SolverFailure(e.code(), e.what(), state);
      }
    }();
    if (!finite_state(next)) {
      std::ostringstream msg;
      msg << "state became non-finite at step " << count + 1 << " (t = " << state.time + h << ")";
      throw SolverFailure(ErrorCode::NonFinite, msg.str(), state);
    }
    state = std::move(next);
    ++count;
    if (state.time >= stop - eps) state.time = stop;

    if (config.gauss_projection_every > 0 && count % config.gauss_projection_every == 0) {
      const CompatibilityReport before = verify_compatibility(state, constants);
      result.projections.push_back({count, state.time, before.gauss_residual});
      solve_gauss_law(state, constants);
    }
    const bool last = state.time >= stop;
    if (count % config.output_stride == 0 || last) {
      const double limit = cfl_dt(state, constants, config.cfl);
      if (h > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "step " << count << ": dt " << h << " exceeds the CFL bound " << limit;
        result.warnings.push_back(msg.str());
      }
      if (observer) observer(state, StepInfo{count, h, last});
    }
  }
  result.steps = count;
  return result;
}

}  // namespace emlab
