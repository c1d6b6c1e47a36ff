#include "emlab/linear.hpp"

#include <boost/math/special_functions/legendre.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "emlab/error.hpp"

namespace emlab {

namespace {

using Columns = Eigen::Matrix<std::complex<double>, 10, Eigen::Dynamic>;
constexpr std::complex<double> kI{0.0, 1.0};

int levi(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0;
  return ((b - a + 3) % 3 == 1) ? 1 : -1;
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm3(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

Vec3 scaled(const Vec3& a, double f) { return {a[0] * f, a[1] * f, a[2] * f}; }

}  // namespace

ModeSystem mode_matrix(const Vec3& xi, const PhysicalConstants& constants) {
  constants.validate();
  const double nu = constants.nu();
  const Vec3& b = constants.B_infty;
  ModeSystem mode{xi, Matrix10::Zero(), constants};
  Matrix10& A = mode.matrix;
  for (int a = 0; a < 3; ++a) {
    A(0, 1 + a) = -kI * xi[std::size_t(a)];
    A(1 + a, 0) = -kI * xi[std::size_t(a)];
    A(1 + a, 1 + a) = -nu;
    A(1 + a, 4 + a) = -nu;
    A(4 + a, 1 + a) = nu;
    for (int bb = 0; bb < 3; ++bb) {
      for (int c = 0; c < 3; ++c) {
        const int e = levi(a, bb, c);
        if (e == 0) continue;
        // -(u x B_inf)_a = -e_abc u_b B_c
        A(1 + a, 1 + bb) += -double(e) * b[std::size_t(c)];
        // i nu (xi x B)_a, -i nu (xi x E)_a
        A(4 + a, 7 + c) += kI * nu * double(e) * xi[std::size_t(bb)];
        A(7 + a, 4 + c) += -kI * nu * double(e) * xi[std::size_t(bb)];
      }
    }
  }
  return mode;
}

double spectral_abscissa(const ModeSystem& mode) {
  Eigen::ComplexEigenSolver<Matrix10> solver(mode.matrix, false);
  return solver.eigenvalues().real().maxCoeff();
}

Matrix10 propagator(const ModeSystem& mode, double t, ExpmMethod method) {
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "evolution time must be >= 0");
  if (t == 0.0) return Matrix10::Identity();
  if (method == ExpmMethod::Eigen) {
    ModeEigen eig(mode);
    if (eig.ok()) return eig.apply(t, Matrix10::Identity());
  }
  Matrix10 scaledA = t * mode.matrix;
  Matrix10 out = scaledA.exp();
  return out;
}

Vector10 evolve_mode(const ModeSystem& mode, double t, const Vector10& S0, ExpmMethod method) {
  return propagator(mode, t, method) * S0;
}

ModeEigen::ModeEigen(const ModeSystem& mode, double max_condition) {
  Eigen::ComplexEigenSolver<Matrix10> solver(mode.matrix, true);
  if (solver.info() != Eigen::Success) return;
  vectors_ = solver.eigenvectors();
  values_ = solver.eigenvalues();
  Eigen::JacobiSVD<Matrix10> svd(vectors_);
  const auto sv = svd.singularValues();
  const double smallest = sv(9);
  condition_ = smallest > 0.0 ? sv(0) / smallest : HUGE_VAL;
  if (!(condition_ < max_condition)) return;
  inverse_ = vectors_.partialPivLu().inverse();
  ok_ = true;
}

Columns ModeEigen::apply(double t, const Columns& S) const {
  if (!ok_) throw Error(ErrorCode::IllConditioned, "eigenvector matrix is ill-conditioned");
  Columns coeffs = inverse_ * S;
  for (int i = 0; i < 10; ++i) coeffs.row(i) *= std::exp(t * values_(i));
  return vectors_ * coeffs;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre order must be >= 1");
  const std::vector<double> positive = boost::math::legendre_p_zeros<double>(n);
  std::vector<double> nodes, weights;
  auto weight = [n](double x) {
    const double d = boost::math::legendre_p_prime<double>(n, x);
    return 2.0 / ((1.0 - x * x) * d * d);
  };
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
    if (*it == 0.0) continue;
    nodes.push_back(-*it);
    weights.push_back(weight(*it));
  }
  for (double x : positive) {
    nodes.push_back(x);
    weights.push_back(weight(x));
  }
  return {nodes, weights};
}

// --- profiles ---

double SpectralProfile::amplitude(double r) const {
  switch (kind) {
    case ProfileKind::FlatLow:
      return r <= 1.0 ? 1.0 : std::exp(-(r - 1.0) * (r - 1.0) / (rolloff * rolloff));
    case ProfileKind::LowFreq:
      return std::pow(std::min(1.0, r), s - 1.5) * std::exp(-r * r / (rolloff * rolloff));
    case ProfileKind::FlatBall:
      return r <= 1.0 ? 1.0 : 0.0;
    case ProfileKind::Shell:
      return 1.0;
  }
  return 0.0;
}

double SpectralProfile::reach(double tol) const {
  const double width = rolloff * std::sqrt(2.0 * std::log(1.0 / tol) + 6.0);
  switch (kind) {
    case ProfileKind::FlatLow: return 1.0 + width;
    case ProfileKind::LowFreq: return width;
    case ProfileKind::FlatBall: return 1.0;
    case ProfileKind::Shell: return radius;
  }
  return 1.0;
}

Columns initial_columns(const SpectralProfile& profile, const Vec3& xi, const Vec3& e1,
                        const PhysicalConstants& constants) {
  const double r = norm3(xi);
  const double a = profile.amplitude(r);
  const double nu = constants.nu();
  const Vec3 eL = r > 0.0 ? scaled(xi, 1.0 / r) : cross(e1, Vec3{0.0, 0.0, 1.0});
  const Vec3 e2 = cross(eL, e1);
  std::vector<Vector10> cols;
  auto put = [&cols](int offset, const Vec3& v, double f) {
    Vector10 c = Vector10::Zero();
    for (int i = 0; i < 3; ++i) c(offset + i) = f * v[std::size_t(i)];
    cols.push_back(c);
  };
  if (profile.excite_u) {
    const double f = a / std::sqrt(3.0);
    put(1, eL, f);
    put(1, e1, f);
    put(1, e2, f);
  }
  if (profile.excite_E) {
    put(4, eL, a);
    cols.back()(0) = -kI * r * a / nu;
    if (profile.transverse_E != 0.0) {
      const double f = a * profile.transverse_E / std::sqrt(2.0);
      put(4, e1, f);
      put(4, e2, f);
    }
  }
  if (profile.excite_B) {
    const double f = a / std::sqrt(2.0);
    put(7, e1, f);
    put(7, e2, f);
  }
  Columns out(10, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(Eigen::Index(j)) = cols[j];
  return out;
}

// --- quadrature ---

namespace {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

struct Direction {
  Vec3 omega;
  Vec3 e1;
  double weight;
};

Rule radial_rule(const SpectralProfile& profile, const QuadratureSpec& q, int panels_per_decade) {
  Rule rule;
  if (profile.kind == ProfileKind::Shell) {
    rule.nodes = {profile.radius};
    rule.weights = {1.0 / (4.0 * std::numbers::pi * profile.radius * profile.radius)};
    return rule;
  }
  const double top = profile.reach(q.tail_tol);
  if (!(q.xi_min > 0.0 && q.xi_min < top)) {
    throw Error(ErrorCode::InvalidArgument, "xi_min must lie in (0, xi_max)");
  }
  const int panels =
      std::max(1, static_cast<int>(std::ceil(panels_per_decade * std::log10(top / q.xi_min))));
  std::vector<double> breaks{0.0};
  for (int i = 0; i <= panels; ++i) {
    breaks.push_back(q.xi_min * std::pow(top / q.xi_min, double(i) / panels));
  }
  breaks.back() = top;
  if (q.xi_min < 1.0 && top > 1.0) breaks.push_back(1.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, y); }),
               breaks.end());
  const auto [x, w] = gauss_legendre(q.nodes_per_panel);
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double lo = breaks[p];
    const double hi = breaks[p + 1];
    const double half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < x.size(); ++i) {
      rule.nodes.push_back(lo + half * (x[i] + 1.0));
      rule.weights.push_back(half * w[i]);
    }
  }
  return rule;
}

std::vector<Direction> angular_rule(const PhysicalConstants& constants, const QuadratureSpec& q) {
  const double four_pi = 4.0 * std::numbers::pi;
  if (constants.b_infty_zero()) {
    return {{Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0}, four_pi}};
  }
  const Vec3 axis = scaled(constants.B_infty, 1.0 / norm3(constants.B_infty));
  Vec3 seed{1.0, 0.0, 0.0};
  if (std::abs(axis[0]) > 0.9) seed = {0.0, 1.0, 0.0};
  Vec3 b1 = cross(seed, axis);
  b1 = scaled(b1, 1.0 / norm3(b1));
  const Vec3 b2 = cross(axis, b1);
  const auto [cosines, wts] = gauss_legendre(q.polar_nodes);
  const int azimuths = q.axisymmetric ? 1 : q.azimuth_nodes;
  std::vector<Direction> dirs;
  for (std::size_t i = 0; i < cosines.size(); ++i) {
    const double c = cosines[i];
    const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int j = 0; j < azimuths; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / azimuths;
      Vec3 omega{};
      for (int d = 0; d < 3; ++d) {
        const auto ud = std::size_t(d);
        omega[ud] = sn * std::cos(phi) * b1[ud] + sn * std::sin(phi) * b2[ud] + c * axis[ud];
      }
      Vec3 e1 = cross(axis, omega);
      e1 = scaled(e1, 1.0 / norm3(e1));
      dirs.push_back({omega, e1, wts[i] * 2.0 * std::numbers::pi / azimuths});
    }
  }
  return dirs;
}

// Squared-norm contributions of one propagated column set.
struct Parts {
  double n = 0.0, u = 0.0, E = 0.0, B = 0.0, divu = 0.0;
};

Parts parts_of(const Columns& S, const Vec3& xi) {
  Parts p;
  for (Eigen::Index j = 0; j < S.cols(); ++j) {
    p.n += std::norm(S(0, j));
    std::complex<double> d{};
    for (int a = 0; a < 3; ++a) {
      p.u += std::norm(S(1 + a, j));
      p.E += std::norm(S(4 + a, j));
      p.B += std::norm(S(7 + a, j));
      d += xi[std::size_t(a)] * S(1 + a, j);
    }
    p.divu += std::norm(d);
  }
  return p;
}

double pick(const Parts& p, Quantity q) {
  switch (q) {
    case Quantity::FullState: return p.n + p.u + p.E + p.B;
    case Quantity::NuE: return p.n + p.u + p.E;
    case Quantity::NOnly: return p.n;
    case Quantity::NDivU: return p.n + p.divu;
    case Quantity::BOnly: return p.B;
    case Quantity::UOnly: return p.u;
    case Quantity::EOnly: return p.E;
  }
  return 0.0;
}

// sums[request][time]
std::vector<std::vector<double>> integrate(const SpectralProfile& profile,
                                           std::span<const SeriesRequest> requests,
                                           std::span<const double> times,
                                           const PhysicalConstants& constants, const Rule& radial,
                                           const std::vector<Direction>& dirs) {
  std::vector<std::vector<double>> sums(requests.size(), std::vector<double>(times.size(), 0.0));
  const bool isotropic = constants.b_infty_zero();
  for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
    const double r = radial.nodes[i];
    if (profile.amplitude(r) == 0.0) continue;
    for (const Direction& dir : dirs) {
      const Vec3 xi = scaled(dir.omega, r);
      const ModeSystem mode = mode_matrix(xi, constants);
      const Columns S0 = initial_columns(profile, xi, dir.e1, constants);
      const double base = radial.weights[i] * r * r * dir.weight;
      std::unique_ptr<ModeEigen> eig;
      if (!isotropic) {
        eig = std::make_unique<ModeEigen>(mode);
        if (!eig->ok()) eig.reset();
      }
      for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const Columns S = eig ? eig->apply(times[ti], S0) : Columns(propagator(mode, times[ti]) * S0);
        const Parts p = parts_of(S, xi);
        for (std::size_t q = 0; q < requests.size(); ++q) {
          sums[q][ti] += base * std::pow(r, 2 * requests[q].k) * pick(p, requests[q].quantity);
        }
      }
    }
  }
  return sums;
}

}  // namespace

LinearSeries weighted_norm_series(const SpectralProfile& profile,
                                  std::span<const SeriesRequest> requests,
                                  std::span<const double> times, const PhysicalConstants& constants,
                                  const QuadratureSpec& quadrature) {
  constants.validate();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "times must be nonnegative and strictly increasing");
    }
  }
  for (const auto& req : requests) {
    if (req.k < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
  }
  const std::vector<Direction> dirs = angular_rule(constants, quadrature);
  const Rule coarse = radial_rule(profile, quadrature, quadrature.panels_per_decade);
  std::vector<std::vector<double>> sums;
  LinearSeries out;
  const bool check = quadrature.check_convergence && profile.kind != ProfileKind::Shell;
  if (check) {
    const Rule fine = radial_rule(profile, quadrature, 2 * quadrature.panels_per_decade);
    const auto rough = integrate(profile, requests, times, constants, coarse, dirs);
    sums = integrate(profile, requests, times, constants, fine, dirs);
    out.radial_nodes = static_cast<int>(fine.nodes.size());
    for (std::size_t q = 0; q < requests.size(); ++q) {
      const double start = std::sqrt(sums[q].front());
      for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const double a = std::sqrt(rough[q][ti]);
        const double b = std::sqrt(sums[q][ti]);
        if (b <= quadrature.convergence_floor * start || b == 0.0) continue;
        const double change = std::abs(a - b) / b;
        out.max_relative_change = std::max(out.max_relative_change, change);
        if (change > quadrature.convergence_tol) {
          std::ostringstream msg;
          msg << to_string(requests[q].quantity) << " k=" << requests[q].k << " at t=" << times[ti]
              << ": doubling radial nodes changed the norm by " << change;
          throw Error(ErrorCode::QuadratureNotConverged, msg.str());
        }
      }
    }
  } else {
    sums = integrate(profile, requests, times, constants, coarse, dirs);
    out.radial_nodes = static_cast<int>(coarse.nodes.size());
  }
  out.directions = static_cast<int>(dirs.size());
  out.xi_max = profile.kind == ProfileKind::Shell ? profile.radius : profile.reach(quadrature.tail_tol);
  for (std::size_t q = 0; q < requests.size(); ++q) {
    NormSeries series;
    series.quantity = std::string(to_string(requests[q].quantity));
    series.times.assign(times.begin(), times.end());
    for (double v : sums[q]) series.values.push_back(std::sqrt(std::max(0.0, v)));
    series.metadata = {{"k", requests[q].k},
                       {"radial_nodes", out.radial_nodes},
                       {"directions", out.directions},
                       {"xi_max", out.xi_max}};
    out.series.push_back(std::move(series));
  }
  return out;
}

// --- report ---

bool LinearDecayReport::all_passed() const {
  return std::all_of(fits.begin(), fits.end(), [](const DecayFit& f) { return f.passed(); });
}

double linear_tolerance(Quantity q, int k) {
  switch (q) {
    case Quantity::FullState:
    case Quantity::BOnly: return k == 0 ? 0.08 : 0.10;
    case Quantity::NDivU: return 0.15;
    default: return 0.10;
  }
}

SpectralProfile profile_for_s(double s, double rolloff) {
  if (!(s > 0.0 && s <= 1.5)) throw Error(ErrorCode::SOutOfRange, "data class s must lie in (0, 3/2]");
  SpectralProfile p;
  p.kind = s == 1.5 ? ProfileKind::FlatLow : ProfileKind::LowFreq;
  p.s = s;
  p.rolloff = rolloff > 0.0 ? rolloff : (p.kind == ProfileKind::FlatLow ? 0.05 : 0.5);
  return p;
}

LinearDecayReport linear_decay_report(const LinearReportConfig& config,
                                      const PhysicalConstants& constants) {
  constants.validate();
  if (config.n_times < 8) throw Error(ErrorCode::InvalidArgument, "n_times must be >= 8");
  LinearDecayReport report;
  report.s = config.s;
  report.b_infty_zero = constants.b_infty_zero();
  const SpectralProfile profile = profile_for_s(config.s, config.rolloff);

  std::vector<Quantity> quantities = config.quantities;
  if (quantities.empty()) {
    quantities = {Quantity::FullState, Quantity::NuE, Quantity::NOnly};
    if (report.b_infty_zero) quantities.push_back(Quantity::NDivU);
    quantities.push_back(Quantity::BOnly);
  }
  std::vector<SeriesRequest> requests;
  std::vector<Exponent> targets;
  for (int k : config.k_list) {
    for (Quantity q : quantities) {
      targets.push_back(theoretical_exponent(q, k, config.s, report.b_infty_zero));
      requests.push_back({q, k});
    }
  }

  std::vector<double> times{0.0};
  const double t_lo = 0.5;
  const double t_hi = config.window.t_max;
  for (int i = 0; i < config.n_times; ++i) {
    times.push_back(t_lo * std::pow(t_hi / t_lo, double(i) / (config.n_times - 1)));
  }
  report.quadrature_info = weighted_norm_series(profile, requests, times, constants, config.quadrature);
  report.series = report.quadrature_info.series;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    report.series[i].metadata["s"] = config.s;
    DecayFit fit = fit_decay(report.series[i], config.window);
    fit = with_target(fit, targets[i].value, linear_tolerance(requests[i].quantity, requests[i].k));
    report.fits.push_back(fit);
  }
  return report;
}

nlohmann::json to_json(const LinearDecayReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < report.fits.size(); ++i) {
    nlohmann::json row = to_json(report.fits[i]);
    row["k"] = report.series[i].metadata.value("k", 0);
    row["s"] = report.s;
    rows.push_back(row);
  }
  return {{"s", report.s},
          {"b_infty_zero", report.b_infty_zero},
          {"fits", rows},
          {"all_passed", report.all_passed()},
          {"quadrature",
           {{"radial_nodes", report.quadrature_info.radial_nodes},
            {"directions", report.quadrature_info.directions},
            {"xi_max", report.quadrature_info.xi_max},
            {"max_relative_change", report.quadrature_info.max_relative_change}}}};
}

}  // namespace emlab
