#include "emlab/inequality_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "emlab/error.hpp"
#include "emlab/model.hpp"
#include "emlab/rng.hpp"
#include "emlab/spectral.hpp"

namespace emlab {

namespace {

using FieldMaker = std::function<ScalarField(const Grid&)>;

ScalarField plane_wave(const Grid& grid, std::array<int, 3> m, double phase = 0.0) {
  const int n = grid.points();
  const double h = grid.box_length() / n;
  RealArray x(grid.physical_size());
  std::size_t idx = 0;
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz < n; ++iz) {
        const double arg = grid.dk() * h * (m[0] * ix + m[1] * iy + m[2] * iz);
        x[idx++] = std::cos(arg + phase);
      }
    }
  }
  return ScalarField::from_physical(grid, x);
}

ScalarField mean_free(ScalarField f) {
  f[0] = 0.0;
  return f;
}

// Deterministic cases that tend to sit near the extremal ratio: single and
// two-mode fields up to the band, and isolated bumps of several widths.
std::vector<FieldMaker> adversarial_cases(int band, bool with_bumps) {
  std::vector<FieldMaker> cases;
  for (int a = 1; a <= band; ++a) {
    cases.push_back([a](const Grid& g) { return plane_wave(g, {a, 0, 0}); });
    cases.push_back([a](const Grid& g) { return plane_wave(g, {a, a, a}); });
  }
  for (int a = 2; a <= band; ++a) {
    cases.push_back([a](const Grid& g) {
      return plane_wave(g, {1, 0, 0}) + plane_wave(g, {0, 0, a}, 0.3);
    });
    cases.push_back([a](const Grid& g) {
      return plane_wave(g, {1, 1, 0}) + (1.0 / a) * plane_wave(g, {a, 0, 0});
    });
  }
  if (with_bumps) {
    for (int b = 0; b < 6; ++b) {
      cases.push_back([b](const Grid& g) {
        Rng rng(1000 + static_cast<std::uint64_t>(b));
        const double radius = g.box_length() * (0.08 + 0.04 * b);
        return mean_free(random_bump(g, rng, radius, 0.0, 1));
      });
    }
  }
  return cases;
}

// Trial i: slopes 0, -1, -2 for i mod 4 in {0, 1, 2}, adversarial otherwise.
class Ensemble {
 public:
  Ensemble(const EnsembleSpec& spec, int band, std::vector<FieldMaker> adversarial)
      : grid_(spec.points, spec.box_length), rng_(spec.seed), band_(band),
        adversarial_(std::move(adversarial)) {
    if (spec.trials < 2) throw Error(ErrorCode::InvalidArgument, "ensemble needs at least 2 trials");
    if (band_ < 2 || 2 * band_ >= spec.points) {
      throw Error(ErrorCode::InvalidArgument, "grid too coarse for the requested ensemble");
    }
  }

  const Grid& grid() const noexcept { return grid_; }

  ScalarField field(int trial) {
    const int slot = trial % 4;
    if (slot == 3 && !adversarial_.empty()) {
      const auto& make = adversarial_[static_cast<std::size_t>(trial / 4) % adversarial_.size()];
      return make(grid_);
    }
    const double slope = -static_cast<double>(slot % 3);
    const int band = 2 + static_cast<int>(rng_.uniform() * (band_ - 1));
    return random_field(grid_, rng_, std::min(band, band_),
                        [slope](double k) { return std::pow(k, slope); });
  }

  Rng& rng() noexcept { return rng_; }

 private:
  Grid grid_;
  Rng rng_;
  int band_;
  std::vector<FieldMaker> adversarial_;
};

int ensemble_band(const EnsembleSpec& spec, int divisor) {
  return spec.band > 0 ? spec.band : spec.points / divisor;
}

InequalityReport make_report(std::string lemma, const EnsembleSpec& spec) {
  InequalityReport r;
  r.lemma = std::move(lemma);
  r.trials = spec.trials;
  r.seed = spec.seed;
  r.ratios.reserve(static_cast<std::size_t>(spec.trials));
  r.parameters["points"] = spec.points;
  r.parameters["box_length"] = spec.box_length;
  r.parameters["band"] = spec.band;
  r.parameters["bumps"] = spec.bumps;
  return r;
}

void finish(InequalityReport& r) {
  const std::size_t n = r.ratios.size();
  r.max_ratio = 0.0;
  r.last_half_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r.max_ratio = std::max(r.max_ratio, r.ratios[i]);
    if (i >= n / 2) r.last_half_max = std::max(r.last_half_max, r.ratios[i]);
  }
}

// ||grad^alpha f||_{L^p} with the Euclidean tensor magnitude.
double derivative_lp(const ScalarField& f, int alpha, double p) {
  if (p == 2.0) return homog_norm(f, alpha);
  const auto tensor = derivative_tensor(f, alpha);
  return lp_norm(std::span<const ScalarField>(tensor), p);
}

double safe_ratio(double num, double den) {
  if (!(den > 0.0)) return 0.0;
  return num / den;
}

}  // namespace

bool InequalityReport::plateau() const noexcept {
  return max_ratio > 0.0 && last_half_max >= 0.95 * max_ratio;
}

bool InequalityReport::hard_assertion_holds() const noexcept {
  return std::all_of(ratios.begin(), ratios.end(), [](double r) { return r <= 1.0 + 1e-9; });
}

nlohmann::json to_json(const InequalityReport& report) {
  nlohmann::json j;
  j["lemma"] = report.lemma;
  j["trials"] = report.trials;
  j["seed"] = report.seed;
  j["max_ratio"] = report.max_ratio;
  j["last_half_max"] = report.last_half_max;
  j["plateau"] = report.plateau();
  j["exact"] = report.exact;
  if (report.exact) j["hard_assertion_holds"] = report.hard_assertion_holds();
  j["identity_error"] = report.identity_error;
  j["parameters"] = report.parameters;
  return j;
}

CommutatorRoutes commutator_two_ways(const ScalarField& g, const ScalarField& h, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "commutator order must be >= 1");
  const Grid& grid = g.grid();
  const RealArray gx = g.to_physical();
  const RealArray hx = h.to_physical();
  RealArray ghx(gx.size());
  for (std::size_t i = 0; i < gx.size(); ++i) ghx[i] = gx[i] * hx[i];
  const ScalarField gh = ScalarField::from_physical(grid, ghx);

  // derivatives keyed by how often each axis is differentiated
  using Key = std::array<int, 3>;
  std::map<Key, RealArray> dg, dh, dgh;
  auto derivative = [](std::map<Key, RealArray>& cache, const ScalarField& f, Key key) -> const RealArray& {
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    ScalarField d = f;
    for (int axis = 0; axis < 3; ++axis) {
      for (int c = 0; c < key[static_cast<std::size_t>(axis)]; ++c) d = partial(d, axis);
    }
    return cache.emplace(key, d.to_physical()).first->second;
  };

  int components = 1;
  for (int i = 0; i < k; ++i) components *= 3;
  CommutatorRoutes out;
  std::vector<int> tuple(static_cast<std::size_t>(k));
  for (int comp = 0; comp < components; ++comp) {
    int rest = comp;
    Key full{0, 0, 0};
    for (int j = k - 1; j >= 0; --j) {
      tuple[static_cast<std::size_t>(j)] = rest % 3;
      rest /= 3;
      ++full[static_cast<std::size_t>(tuple[static_cast<std::size_t>(j)])];
    }
    // definition: d^a (g h) - g d^a h
    const RealArray& a1 = derivative(dgh, gh, full);
    const RealArray& a2 = derivative(dh, h, full);
    RealArray def(gx.size());
    for (std::size_t i = 0; i < def.size(); ++i) def[i] = a1[i] - gx[i] * a2[i];

    // Leibniz: sum over nonempty subsets S of positions, d_S g * d_{S^c} h
    RealArray leib(gx.size(), 0.0);
    for (int mask = 1; mask < (1 << k); ++mask) {
      Key kg{0, 0, 0};
      Key kh{0, 0, 0};
      for (int j = 0; j < k; ++j) {
        auto axis = static_cast<std::size_t>(tuple[static_cast<std::size_t>(j)]);
        if (mask & (1 << j)) ++kg[axis]; else ++kh[axis];
      }
      const RealArray& pg = derivative(dg, g, kg);
      const RealArray& ph = derivative(dh, h, kh);
      for (std::size_t i = 0; i < leib.size(); ++i) leib[i] += pg[i] * ph[i];
    }
    out.definition.push_back(std::move(def));
    out.leibniz.push_back(std::move(leib));
  }
  return out;
}

double gn_ratio(const ScalarField& f, double p, int alpha, double m, double l, double theta) {
  const double num = derivative_lp(f, alpha, p);
  const double den = std::pow(homog_norm(f, m), 1.0 - theta) * std::pow(homog_norm(f, l), theta);
  return safe_ratio(num, den);
}

double interpolation_ratio(const ScalarField& f, double l, double s, NegativeNorm kind,
                           const LittlewoodPaley* lp) {
  const double theta = 1.0 / (l + 1.0 + s);
  double neg = 0.0;
  if (kind == NegativeNorm::Sobolev) {
    neg = neg_sobolev_norm(f, s);
  } else {
    if (!lp) throw Error(ErrorCode::InvalidArgument, "Besov ratio needs a Littlewood-Paley family");
    neg = lp->besov_norm(f, s);
  }
  const double den = std::pow(homog_norm(f, l + 1.0), 1.0 - theta) * std::pow(neg, theta);
  return safe_ratio(homog_norm(f, l), den);
}

double gn_theta(double p, double alpha, double m, double l) {
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must be >= 1");
  if (alpha < 0.0 || m < 0.0 || l < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "derivative orders must be nonnegative");
  }
  const double lhs = alpha + 3.0 * (0.5 - (std::isinf(p) ? 0.0 : 1.0 / p));
  if (l == m) {
    if (std::abs(lhs - m) > 1e-12) {
      throw Error(ErrorCode::ThetaOutOfRange, "no theta balances the scaling with l == m");
    }
    return 0.5;
  }
  const double theta = (lhs - m) / (l - m);
  if (theta < -1e-12 || theta > 1.0 + 1e-12) {
    throw Error(ErrorCode::ThetaOutOfRange, "theta = " + std::to_string(theta) + " outside [0, 1]");
  }
  if (std::isinf(p) && (theta < 0.05 || theta > 0.95)) {
    throw Error(ErrorCode::ThetaOutOfRange,
                "p = infinity needs theta strictly inside (0, 1); got " + std::to_string(theta));
  }
  return std::clamp(theta, 0.0, 1.0);
}

InequalityReport check_gn(double p, int alpha, double m, double l, const EnsembleSpec& ensemble) {
  if (alpha < 0) throw Error(ErrorCode::InvalidArgument, "alpha must be >= 0");
  const double theta = gn_theta(p, alpha, m, l);
  const int band = ensemble_band(ensemble, 4);
  Ensemble fields(ensemble, band, adversarial_cases(band, ensemble.bumps));
  InequalityReport r = make_report("gagliardo_nirenberg", ensemble);
  r.parameters["p"] = std::isinf(p) ? nlohmann::json("inf") : nlohmann::json(p);
  r.parameters["alpha"] = alpha;
  r.parameters["m"] = m;
  r.parameters["l"] = l;
  r.parameters["theta"] = theta;
  for (int t = 0; t < ensemble.trials; ++t) {
    r.ratios.push_back(gn_ratio(fields.field(t), p, alpha, m, l, theta));
  }
  finish(r);
  return r;
}

std::vector<InequalityReport> check_f_estimates(int k, double gamma, double amplitude,
                                                const EnsembleSpec& ensemble) {
  if (k < 0 || k > 3) throw Error(ErrorCode::InvalidArgument, "k must be in 0..3");
  if (!(gamma >= 1.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be >= 1");
  if (!(amplitude > 0.0)) throw Error(ErrorCode::InvalidArgument, "amplitude must be positive");
  if (amplitude > 0.1) {
    throw Error(ErrorCode::AmplitudeTooLarge, "f estimates are small-data statements; ||n||_H3 <= 0.1");
  }
  const int band = ensemble_band(ensemble, 4);
  Ensemble fields(ensemble, band, adversarial_cases(band, ensemble.bumps));

  std::array<InequalityReport, 3> out{make_report("f_bound_l2", ensemble),
                                      make_report("f_bound_linf", ensemble),
                                      make_report("f_quadratic_remainder", ensemble)};
  for (auto& r : out) {
    r.parameters["k"] = k;
    r.parameters["gamma"] = gamma;
    r.parameters["amplitude_H3"] = amplitude;
  }
  for (int t = 0; t < ensemble.trials; ++t) {
    ScalarField n = fields.field(t);
    n *= amplitude / sobolev_norm(n, 3);
    const ScalarField fn = f_of_n(n, gamma);
    const double dk_n = homog_norm(n, k);
    const double dk_f = homog_norm(fn, k);
    out[0].ratios.push_back(safe_ratio(dk_f, dk_n));

    const double sup_f = derivative_lp(fn, k, std::numeric_limits<double>::infinity());
    const double den = std::pow(dk_n, 0.25) * std::pow(homog_norm(n, k + 2), 0.75);
    out[1].ratios.push_back(safe_ratio(sup_f, den));

    const double rem = homog_norm(fn - n, k);
    out[2].ratios.push_back(safe_ratio(rem, amplitude * dk_n));
  }
  for (auto& r : out) finish(r);
  return {out.begin(), out.end()};
}

InequalityReport check_commutator(int k, const EnsembleSpec& ensemble) {
  if (k < 1 || k > 4) throw Error(ErrorCode::InvalidArgument, "commutator order must be in 1..4");
  // products of two fields must stay inside the resolved band
  const int band = ensemble_band(ensemble, 6);
  Ensemble fields(ensemble, band, adversarial_cases(band, false));
  const Grid& grid = fields.grid();
  InequalityReport r = make_report("commutator", ensemble);
  r.parameters["k"] = k;

  for (int t = 0; t < ensemble.trials; ++t) {
    // g and h come from consecutive ensemble slots so both vary in type
    const ScalarField g = fields.field(t);
    const ScalarField h = fields.field(t + 1 + (t % 3));
    const CommutatorRoutes routes = commutator_two_ways(g, h, k);
    double def_sq = 0.0;
    double diff_sq = 0.0;
    for (std::size_t c = 0; c < routes.definition.size(); ++c) {
      const RealArray& a = routes.definition[c];
      const RealArray& b = routes.leibniz[c];
      for (std::size_t i = 0; i < a.size(); ++i) {
        def_sq += a[i] * a[i];
        diff_sq += (a[i] - b[i]) * (a[i] - b[i]);
      }
    }
    const double lhs = std::sqrt(def_sq * grid.cell_volume());
    if (def_sq > 0.0) r.identity_error = std::max(r.identity_error, std::sqrt(diff_sq / def_sq));

    const VectorField dgv = grad(g);
    const double grad_g_inf = lp_norm(std::span<const ScalarField>(dgv.c), std::numeric_limits<double>::infinity());
    const double h_inf = lp_norm(h, std::numeric_limits<double>::infinity());
    const double den = grad_g_inf * homog_norm(h, k - 1) + homog_norm(g, k) * h_inf;
    r.ratios.push_back(safe_ratio(lhs, den));
  }
  finish(r);
  return r;
}

InequalityReport check_embeddings(double s, double p, NegativeNorm kind, const EnsembleSpec& ensemble) {
  if (std::abs(0.5 + s / 3.0 - 1.0 / p) > 1e-12) {
    throw Error(ErrorCode::ExponentMismatch, "embedding needs 1/2 + s/3 = 1/p");
  }
  if (kind == NegativeNorm::Sobolev && !(s >= 0.0 && s < 1.5)) {
    throw Error(ErrorCode::SOutOfRange, "Sobolev embedding needs s in [0, 3/2)");
  }
  if (kind == NegativeNorm::Besov && !(s > 0.0 && s <= 1.5)) {
    throw Error(ErrorCode::SOutOfRange, "Besov embedding needs s in (0, 3/2]");
  }
  const Grid grid(ensemble.points, ensemble.box_length);
  const LittlewoodPaley lp(grid);
  Rng rng(ensemble.seed);
  const double len = grid.box_length();
  InequalityReport r = make_report(kind == NegativeNorm::Sobolev ? "sobolev_embedding" : "besov_embedding",
                                   ensemble);
  r.parameters["s"] = s;
  r.parameters["p"] = p;
  for (int t = 0; t < ensemble.trials; ++t) {
    ScalarField f(grid);
    if (t % 4 == 3) {
      // single centred bump, width cycling through a fixed list
      Rng fixed(2000 + static_cast<std::uint64_t>((t / 4) % 6));
      f = random_bump(grid, fixed, len * (0.08 + 0.03 * ((t / 4) % 6)), 0.0, 1);
    } else {
      const int count = 1 + t % 3 + static_cast<int>(rng.uniform() * 3.0);
      f = random_bump(grid, rng, len * rng.uniform(0.08, 0.2), len / 8.0, count);
    }
    const double neg = kind == NegativeNorm::Sobolev ? neg_sobolev_norm(f, s, MeanPolicy::Exclude)
                                                     : lp.besov_norm(f, s);
    r.ratios.push_back(safe_ratio(neg, lp_norm(f, p)));
  }
  finish(r);
  return r;
}

InequalityReport check_exact_interpolation(double l, double s, NegativeNorm kind,
                                           const EnsembleSpec& ensemble) {
  if (l < 0.0) throw Error(ErrorCode::InvalidArgument, "l must be >= 0");
  if (!(s > 0.0 && s <= 1.5)) throw Error(ErrorCode::SOutOfRange, "s must be in (0, 3/2]");
  const double theta = 1.0 / (l + 1.0 + s);
  const int band = ensemble_band(ensemble, 4);
  Ensemble fields(ensemble, band, adversarial_cases(band, ensemble.bumps));
  const LittlewoodPaley lp(fields.grid());
  InequalityReport r = make_report(
      kind == NegativeNorm::Sobolev ? "sobolev_interpolation" : "besov_interpolation", ensemble);
  r.exact = kind == NegativeNorm::Sobolev;
  r.parameters["l"] = l;
  r.parameters["s"] = s;
  r.parameters["theta"] = theta;
  for (int t = 0; t < ensemble.trials; ++t) {
    const double ratio = interpolation_ratio(fields.field(t), l, s, kind, &lp);
    r.ratios.push_back(ratio);
    if (r.exact && ratio > 1.0 + 1e-9) {
      throw Error(ErrorCode::ExactViolated,
                  "interpolation ratio " + std::to_string(ratio) + " exceeds 1 at trial " + std::to_string(t));
    }
  }
  finish(r);
  return r;
}

}  // namespace emlab
