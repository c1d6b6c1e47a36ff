#include "emlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "emlab/error.hpp"

namespace emlab {

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::FullState: return "full_state";
    case Quantity::NuE: return "nuE";
    case Quantity::NOnly: return "n_only";
    case Quantity::NDivU: return "n_divu";
    case Quantity::BOnly: return "B_only";
    case Quantity::UOnly: return "u_only";
    case Quantity::EOnly: return "E_only";
  }
  return "unknown";
}

Quantity parse_quantity(std::string_view name) {
  for (Quantity q : {Quantity::FullState, Quantity::NuE, Quantity::NOnly, Quantity::NDivU,
                     Quantity::BOnly, Quantity::UOnly, Quantity::EOnly}) {
    if (to_string(q) == name) return q;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown quantity '" + std::string(name) + "'");
}

void NormSeries::validate() const {
  if (times.size() != values.size()) {
    throw Error(ErrorCode::InvalidArgument, quantity + ": times and values differ in length");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, quantity + ": times must be strictly increasing");
    }
    if (!(values[i] >= 0.0)) {
      throw Error(ErrorCode::InvalidArgument, quantity + ": values must be nonnegative");
    }
  }
}

bool DecayFit::passed() const noexcept {
  if (!has_target) return true;
  return !floor_contaminated && std::abs(slope - target) <= tolerance;
}

std::string DecayFit::verdict() const {
  if (!has_target) return "info";
  if (floor_contaminated) return "fail (noise floor)";
  return passed() ? "pass" : "fail";
}

DecayFit fit_decay(const NormSeries& series, FitWindow window, double floor) {
  series.validate();
  if (!(window.t_max > window.t_min)) {
    throw Error(ErrorCode::InvalidArgument, "fit window must have t_max > t_min");
  }
  DecayFit fit;
  fit.quantity = series.quantity;
  fit.window = window;
  double peak = 0.0;
  for (double v : series.values) peak = std::max(peak, v);
  fit.floor = floor < 0.0 ? 1e-13 * peak : floor;

  std::vector<double> x, y;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    if (t < window.t_min || t > window.t_max) continue;
    const double v = series.values[i];
    if (!(v > 0.0)) {
      throw Error(ErrorCode::NonpositiveValue,
                  series.quantity + ": nonpositive value at t = " + std::to_string(t));
    }
    if (v < 100.0 * fit.floor) fit.floor_contaminated = true;
    x.push_back(std::log1p(t));
    y.push_back(std::log(v));
  }
  fit.samples = static_cast<int>(x.size());
  if (x.size() < 8) {
    throw Error(ErrorCode::InsufficientSamples,
                series.quantity + ": " + std::to_string(x.size()) + " samples in window, need 8");
  }
  const double m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

DecayFit with_target(DecayFit fit, double target, double tolerance) {
  fit.target = target;
  fit.tolerance = tolerance;
  fit.has_target = true;
  return fit;
}

Exponent theoretical_exponent(Quantity q, int k, double s, bool b_infty_zero) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 0");
  if (!(s >= 0.0 && s <= 1.5)) throw Error(ErrorCode::SOutOfRange, "s must lie in [0, 3/2]");
  double value = 0.0;
  double need = 0.0;
  switch (q) {
    case Quantity::FullState:
    case Quantity::BOnly:
      value = -(k + s) / 2.0;
      need = 2.0 * k + 2.0 + s;
      break;
    case Quantity::NuE:
    case Quantity::UOnly:
    case Quantity::EOnly:
      value = -(k + 1 + s) / 2.0;
      need = 2.0 * k + 4.0 + s;
      break;
    case Quantity::NOnly:
      value = -(k + 2 + s) / 2.0;
      need = 2.0 * k + 6.0 + s;
      break;
    case Quantity::NDivU:
      if (!b_infty_zero) {
        throw Error(ErrorCode::RequiresBInftyZero, "the (n, div u) rate requires B_infty = 0");
      }
      value = -(k / 2.0 + 7.0 / 4.0 + s);
      need = 2.0 * k + 10.0 + s;
      break;
  }
  return {value, static_cast<int>(std::ceil(need - 1e-12))};
}

double s_of_p(double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw Error(ErrorCode::POutOfRange, "p must lie in [1, 2]");
  // 3 / p - 3 / 2 rounds exactly at the usual p = 1, 6/5, 3/2
  return 3.0 / p - 1.5;
}

PriorRates prior_rates() { return {}; }

nlohmann::json to_json(const DecayFit& fit) {
  nlohmann::json j{{"quantity", fit.quantity},
                   {"fitted_slope", fit.slope},
                   {"intercept", fit.intercept},
                   {"r_squared", fit.r_squared},
                   {"window", {fit.window.t_min, fit.window.t_max}},
                   {"samples", fit.samples},
                   {"floor_contaminated", fit.floor_contaminated},
                   {"verdict", fit.verdict()}};
  if (fit.has_target) {
    j["target"] = fit.target;
    j["tolerance"] = fit.tolerance;
  }
  return j;
}

nlohmann::json to_json(const NormSeries& series) {
  return {{"quantity", series.quantity},
          {"times", series.times},
          {"values", series.values},
          {"metadata", series.metadata}};
}

}  // namespace emlab
