#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace emlab {

/// Monitored quantity of a decay series.
enum class Quantity {
  FullState,  // (n, u, E, B)
  NuE,        // (n, u, E)
  NOnly,      // n
  NDivU,      // (n, div u)
  BOnly,
  UOnly,
  EOnly,
};

std::string_view to_string(Quantity q);
Quantity parse_quantity(std::string_view name);

struct NormSeries {
  std::string quantity;
  std::vector<double> times;
  std::vector<double> values;
  nlohmann::json metadata = nlohmann::json::object();

  /// Throws InvalidArgument unless times strictly increase and values are
  /// nonnegative with matching length.
  void validate() const;
};

struct FitWindow {
  double t_min = 20.0;
  double t_max = 500.0;
};

struct DecayFit {
  std::string quantity;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  FitWindow window;
  int samples = 0;
  double target = 0.0;
  double tolerance = 0.0;
  bool has_target = false;
  /// Some in-window value lies below 100 x the noise floor.
  bool floor_contaminated = false;
  double floor = 0.0;

  bool passed() const noexcept;
  std::string verdict() const;
};

/// Least squares of log(value) on log(1 + t) over the samples inside window.
/// floor < 0 selects 1e-13 x the largest value as the noise floor.
DecayFit fit_decay(const NormSeries& series, FitWindow window, double floor = -1.0);

/// Attaches a target and tolerance to a fit.
DecayFit with_target(DecayFit fit, double target, double tolerance);

struct Exponent {
  double value = 0.0;
  /// Smallest integer regularity N with N >= 2k + 2 + s.
  int required_N = 0;
};

/// Decay exponent and required regularity for a quantity at derivative
/// order k and negative index s. B and the full state share the basic rate;
/// u and E alone share the (n, u, E) rate.
Exponent theoretical_exponent(Quantity q, int k, double s, bool b_infty_zero);

/// 3 (1/p - 1/2) for p in [1, 2].
double s_of_p(double p);

struct PriorRates {
  double n = -11.0 / 4.0;
  double uE = -5.0 / 4.0;
  double B = -3.0 / 4.0;
  double improved_n = -13.0 / 4.0;
};

PriorRates prior_rates();

nlohmann::json to_json(const DecayFit& fit);
nlohmann::json to_json(const NormSeries& series);

}  // namespace emlab
