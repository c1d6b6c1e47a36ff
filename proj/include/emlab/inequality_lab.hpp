#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "emlab/spectral.hpp"

namespace emlab {

struct InequalityReport {
  std::string lemma;
  int trials = 0;
  double max_ratio = 0.0;
  double last_half_max = 0.0;
  /// The discrete inequality holds with constant one (hard assertion).
  bool exact = false;
  /// Largest deviation between two evaluation routes, where one exists.
  double identity_error = 0.0;
  std::uint64_t seed = 0;
  nlohmann::json parameters = nlohmann::json::object();
  std::vector<double> ratios;

  /// Last-half max within 5% of the overall max.
  bool plateau() const noexcept;
  /// For exact lemmas: every ratio <= 1 + 1e-9.
  bool hard_assertion_holds() const noexcept;
};

nlohmann::json to_json(const InequalityReport& report);

/// Field ensemble: trial i uses a flat, |k|^-1 or |k|^-2 band-limited
/// Gaussian field, or (every fourth trial) the next adversarial case from a
/// fixed list, so adversarial cases recur in both halves of the run.
struct EnsembleSpec {
  int points = 32;
  double box_length = 2.0 * 3.14159265358979323846;
  std::uint64_t seed = 1;
  int trials = 500;
  /// Largest lattice band of the random and plane-wave fields; 0 picks N/4
  /// (N/6 for the commutator). A fixed band with bumps off gives the same
  /// family of functions on every grid.
  int band = 0;
  /// Include the centred-bump adversarial cases (not band-limited).
  bool bumps = true;
};

enum class NegativeNorm { Sobolev, Besov };

// --- single-field ratios used by the ensemble checks ---

/// ||grad^alpha f||_{L^p} / (||grad^m f||^{1-theta} ||grad^l f||^theta).
double gn_ratio(const ScalarField& f, double p, int alpha, double m, double l, double theta);

/// ||grad^l f|| / (||grad^{l+1} f||^{1-theta} ||f||_{-s}^theta), theta = 1/(l+1+s).
/// lp is required for the Besov kind.
double interpolation_ratio(const ScalarField& f, double l, double s, NegativeNorm kind,
                           const LittlewoodPaley* lp = nullptr);

/// Components of [grad^k, g] h in lexicographic index order, from the
/// definition and from the Leibniz expansion over nonempty index subsets.
struct CommutatorRoutes {
  std::vector<RealArray> definition;
  std::vector<RealArray> leibniz;
};
CommutatorRoutes commutator_two_ways(const ScalarField& g, const ScalarField& h, int k);

/// Interpolation exponent theta from alpha + 3(1/2 - 1/p) = m(1 - theta) + l theta.
/// When l == m the relation must hold identically and theta = 1/2 is used.
double gn_theta(double p, double alpha, double m, double l);

/// Ensemble maximum of gn_ratio. Throws ThetaOutOfRange when theta
/// leaves [0, 1], or [0.05, 0.95] for p = infinity.
InequalityReport check_gn(double p, int alpha, double m, double l, const EnsembleSpec& ensemble);

/// Three reports: ||grad^k f(n)|| / ||grad^k n||,
/// ||grad^k f(n)||_inf / (||grad^k n||^{1/4} ||grad^{k+2} n||^{3/4}) and the
/// quadratic remainder ||grad^k (f(n) - n)|| / (||n||_{H^3} ||grad^k n||),
/// over fields rescaled to ||n||_{H^3} = amplitude. amplitude > 0.1 throws
/// AmplitudeTooLarge.
std::vector<InequalityReport> check_f_estimates(int k, double gamma, double amplitude,
                                                const EnsembleSpec& ensemble);

/// [grad^k, g] h evaluated from the definition and from the Leibniz
/// expansion; identity_error is their relative L2 difference. Ratio against
/// ||grad g||_inf ||grad^{k-1} h|| + ||grad^k g|| ||h||_inf.
InequalityReport check_commutator(int k, const EnsembleSpec& ensemble);

/// ||f||_{H^-s} / ||f||_{L^p} (or the Besov norm) on localized bumps.
/// Requires 1/2 + s/3 = 1/p (ExponentMismatch), s in [0, 3/2) for Sobolev
/// and (0, 3/2] for Besov.
InequalityReport check_embeddings(double s, double p, NegativeNorm kind, const EnsembleSpec& ensemble);

/// ||grad^l f|| / (||grad^{l+1} f||^{1-theta} ||f||_{-s}^theta), theta = 1/(l+1+s).
/// The Sobolev kind is exact; a ratio above 1 + 1e-9 throws ExactViolated.
InequalityReport check_exact_interpolation(double l, double s, NegativeNorm kind,
                                           const EnsembleSpec& ensemble);

}  // namespace emlab
