#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emlab/analysis.hpp"
#include "emlab/dynamics.hpp"
#include "emlab/energetics.hpp"
#include "emlab/inequality_lab.hpp"
#include "emlab/linear.hpp"
#include "emlab/model.hpp"

namespace emlab::cli {

enum class Experiment { Simulate, Linear, Inequalities, Fit };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

struct GridConfig {
  int points = 32;
  double box_length = 40.0;
};

/// Negative-index data class. Either s or p may be given; when both are,
/// they must satisfy s = 3 (1/p - 1/2).
struct DataClass {
  double s = 1.5;
  std::optional<double> p;
};

struct InequalitySuite {
  int trials = 500;
  int points = 32;
  double box_length = 6.283185307179586;

  struct Gn {
    double p = 2.0;
    int alpha = 0;
    double m = 0.0;
    double l = 0.0;
  };
  std::vector<Gn> gn;
  std::vector<int> f_k{0, 1, 2, 3};
  double f_gamma = 5.0 / 3.0;
  double f_amplitude = 0.05;
  std::vector<int> commutator_k{1, 2, 3};

  struct Embedding {
    NegativeNorm kind = NegativeNorm::Sobolev;
    double s = 0.0;
  };
  std::vector<Embedding> embeddings;

  struct Interpolation {
    NegativeNorm kind = NegativeNorm::Sobolev;
    double l = 0.0;
    double s = 1.0;
  };
  std::vector<Interpolation> interpolation;

  /// Fills the default cases for every lemma.
  InequalitySuite();
};

struct FitConfig {
  std::string csv;
  std::string time_column = "time";
  /// Empty fits every column except the time column.
  std::vector<std::string> columns;
  FitWindow window{20.0, 500.0};
  double floor = -1.0;
  std::map<std::string, double> targets;
  double tolerance = 0.1;
};

struct RunConfig {
  Experiment experiment = Experiment::Simulate;
  std::uint64_t seed = 1;
  std::string output = "out";
  bool plot_script = true;
  GridConfig grid;
  PhysicalConstants constants;
  DataClass data;
  InitialDataSpec initial;
  SolverConfig solver;
  MonitorSpec monitor;
  LinearReportConfig linear;
  InequalitySuite inequalities;
  FitConfig fit;

  RunConfig();

  /// Copies seed and s into the module-level structs and checks ranges.
  void resolve();
};

/// Parses YAML (JSON is accepted too). Unknown keys and type errors throw
/// Error(Config) naming the key path and line.
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::filesystem::path& path);

/// Every setting with defaults filled in; parse_config accepts it back.
nlohmann::json resolved_json(const RunConfig& config);

}  // namespace emlab::cli
