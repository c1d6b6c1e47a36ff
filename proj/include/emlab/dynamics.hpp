#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "emlab/error.hpp"
#include "emlab/model.hpp"

namespace emlab {

struct SolverConfig {
  double dt = 0.0;          // <= 0 selects cfl_dt of the initial state
  double cfl = 0.5;
  double end_time = 1.0;
  bool dealias = true;
  int gauss_projection_every = 50;  // 0 disables projection
  int output_stride = 10;
  double gauss_tol = 1e-6;

  void validate() const;
};

/// Time derivative of the reformulated system. Linear terms are spectral
/// multipliers; products are formed on the grid from 2/3-truncated inputs and
/// the result is truncated again.
PerturbationState rhs(const PerturbationState& state, const PhysicalConstants& constants,
                      bool dealias_products = true);

/// Linear part of rhs only (the mode-matrix action).
PerturbationState linear_rhs(const PerturbationState& state, const PhysicalConstants& constants);

/// One classical RK4 step.
PerturbationState step(const PerturbationState& state, double dt, const PhysicalConstants& constants,
                       bool dealias_products = true);

/// c / (k_max (1 + nu + ||u||_inf + ||n||_inf)).
double cfl_dt(const PerturbationState& state, const PhysicalConstants& constants, double c_cfl = 0.5);

/// Wraparound horizon L / 4 for unit wave speeds.
double wraparound_horizon(const Grid& grid);

struct StepInfo {
  long step = 0;
  double dt = 0.0;
  bool final = false;
};

using Observer = std::function<void(const PerturbationState&, const StepInfo&)>;

struct ProjectionRecord {
  long step = 0;
  double time = 0.0;
  double residual_before = 0.0;
};

struct SimulationResult {
  PerturbationState final_state;
  long steps = 0;
  double dt = 0.0;
  double horizon = 0.0;
  std::vector<ProjectionRecord> projections;
  std::vector<std::string> warnings;
};

/// Raised when the state stops being finite or positive; carries the last
/// state that was.
class SolverFailure : public Error {
 public:
  SolverFailure(ErrorCode code, const std::string& message, PerturbationState last_good)
      : Error(code, message), last_good_(std::make_shared<PerturbationState>(std::move(last_good))) {}
  const PerturbationState& last_good() const noexcept { return *last_good_; }

 private:
  std::shared_ptr<PerturbationState> last_good_;
};

/// Integrates to config.end_time. The observer sees the initial state, every
/// output_stride-th step and the final state.
SimulationResult simulate(const PerturbationState& initial, const SolverConfig& config,
                          const PhysicalConstants& constants, const Observer& observer = {});

}  // namespace emlab
