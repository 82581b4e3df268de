#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "consensus/diagnostics.hpp"
#include "consensus/model.hpp"
#include "consensus/state.hpp"

namespace consensus {

enum class EvolutionMode { Discrete, Continuous };

enum class StopReason {
  Completed,      // reached the requested step count / end time
  Consensus,      // numerically constant state
  StepUnderflow,  // integrator step collapsed
};

const char* to_string(EvolutionMode m);
const char* to_string(StopReason r);
EvolutionMode evolution_mode_from_string(const std::string& s);
StopReason stop_reason_from_string(const std::string& s);

struct IntegratorMeta {
  double tol = 0.0;
  double initial_step = 0.0;
  double max_step = std::numeric_limits<double>::infinity();
  double smallest_step = 0.0;
  double largest_step = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

// Two vertices fused into one rigid group during continuous evolution.
struct MergeEvent {
  double t = 0.0;
  std::size_t v = 0;
  std::size_t w = 0;
};

struct Trajectory {
  EvolutionMode mode = EvolutionMode::Discrete;
  std::vector<double> times;
  std::vector<OpinionState> states;
  std::vector<DiagnosticsRecord> diagnostics;
  InfluenceModel model = InfluenceModel::standard(Kernel::constant(0.0));
  IntegratorMeta integrator;  // continuous only
  StopReason stop = StopReason::Completed;
  std::vector<MergeEvent> merges;
  std::optional<double> consensus_time;
  std::size_t stride = 1;

  std::size_t size() const { return states.size(); }
};

struct DiscreteOptions {
  std::size_t stride = 1;
  bool early_stop = true;
  bool diagnostics = true;
  DiagnosticsOptions diag;
};

struct ContinuousOptions {
  std::size_t stride = 1;
  double initial_step = 0.0;  // 0 selects automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 5'000'000;
  bool merge_singular = true;
  bool diagnostics = true;
  DiagnosticsOptions diag;
};

// Synchronous rounds u <- A_u. Requires a kernel capped at one for the
// standard and normalized variants. Stops early once the oscillation falls
// below 1e-13 (1 + initial oscillation) if `early_stop` is set.
Trajectory evolve_discrete(const OpinionState& initial, const InfluenceModel& model, std::size_t steps,
                           const DiscreteOptions& options = {});

// du/dt = L_mu u by classical RK4 with step doubling; a step of size h is
// accepted when the doubling error estimate is at most tol * h. Under a
// singular kernel, pairs closer than 1e-9 (1 + initial oscillation), or pairs
// that cross within a step, are fused into rigid groups.
Trajectory evolve_continuous(const OpinionState& initial, const InfluenceModel& model, double t_end, double tol,
                             const ContinuousOptions& options = {});

}  // namespace consensus
