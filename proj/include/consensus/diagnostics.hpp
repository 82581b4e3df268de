#pragma once

#include <map>
#include <optional>
#include <vector>

#include "consensus/model.hpp"
#include "consensus/state.hpp"

namespace consensus {

// Scalar functionals of one state at time t.
struct DiagnosticsRecord {
  double t = 0.0;
  Vector max_per_coord;
  Vector min_per_coord;
  double osc = 0.0;
  Vector mean;
  double variance = 0.0;
  double l2_sq = 0.0;
  double energy_rho = 0.0;
  std::optional<double> energy_sigma;
  std::optional<double> entropy;
  std::map<double, double> renyi;
  std::optional<double> I_alpha;
};

struct DiagnosticsOptions {
  std::vector<double> renyi_alphas{0.5, 2.0, 5.0};
  bool sigma_energy = true;
};

DiagnosticsRecord compute_diagnostics(const OpinionState& u, double t, const InfluenceModel& model,
                                      const DiagnosticsOptions& options = {});

// One record per state, computed in parallel over the time index.
std::vector<DiagnosticsRecord> compute_diagnostics(const std::vector<OpinionState>& states,
                                                   const std::vector<double>& times, const InfluenceModel& model,
                                                   const DiagnosticsOptions& options = {});

// ||grad u||^2_{2,sigma} with sigma derived from the model kernel; absent when
// sigma is not defined (power kernels with alpha >= 2).
std::optional<double> sigma_energy(const OpinionState& u, const Kernel& kernel);

}  // namespace consensus
