#pragma once

#include <optional>
#include <vector>

#include "consensus/evolution.hpp"
#include "consensus/kernel.hpp"
#include "consensus/matrix.hpp"
#include "consensus/state.hpp"

namespace consensus {

using Members = std::vector<std::size_t>;

struct ClusterSpec {
  Members members;  // sorted, 0-based
  std::size_t d0 = 0;  // members.size() - 1
  double internal_osc = 0.0;
  double dist_to_rest = 0.0;
  double lambda = 0.0;  // +inf when internal_osc == 0
};

// Throws DomainError for an empty or full subset, or an out-of-range index.
ClusterSpec cluster_metrics(const OpinionState& u, const Members& members);

// Single-linkage partition with the largest threshold theta for which every
// cross-block distance exceeds gap_ratio * theta. One block when no such
// threshold exists. Blocks are sorted by their smallest member.
std::vector<Members> detect_clusters(const OpinionState& u, double gap_ratio);

struct ContractionStep {
  double g = 0.0;      // internal oscillation at t
  double h = 0.0;      // distance to the rest at t
  double g_next = 0.0;
  double h_next = 0.0;
  std::optional<double> kappa_step;  // g / g_next, absent when unresolved
  bool resolved = false;             // g above the rounding floor
};

struct ContractionReport {
  std::vector<ContractionStep> per_step;
  double kappa_min = 0.0;  // over resolved steps; +inf if none
  std::vector<bool> cluster_preserved;
  bool degenerate = false;  // internal_osc == 0 at the start
};

// Oscillation below this is treated as zero on the cluster: 64 eps times the
// largest row norm of the state.
double cluster_noise_floor(const OpinionState& u);

// Requires a discrete trajectory with stride 1 and more than two members.
ContractionReport track_cluster_contraction(const Trajectory& trajectory, const Members& members);

// Own-cluster part A0 of the time-one map, one row per member:
// u(v) + (1/d) sum_{w in members} (u(w) - u(v)) rho(|u(w) - u(v)|).
Matrix cluster_inner_map(const OpinionState& u, const Kernel& kernel, const Members& members);
// Outside part of the time-one map, one row per member:
// (1/d) sum_{w not in members} (u(w) - u(v)) rho(|u(w) - u(v)|).
Matrix cluster_outer_term(const OpinionState& u, const Kernel& kernel, const Members& members);

// Lipschitz factor of the outside term on the cluster:
// (d - d0)/d (C + 1) rho(dist_to_rest).
double outer_term_lipschitz_bound(const OpinionState& u, const Kernel& kernel, const Members& members, double C);
// Bound on the oscillation of A0 over the cluster:
// (1 - rho(g) (d0 - 1)/(2d)) g with g the internal oscillation.
double inner_map_gradient_bound(const OpinionState& u, const Kernel& kernel, const Members& members);

}  // namespace consensus
