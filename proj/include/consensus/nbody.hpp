#pragma once

#include <optional>
#include <string>
#include <vector>

#include "consensus/matrix.hpp"
#include "consensus/model.hpp"
#include "consensus/state.hpp"

namespace consensus {

// N bodies in R^3. Rows of x and v are bodies.
struct PhaseState {
  Matrix x;
  Matrix v;
  std::vector<double> m;
  double G = 1.0;

  std::size_t bodies() const { return m.size(); }
  double total_mass() const;
  // Throws DomainError on shape mismatch, non-positive masses or G.
  void validate() const;
};

struct NBodyDiagnostics {
  Vector total_weighted_position;  // sum m_k x_k
  Vector total_momentum;           // sum m_k v_k
  double moment_of_inertia = 0.0;  // (1/M) sum_{i<j} m_i m_j |x_i - x_j|^2
  double potential = 0.0;          // sum_{i<j} m_i m_j / |x_i - x_j|
};

// a_i = G sum_{k != i} m_k (x_k - x_i) / |x_k - x_i|^3, rows in parallel.
// Throws SingularityError naming the first coincident pair.
Matrix nbody_acceleration(const PhaseState& phase);

// (x, v) -> (x + h v, v + h a(x)); h = 1 is the unit-step map.
PhaseState nbody_time_one(const PhaseState& phase, double substep = 1.0);

NBodyDiagnostics nbody_diagnostics(const PhaseState& phase);

struct NBodyRun {
  std::vector<PhaseState> states;
  std::vector<NBodyDiagnostics> diagnostics;
  bool truncated = false;
  std::string reason;
};

// Applies the substep map `steps` times. Stops early when the smallest
// pairwise distance falls below 1e-6 times the initial largest pairwise
// distance.
NBodyRun nbody_evolve(const PhaseState& phase, std::size_t steps, double substep = 1.0);

double min_pair_distance(const Matrix& x);
double max_pair_distance(const Matrix& x);

// Each body k becomes m_k coincident vertices (integer masses only); the
// kernel is rho(s) = (M - 1) G s^-3 on the complete graph with M vertices.
struct ClusterEmbedding {
  OpinionState state;
  InfluenceModel model;
  std::vector<std::size_t> first_vertex;  // first vertex of each body
};
ClusterEmbedding embed_as_clusters(const PhaseState& phase);

namespace reference {
Matrix nbody_acceleration(const PhaseState& phase);
}

}  // namespace consensus
