#include "consensus/nbody.hpp"

#include <cmath>
#include <exception>
#include <numeric>

#include "consensus/error.hpp"

namespace consensus {

double PhaseState::total_mass() const { return std::accumulate(m.begin(), m.end(), 0.0); }

void PhaseState::validate() const {
  const std::size_t n = m.size();
  if (x.rows() != n || v.rows() != n) throw DomainError("positions, velocities and masses differ in length");
  if (n > 0 && (x.cols() != 3 || v.cols() != 3)) throw DomainError("positions and velocities need three columns");
  for (double mk : m)
    if (!(mk > 0.0) || !std::isfinite(mk)) throw DomainError("masses must be positive");
  if (!(G > 0.0)) throw DomainError("G must be positive");
}

namespace {

[[noreturn]] void coincident(std::size_t i, std::size_t k) {
  throw SingularityError("bodies " + std::to_string(i) + " and " + std::to_string(k) + " coincide", i, k);
}

void acceleration_row(const PhaseState& p, std::size_t i, double* out) {
  out[0] = out[1] = out[2] = 0.0;
  for (std::size_t k = 0; k < p.bodies(); ++k) {
    if (k == i) continue;
    const double dx = p.x(k, 0) - p.x(i, 0);
    const double dy = p.x(k, 1) - p.x(i, 1);
    const double dz = p.x(k, 2) - p.x(i, 2);
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 == 0.0) coincident(std::min(i, k), std::max(i, k));
    const double w = p.G * p.m[k] / (r2 * std::sqrt(r2));
    out[0] += w * dx;
    out[1] += w * dy;
    out[2] += w * dz;
  }
}

}  // namespace

Matrix nbody_acceleration(const PhaseState& phase) {
  phase.validate();
  const std::size_t n = phase.bodies();
  Matrix a(n, 3);
  std::exception_ptr failure;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) {
    try {
      acceleration_row(phase, static_cast<std::size_t>(i), a.row(static_cast<std::size_t>(i)).data());
    } catch (...) {
#pragma omp critical(nbody_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) {
    // Report the lowest pair regardless of which thread hit it.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = i + 1; k < n; ++k)
        if (squared_distance(phase.x.row(i), phase.x.row(k)) == 0.0) coincident(i, k);
    std::rethrow_exception(failure);
  }
  return a;
}

Matrix reference::nbody_acceleration(const PhaseState& phase) {
  phase.validate();
  const std::size_t n = phase.bodies();
  Matrix a(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const double r2 = squared_distance(phase.x.row(i), phase.x.row(k));
      if (r2 == 0.0) coincident(std::min(i, k), std::max(i, k));
      const double w = phase.G * phase.m[k] / std::pow(r2, 1.5);
      for (std::size_t c = 0; c < 3; ++c) a(i, c) += w * (phase.x(k, c) - phase.x(i, c));
    }
  }
  return a;
}

PhaseState nbody_time_one(const PhaseState& phase, double substep) {
  if (!(substep > 0.0 && substep <= 1.0)) throw DomainError("substep must lie in (0, 1]");
  const Matrix a = nbody_acceleration(phase);
  PhaseState next = phase;
  auto xs = next.x.data();
  auto vs = next.v.data();
  const auto v0 = phase.v.data();
  const auto a0 = a.data();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] += substep * v0[i];
    vs[i] += substep * a0[i];
  }
  return next;
}

NBodyDiagnostics nbody_diagnostics(const PhaseState& phase) {
  phase.validate();
  const std::size_t n = phase.bodies();
  NBodyDiagnostics d;
  d.total_weighted_position.assign(3, 0.0);
  d.total_momentum.assign(3, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      d.total_weighted_position[c] += phase.m[i] * phase.x(i, c);
      d.total_momentum[c] += phase.m[i] * phase.v(i, c);
    }
  }
  double inertia = 0.0;
  double potential = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const double r2 = squared_distance(phase.x.row(i), phase.x.row(k));
      if (r2 == 0.0) throw SingularityError("potential undefined: bodies " + std::to_string(i) + " and " +
                                                std::to_string(k) + " coincide", i, k);
      const double mm = phase.m[i] * phase.m[k];
      inertia += mm * r2;
      potential += mm / std::sqrt(r2);
    }
  }
  d.moment_of_inertia = n > 0 ? inertia / phase.total_mass() : 0.0;
  d.potential = potential;
  return d;
}

double min_pair_distance(const Matrix& x) {
  double best = INFINITY;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = i + 1; k < x.rows(); ++k) best = std::min(best, distance(x.row(i), x.row(k)));
  return best;
}

double max_pair_distance(const Matrix& x) {
  double best = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = i + 1; k < x.rows(); ++k) best = std::max(best, distance(x.row(i), x.row(k)));
  return best;
}

NBodyRun nbody_evolve(const PhaseState& phase, std::size_t steps, double substep) {
  if (!(substep > 0.0 && substep <= 1.0)) throw DomainError("substep must lie in (0, 1]");
  phase.validate();
  NBodyRun run;
  const double floor = 1e-6 * max_pair_distance(phase.x);
  run.states.push_back(phase);
  run.diagnostics.push_back(nbody_diagnostics(phase));
  for (std::size_t s = 0; s < steps; ++s) {
    PhaseState next = nbody_time_one(run.states.back(), substep);
    const double closest = min_pair_distance(next.x);
    if (phase.bodies() > 1 && !(closest >= floor)) {
      run.truncated = true;
      run.reason = "close encounter at step " + std::to_string(s + 1) + ": distance " + std::to_string(closest) +
                   " below " + std::to_string(floor);
      break;
    }
    run.diagnostics.push_back(nbody_diagnostics(next));
    run.states.push_back(std::move(next));
  }
  return run;
}

ClusterEmbedding embed_as_clusters(const PhaseState& phase) {
  phase.validate();
  std::size_t vertices = 0;
  std::vector<std::size_t> first;
  for (double mk : phase.m) {
    if (mk != std::round(mk)) throw DomainError("cluster embedding needs integer masses");
    first.push_back(vertices);
    vertices += static_cast<std::size_t>(mk);
  }
  if (vertices < 2) throw DomainError("cluster embedding needs at least two vertices");
  Matrix u(vertices, 3);
  for (std::size_t k = 0; k < phase.bodies(); ++k) {
    for (std::size_t j = 0; j < static_cast<std::size_t>(phase.m[k]); ++j)
      for (std::size_t c = 0; c < 3; ++c) u(first[k] + j, c) = phase.x(k, c);
  }
  const double coeff = static_cast<double>(vertices - 1) * phase.G;
  return {OpinionState(std::move(u)), InfluenceModel::standard(Kernel::power_law(3.0, coeff)), std::move(first)};
}

}  // namespace consensus
