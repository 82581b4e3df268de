#include "consensus/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "consensus/error.hpp"
#include "consensus/operators.hpp"

namespace consensus {

const char* to_string(EvolutionMode m) { return m == EvolutionMode::Discrete ? "discrete" : "continuous"; }

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Completed:
      return "completed";
    case StopReason::Consensus:
      return "consensus";
    case StopReason::StepUnderflow:
      return "step_underflow";
  }
  return "unknown";
}

EvolutionMode evolution_mode_from_string(const std::string& s) {
  if (s == "discrete") return EvolutionMode::Discrete;
  if (s == "continuous") return EvolutionMode::Continuous;
  throw DomainError("unknown evolution mode '" + s + "'");
}

StopReason stop_reason_from_string(const std::string& s) {
  if (s == "completed") return StopReason::Completed;
  if (s == "consensus") return StopReason::Consensus;
  if (s == "step_underflow") return StopReason::StepUnderflow;
  throw DomainError("unknown stop reason '" + s + "'");
}

Trajectory evolve_discrete(const OpinionState& initial, const InfluenceModel& model, std::size_t steps,
                           const DiscreteOptions& options) {
  model.check_consistent();
  if (model.variant != ModelVariant::RankDependent && !model.kernel.cap_at_one())
    throw DomainError("discrete evolution requires a kernel capped at one");
  if (options.stride == 0) throw DomainError("stride must be positive");

  Trajectory traj;
  traj.mode = EvolutionMode::Discrete;
  traj.model = model;
  traj.stride = options.stride;

  const double stop_osc = 1e-13 * (1.0 + grad_sup_norm(initial));
  OpinionState current = initial;
  traj.times.push_back(0.0);
  traj.states.push_back(current);
  for (std::size_t t = 1; t <= steps; ++t) {
    current = time_one_map(current, model);
    const bool converged = options.early_stop && grad_sup_norm(current) < stop_osc;
    if (t % options.stride == 0 || t == steps || converged) {
      traj.times.push_back(static_cast<double>(t));
      traj.states.push_back(current);
    }
    if (converged) {
      traj.stop = StopReason::Consensus;
      traj.consensus_time = static_cast<double>(t);
      break;
    }
  }
  if (options.diagnostics) traj.diagnostics = compute_diagnostics(traj.states, traj.times, model, options.diag);
  return traj;
}

namespace {

struct Groups {
  std::vector<std::size_t> parent;

  explicit Groups(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
  std::vector<std::size_t> labels() {
    std::vector<std::size_t> out(parent.size());
    for (std::size_t i = 0; i < parent.size(); ++i) out[i] = find(i);
    return out;
  }
  std::size_t count() {
    std::size_t c = 0;
    for (std::size_t i = 0; i < parent.size(); ++i) c += (find(i) == i);
    return c;
  }
};

class Rhs {
 public:
  Rhs(const InfluenceModel& model, bool grouped) : model_(model), grouped_(grouped) {}

  void set_labels(std::vector<std::size_t> labels) { labels_ = std::move(labels); }

  void operator()(const Matrix& y, Matrix& out) const {
    if (!grouped_) {
      detail::apply_L_into(y, model_, {}, out);
      return;
    }
    detail::apply_L_into(y, model_, labels_, out);
    // A fused group moves with its mean velocity.
    const std::size_t rows = y.rows();
    std::vector<std::size_t> count(rows, 0);
    Matrix mean(rows, y.cols(), 0.0);
    for (std::size_t v = 0; v < rows; ++v) {
      ++count[labels_[v]];
      for (std::size_t i = 0; i < y.cols(); ++i) mean(labels_[v], i) += out(v, i);
    }
    for (std::size_t v = 0; v < rows; ++v) {
      const std::size_t g = labels_[v];
      if (count[g] < 2) continue;
      for (std::size_t i = 0; i < y.cols(); ++i) out(v, i) = mean(g, i) / static_cast<double>(count[g]);
    }
  }

 private:
  const InfluenceModel& model_;
  bool grouped_;
  std::vector<std::size_t> labels_;
};

void axpy(const Matrix& y, double h, const Matrix& k, Matrix& out) {
  out = y;
  auto dst = out.data();
  auto src = k.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += h * src[i];
}

// One classical RK4 step of size h; k1 = f(y) is supplied by the caller.
Matrix rk4_step(const Rhs& f, const Matrix& y, const Matrix& k1, double h) {
  Matrix k2, k3, k4, tmp;
  axpy(y, 0.5 * h, k1, tmp);
  f(tmp, k2);
  axpy(y, 0.5 * h, k2, tmp);
  f(tmp, k3);
  axpy(y, h, k3, tmp);
  f(tmp, k4);
  Matrix out = y;
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] += h / 6.0 * (k1.data()[i] + 2.0 * k2.data()[i] + 2.0 * k3.data()[i] + k4.data()[i]);
  }
  return out;
}

Matrix rk4_step(const Rhs& f, const Matrix& y, double h) {
  Matrix k1;
  f(y, k1);
  return rk4_step(f, y, k1, h);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double diff = std::abs(a.data()[i] - b.data()[i]);
    if (!std::isfinite(diff)) return std::numeric_limits<double>::infinity();
    m = std::max(m, diff);
  }
  return m;
}

// Snap every fused group onto its mean position.
void snap_groups(Matrix& y, const std::vector<std::size_t>& labels) {
  const std::size_t rows = y.rows();
  std::vector<std::size_t> count(rows, 0);
  Matrix mean(rows, y.cols(), 0.0);
  for (std::size_t v = 0; v < rows; ++v) {
    ++count[labels[v]];
    for (std::size_t i = 0; i < y.cols(); ++i) mean(labels[v], i) += y(v, i);
  }
  for (std::size_t v = 0; v < rows; ++v) {
    const std::size_t g = labels[v];
    if (count[g] < 2) continue;
    for (std::size_t i = 0; i < y.cols(); ++i) y(v, i) = mean(g, i) / static_cast<double>(count[g]);
  }
}

// Time at which v and w would meet if both kept their current velocity along
// the line joining them; infinite for separating pairs.
double pair_contact(const Matrix& y, const Matrix& velocity, std::size_t v, std::size_t w) {
  double sq = 0.0;
  double rate = 0.0;
  for (std::size_t i = 0; i < y.cols(); ++i) {
    const double diff = y(w, i) - y(v, i);
    sq += diff * diff;
    rate += diff * (velocity(w, i) - velocity(v, i));
  }
  return rate < 0.0 ? -sq / rate : std::numeric_limits<double>::infinity();
}

double first_contact(const Matrix& y, const Matrix& velocity, const std::vector<std::size_t>& labels) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < y.rows(); ++v) {
    for (std::size_t w = v + 1; w < y.rows(); ++w) {
      if (labels[v] != labels[w]) best = std::min(best, pair_contact(y, velocity, v, w));
    }
  }
  return best;
}

}  // namespace

Trajectory evolve_continuous(const OpinionState& initial, const InfluenceModel& model, double t_end, double tol,
                             const ContinuousOptions& options) {
  model.check_consistent();
  if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
  if (!(tol > 1e-12 && tol < 1e-2)) throw DomainError("tol must lie in (1e-12, 1e-2)");
  if (options.stride == 0) throw DomainError("stride must be positive");

  Trajectory traj;
  traj.mode = EvolutionMode::Continuous;
  traj.model = model;
  traj.stride = options.stride;
  traj.integrator.tol = tol;
  traj.integrator.max_step = options.max_step;

  const std::size_t rows = initial.vertices();
  const double osc0 = grad_sup_norm(initial);
  const double merge_radius = 1e-9 * (1.0 + osc0);
  const bool merging = options.merge_singular && model.variant != ModelVariant::RankDependent &&
                       model.kernel.singular_at_zero();

  Groups groups(rows);
  Rhs rhs(model, merging);
  if (merging) rhs.set_labels(groups.labels());

  Matrix y = initial.values();
  double t = 0.0;
  double h = options.initial_step > 0.0 ? options.initial_step : std::min({t_end, options.max_step, 1e-2});
  traj.integrator.initial_step = h;
  traj.integrator.smallest_step = std::numeric_limits<double>::infinity();
  traj.times.push_back(0.0);
  traj.states.emplace_back(y);

  // Merge pairs closer than the radius, or whose difference vector reversed
  // during the last step.
  auto merge_pass = [&](const Matrix& before, Matrix& after) {
    bool changed = false;
    for (std::size_t v = 0; v < rows; ++v) {
      for (std::size_t w = v + 1; w < rows; ++w) {
        if (groups.find(v) == groups.find(w)) continue;
        double cross = 0.0;
        double sq = 0.0;
        for (std::size_t i = 0; i < y.cols(); ++i) {
          const double d_old = before(w, i) - before(v, i);
          const double d_new = after(w, i) - after(v, i);
          cross += d_old * d_new;
          sq += d_new * d_new;
        }
        if (std::sqrt(sq) < merge_radius || cross <= 0.0) {
          groups.unite(v, w);
          traj.merges.push_back({t, v, w});
          changed = true;
        }
      }
    }
    if (changed) {
      auto labels = groups.labels();
      snap_groups(after, labels);
      rhs.set_labels(std::move(labels));
    }
    return changed;
  };

  // Fuse pairs that would meet within a negligible time at current speed.
  auto merge_imminent = [&](const Matrix& velocity) {
    const double horizon = 1e-12 * (1.0 + t);
    bool changed = false;
    for (std::size_t v = 0; v < rows; ++v) {
      for (std::size_t w = v + 1; w < rows; ++w) {
        if (groups.find(v) == groups.find(w)) continue;
        if (pair_contact(y, velocity, v, w) <= horizon) {
          groups.unite(v, w);
          traj.merges.push_back({t, v, w});
          changed = true;
        }
      }
    }
    if (changed) {
      auto labels = groups.labels();
      snap_groups(y, labels);
      rhs.set_labels(std::move(labels));
    }
    return changed;
  };

  auto merge_closest = [&](const Matrix& velocity) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bv = 0;
    std::size_t bw = 0;
    for (std::size_t v = 0; v < rows; ++v) {
      for (std::size_t w = v + 1; w < rows; ++w) {
        if (groups.find(v) == groups.find(w)) continue;
        const double c = pair_contact(y, velocity, v, w);
        if (c < best) {
          best = c;
          bv = v;
          bw = w;
        }
      }
    }
    if (!std::isfinite(best)) return false;
    groups.unite(bv, bw);
    traj.merges.push_back({t, bv, bw});
    auto labels = groups.labels();
    snap_groups(y, labels);
    rhs.set_labels(std::move(labels));
    return true;
  };

  if (merging) {
    Matrix snapped = y;
    if (merge_pass(y, snapped)) y = snapped;
    traj.states.back() = OpinionState(y);
  }

  std::size_t accepted = 0;
  bool consensus = merging && groups.count() == 1;
  while (!consensus && t < t_end) {
    if (accepted + traj.integrator.rejected >= options.max_steps) {
      traj.stop = StopReason::StepUnderflow;
      break;
    }
    Matrix k1;
    rhs(y, k1);
    if (merging && merge_imminent(k1)) {
      rhs(y, k1);
      consensus = groups.count() == 1;
      if (consensus) {
        traj.times.push_back(t);
        traj.states.emplace_back(y);
        traj.stop = StopReason::Consensus;
        traj.consensus_time = t;
        break;
      }
    }
    if (merging && h < 1e-11 * (1.0 + t) && merge_closest(k1)) {
      // The controller stalled on a singular collision: fuse the pair that
      // meets first and restart the step size.
      rhs(y, k1);
      h = std::min({options.max_step, t_end - t, 1e-3 * (1.0 + t)});
      consensus = groups.count() == 1;
      if (consensus) {
        traj.times.push_back(t);
        traj.states.emplace_back(y);
        traj.stop = StopReason::Consensus;
        traj.consensus_time = t;
        break;
      }
    }
    double step = std::min(h, t_end - t);
    bool limited = false;
    if (merging) {
      // Stop at a tenth of the first predicted contact so that no stage sees
      // the sign change of a colliding pair.
      const double contact = 0.1 * first_contact(y, k1, groups.labels());
      if (contact < step) {
        step = contact;
        limited = true;
      }
    }
    const bool last = !limited && h >= t_end - t;
    const Matrix full = rk4_step(rhs, y, k1, step);
    const Matrix half = rk4_step(rhs, rk4_step(rhs, y, k1, 0.5 * step), 0.5 * step);
    const double err = max_abs_diff(full, half) / 15.0;

    if (err <= tol * step) {
      Matrix next = half;
      t = last ? t_end : t + step;
      ++accepted;
      traj.integrator.smallest_step = std::min(traj.integrator.smallest_step, step);
      traj.integrator.largest_step = std::max(traj.integrator.largest_step, step);
      if (merging) {
        merge_pass(y, next);
        consensus = groups.count() == 1;
      }
      y = std::move(next);
      if (accepted % options.stride == 0 || t >= t_end || consensus) {
        traj.times.push_back(t);
        traj.states.emplace_back(y);
      }
      if (consensus) {
        traj.stop = StopReason::Consensus;
        traj.consensus_time = t;
      }
    } else {
      ++traj.integrator.rejected;
    }

    const double factor = (err == 0.0) ? 4.0 : std::clamp(0.9 * std::pow(tol * step / err, 0.25), 0.2, 4.0);
    const double next_h = std::min(step * factor, options.max_step);
    // A step shortened by the end time or a contact keeps the controller's
    // step for the next attempt.
    h = ((last || limited) && err <= tol * step) ? h : next_h;
    if (!(std::min(h, step) > 1e-14 * (1.0 + t))) {
      traj.stop = StopReason::StepUnderflow;
      break;
    }
  }
  traj.integrator.accepted = accepted;
  if (!std::isfinite(traj.integrator.smallest_step)) traj.integrator.smallest_step = 0.0;
  if (options.diagnostics) traj.diagnostics = compute_diagnostics(traj.states, traj.times, model, options.diag);
  return traj;
}

}  // namespace consensus
