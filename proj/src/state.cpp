#include "consensus/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "consensus/error.hpp"

namespace consensus {

OpinionState::OpinionState(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 2) throw DomainError("opinion state needs at least two vertices (d >= 1)");
  if (values_.cols() < 1) throw DomainError("opinion state needs dimension n >= 1");
  for (double x : values_.data()) {
    if (!std::isfinite(x)) throw DomainError("opinion state entries must be finite");
  }
}

Vector average(const OpinionState& u) {
  Vector mean(u.n(), 0.0);
  for (std::size_t v = 0; v < u.vertices(); ++v) {
    for (std::size_t i = 0; i < u.n(); ++i) mean[i] += u(v, i);
  }
  for (double& m : mean) m /= static_cast<double>(u.vertices());
  return mean;
}

double centered_l2_squared(const OpinionState& u) {
  const Vector mean = average(u);
  double acc = 0.0;
  for (std::size_t v = 0; v < u.vertices(); ++v) acc += squared_distance(u.row(v), mean);
  return acc;
}

double variance(const OpinionState& u) { return centered_l2_squared(u) / static_cast<double>(u.vertices()); }

double l2_squared(const OpinionState& u) { return squared_norm(u.values()); }

double grad_sup_norm(const OpinionState& u) {
  double best = 0.0;
  for (std::size_t v = 0; v < u.vertices(); ++v) {
    for (std::size_t w = v + 1; w < u.vertices(); ++w) best = std::max(best, squared_distance(u.row(v), u.row(w)));
  }
  return std::sqrt(best);
}

double max_deviation_from_mean(const OpinionState& u) {
  const Vector mean = average(u);
  double best = 0.0;
  for (std::size_t v = 0; v < u.vertices(); ++v) best = std::max(best, squared_distance(u.row(v), mean));
  return std::sqrt(best);
}

double max_row_norm(const OpinionState& u) {
  double best = 0.0;
  for (std::size_t v = 0; v < u.vertices(); ++v) best = std::max(best, norm(u.row(v)));
  return best;
}

Vector max_per_coord(const OpinionState& u) {
  Vector out(u.row(0).begin(), u.row(0).end());
  for (std::size_t v = 1; v < u.vertices(); ++v) {
    for (std::size_t i = 0; i < u.n(); ++i) out[i] = std::max(out[i], u(v, i));
  }
  return out;
}

Vector min_per_coord(const OpinionState& u) {
  Vector out(u.row(0).begin(), u.row(0).end());
  for (std::size_t v = 1; v < u.vertices(); ++v) {
    for (std::size_t i = 0; i < u.n(); ++i) out[i] = std::min(out[i], u(v, i));
  }
  return out;
}

double weighted_energy(const OpinionState& u, const WeightFn& weight) {
  double acc = 0.0;
  for (std::size_t v = 0; v < u.vertices(); ++v) {
    for (std::size_t w = v + 1; w < u.vertices(); ++w) {
      const double sq = squared_distance(u.row(v), u.row(w));
      if (sq == 0.0) continue;
      acc += sq * weight(std::sqrt(sq));
    }
  }
  return acc / static_cast<double>(u.d());
}

double weighted_energy(const OpinionState& u, const Kernel& kernel) {
  return weighted_energy(u, [&](double s) { return kernel(s); });
}

double squared_kernel_energy(const OpinionState& u, const Kernel& kernel) {
  return weighted_energy(u, [&](double s) {
    const double r = kernel(s);
    return r * r;
  });
}

bool is_positive_scalar(const OpinionState& u) {
  if (u.n() != 1) return false;
  return std::all_of(u.values().data().begin(), u.values().data().end(), [](double x) { return x > 0.0; });
}

namespace {
void require_positive_scalar(const OpinionState& u, const char* what) {
  if (u.n() != 1) throw DomainError(std::string(what) + " is defined for scalar states only");
  if (!is_positive_scalar(u)) throw DomainError(std::string(what) + " requires strictly positive values");
}
}  // namespace

double entropy(const OpinionState& u) {
  require_positive_scalar(u, "entropy");
  double acc = 0.0;
  for (double x : u.values().data()) acc -= x * std::log(x);
  return acc;
}

double power_sum(const OpinionState& u, double alpha) {
  require_positive_scalar(u, "power sum");
  double acc = 0.0;
  for (double x : u.values().data()) acc += std::pow(x, alpha);
  return acc;
}

double renyi_entropy(const OpinionState& u, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("Renyi entropy requires alpha > 0");
  if (alpha == 1.0) throw DomainError("Renyi entropy undefined at alpha = 1; use entropy");
  return std::log(power_sum(u, alpha)) / (1.0 - alpha);
}

}  // namespace consensus
