#include "consensus/diagnostics.hpp"

#include <cmath>
#include <exception>

#include "consensus/error.hpp"

namespace consensus {

std::optional<double> sigma_energy(const OpinionState& u, const Kernel& kernel) {
  try {
    return weighted_energy(u, [&](double s) { return sigma_from_rho(kernel, s); });
  } catch (const UnsupportedError&) {
    return std::nullopt;
  }
}

DiagnosticsRecord compute_diagnostics(const OpinionState& u, double t, const InfluenceModel& model,
                                      const DiagnosticsOptions& options) {
  DiagnosticsRecord rec;
  rec.t = t;
  rec.max_per_coord = max_per_coord(u);
  rec.min_per_coord = min_per_coord(u);
  rec.osc = grad_sup_norm(u);
  rec.mean = average(u);
  rec.variance = variance(u);
  rec.l2_sq = l2_squared(u);
  rec.energy_rho = weighted_energy(u, model.kernel);
  if (options.sigma_energy && model.symmetric()) rec.energy_sigma = sigma_energy(u, model.kernel);
  if (is_positive_scalar(u)) {
    rec.entropy = entropy(u);
    for (double a : options.renyi_alphas) {
      if (a > 0.0 && a != 1.0) rec.renyi[a] = renyi_entropy(u, a);
    }
  }
  if (const auto alpha = model.kernel.power_exponent(); alpha && *alpha > 0.0 && *alpha < 2.0) {
    rec.I_alpha = std::pow(rec.variance, *alpha / 2.0);
  }
  return rec;
}

std::vector<DiagnosticsRecord> compute_diagnostics(const std::vector<OpinionState>& states,
                                                   const std::vector<double>& times, const InfluenceModel& model,
                                                   const DiagnosticsOptions& options) {
  std::vector<DiagnosticsRecord> out(states.size());
  const long long count = static_cast<long long>(states.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long long k = 0; k < count; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      out[i] = compute_diagnostics(states[i], times[i], model, options);
    } catch (...) {
#pragma omp critical(diagnostics_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace consensus
