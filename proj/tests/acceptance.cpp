// Acceptance checks; one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "consensus/bounds.hpp"
#include "consensus/clusters.hpp"
#include "consensus/evolution.hpp"
#include "consensus/nbody.hpp"
#include "consensus/operators.hpp"
#include "consensus/state.hpp"

using namespace consensus;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const Outcome& o) {
  std::printf("%s %2d %-34s %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, static_cast<double>(args)...);
  return buf;
}

OpinionState random_state(std::mt19937_64& rng, std::size_t vertices, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(vertices, n);
  for (double& x : m.data()) x = u(rng);
  return OpinionState(std::move(m));
}

struct Instance {
  OpinionState u;
  InfluenceModel model;
  double a;  // lower bound of rho on all occurring distances
};

// Distances never exceed the initial oscillation, so for a nonincreasing
// kernel a = rho(osc0) is a valid lower bound along the whole trajectory.
std::vector<Instance> contraction_instances() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> dd(2, 20), nn(1, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Instance> out;
  for (int i = 0; i < 200; ++i) {
    const std::size_t d = dd(rng), n = nn(rng);
    OpinionState u = random_state(rng, d + 1, n, -1.0, 1.0);
    if (i % 2 == 0) {
      const double a = 0.05 + 0.95 * unit(rng);
      out.push_back({u, InfluenceModel::standard(Kernel::constant(a)), a});
    } else {
      const Kernel k = Kernel::clamped_power(0.2 + 0.8 * unit(rng), 0.2 + 1.6 * unit(rng));
      const double a = k(grad_sup_norm(u));
      out.push_back({u, InfluenceModel::standard(k), a});
    }
  }
  return out;
}

// 1. |grad u(t)|_inf <= e^{-a t (d-1)/d} |grad u(0)|_inf, t <= 50.
Outcome criterion_gradient_decay(const std::vector<Instance>& instances) {
  const auto start = Clock::now();
  Outcome o;
  double worst = -INFINITY;
  std::size_t checks = 0;
  for (const auto& in : instances) {
    const Trajectory tr = evolve_discrete(in.u, in.model, 50, {.early_stop = false, .diagnostics = false});
    const double d = static_cast<double>(in.u.d());
    const double g0 = grad_sup_norm(in.u);
    for (std::size_t t = 0; t < tr.size(); ++t) {
      const double bound = std::exp(-in.a * tr.times[t] * (d - 1.0) / d) * g0;
      const double excess = grad_sup_norm(tr.states[t]) - bound;
      worst = std::max(worst, excess);
      ++checks;
      if (excess > 1e-10) o.pass = false;
    }
  }
  const double secs = seconds_since(start);
  if (secs >= 10.0) o.pass = false;
  o.detail = fmt("200 instances, %.0f checks, max(measured - bound) = %.3g (slack 1e-10), %.2f s (< 10 s)", double(checks),
                 worst, secs);
  return o;
}

// 2. d = 2, rho = 1, u = (0, 0, 3): ratio 0.5 = (1 - a/d)^{d-1} per step.
Outcome criterion_tightness() {
  Outcome o;
  Matrix m = Matrix::from_rows({{0}, {0}, {3}});
  const Trajectory tr =
      evolve_discrete(OpinionState(m), InfluenceModel::standard(Kernel::constant(1.0)), 20, {.early_stop = false});
  const double target = grad_decay_pre_exponential(1.0, 2);
  double worst = 0.0;
  for (std::size_t t = 1; t < tr.size(); ++t) {
    const double ratio = grad_sup_norm(tr.states[t]) / grad_sup_norm(tr.states[t - 1]);
    worst = std::max(worst, std::abs(ratio - 0.5));
  }
  if (std::abs(target - 0.5) > 1e-12 || worst > 1e-12) o.pass = false;
  o.detail = fmt("(1-a/d)^{d-1} = %.12g, max |ratio - 0.5| over 20 steps = %.3g (tol 1e-12)", target, worst);
  return o;
}

// 3. Average conservation and max/min monotonicity per step; normalized
// weights make the certificate not applicable.
Outcome criterion_conservation(const std::vector<Instance>& instances) {
  Outcome o;
  double worst_avg = 0.0, worst_mono = 0.0;
  for (const auto& in : instances) {
    const Trajectory tr = evolve_discrete(in.u, in.model, 50, {.early_stop = false, .diagnostics = false});
    for (std::size_t t = 1; t < tr.size(); ++t) {
      const Vector a0 = average(tr.states[t - 1]), a1 = average(tr.states[t]);
      const Vector hi0 = max_per_coord(tr.states[t - 1]), hi1 = max_per_coord(tr.states[t]);
      const Vector lo0 = min_per_coord(tr.states[t - 1]), lo1 = min_per_coord(tr.states[t]);
      for (std::size_t i = 0; i < a0.size(); ++i) {
        const double dev = std::abs(a1[i] - a0[i]) / (1.0 + std::abs(a0[i]));
        worst_avg = std::max(worst_avg, dev);
        worst_mono = std::max({worst_mono, hi1[i] - hi0[i], lo0[i] - lo1[i]});
      }
    }
  }
  if (worst_avg > 1e-12 || worst_mono > 1e-12) o.pass = false;

  std::mt19937_64 rng(77);
  std::size_t routed = 0, total = 0;
  for (int i = 0; i < 20; ++i) {
    const OpinionState u = random_state(rng, 3 + i % 6, 1 + i % 3, -1.0, 1.0);
    const Trajectory tr = evolve_discrete(u, InfluenceModel::normalized(Kernel::clamped_power(0.5, 1.0)), 10);
    const CertificateReport r = verify_trajectory_certificates(tr);
    const CertificateEntry* e = r.find("average_conservation");
    ++total;
    if (e && e->status == CertStatus::NotApplicable) ++routed;
  }
  if (routed != total) o.pass = false;
  o.detail = fmt("max avg drift %.3g, max monotonicity violation %.3g (tol 1e-12); normalized routed n/a %.0f/%.0f",
                 worst_avg, worst_mono, double(routed), double(total));
  return o;
}

// Time-one map straight from the recursive definition
// f(v, t+1) = (1/d) sum_w [f(v)(1 - mu) + f(w) mu].
Matrix brute_force_step(const OpinionState& u, const std::function<double(double)>& rho) {
  const std::size_t V = u.vertices(), n = u.n();
  const double d = static_cast<double>(u.d());
  Matrix out(V, n);
  for (std::size_t v = 0; v < V; ++v) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t w = 0; w < V; ++w) {
        if (w == v) continue;
        double s2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) s2 += (u(w, j) - u(v, j)) * (u(w, j) - u(v, j));
        const double mu = rho(std::sqrt(s2));
        acc += u(v, i) * (1.0 - mu) + u(w, i) * mu;
      }
      out(v, i) = acc / d;
    }
  }
  return out;
}

double brute_force_variance(const Matrix& m) {
  const std::size_t V = m.rows(), n = m.cols();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::size_t v = 0; v < V; ++v) mean += m(v, i);
    mean /= static_cast<double>(V);
    for (std::size_t v = 0; v < V; ++v) total += (m(v, i) - mean) * (m(v, i) - mean);
  }
  return total / static_cast<double>(V);
}

// 4. (d+1)(Var(A_u) - Var(u)) = -2 E_rho + |L u|^2.
Outcome criterion_variance_identity() {
  Outcome o;
  const Kernel kernels[] = {
      Kernel::constant(0.7),
      Kernel::power_law(1.0, 1.0, true),
      Kernel::clamped_power(0.6, 1.5),
      Kernel::table({{0.0, 1.0}, {0.5, 0.6}, {2.0, 0.1}}),
      Kernel::custom([](double s) { return 1.0 / (1.0 + s * s); }, {}, true, "lorentzian"),
  };
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> vv(3, 8), nn(1, 3);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const OpinionState u = random_state(rng, vv(rng), nn(rng), -2.0, 2.0);
    const Kernel& k = kernels[i % 5];
    const InfluenceModel model = InfluenceModel::standard(k);
    const double V = static_cast<double>(u.vertices());
    const double lhs = V * (brute_force_variance(brute_force_step(u, [&](double s) { return k(s); })) -
                            brute_force_variance(u.values()));
    const double E = weighted_energy(u, k);
    const double Lu2 = squared_norm(apply_L(u, model));
    const double rhs = -2.0 * E + Lu2;
    const double rel = std::abs(lhs - rhs) / std::max(std::abs(rhs), 2.0 * E + Lu2);
    worst = std::max(worst, rel);
  }
  if (worst > 1e-10) o.pass = false;
  o.detail = fmt("500 states, 5 kernels, max relative gap %.3g (tol 1e-10)", worst);
  return o;
}

// 5. S(A_u) >= S(u), R_alpha(A_u) >= R_alpha(u), strict for nonconstant
// inputs with positive weights, equality at constant states.
Outcome criterion_entropy() {
  Outcome o;
  std::mt19937_64 rng(555);
  std::uniform_int_distribution<int> vv(3, 10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t strict = 0, total = 0;
  double worst_gain = INFINITY;
  for (int i = 0; i < 500; ++i) {
    const OpinionState u = random_state(rng, vv(rng), 1, 0.05, 5.0);
    const Kernel k = i % 2 ? Kernel::constant(0.1 + 0.9 * unit(rng)) : Kernel::clamped_power(0.5 + unit(rng), 1.0);
    const OpinionState a = time_one_map(u, InfluenceModel::standard(k));
    std::vector<double> gains{entropy(a) - entropy(u)};
    for (double alpha : {0.5, 2.0, 5.0}) gains.push_back(renyi_entropy(a, alpha) - renyi_entropy(u, alpha));
    for (double g : gains) {
      ++total;
      worst_gain = std::min(worst_gain, g);
      if (g > 0.0) ++strict;
    }
  }
  double constant_gap = 0.0;
  for (double c : {0.3, 1.0, 2.7}) {
    Matrix m(5, 1, c);
    const OpinionState u(m);
    const OpinionState a = time_one_map(u, InfluenceModel::standard(Kernel::constant(0.8)));
    constant_gap = std::max(constant_gap, std::abs(entropy(a) - entropy(u)));
    for (double alpha : {0.5, 2.0, 5.0})
      constant_gap = std::max(constant_gap, std::abs(renyi_entropy(a, alpha) - renyi_entropy(u, alpha)));
  }
  if (strict != total || constant_gap != 0.0) o.pass = false;
  o.detail = fmt("strict increase in %.0f/%.0f comparisons (min gain %.3g); constant states gap %.3g", double(strict),
                 double(total), worst_gain, constant_gap);
  return o;
}

// 6. Poincare inequalities on random scalar states; worked instance LHS 6, RHS 8.
Outcome criterion_poincare() {
  Outcome o;
  std::mt19937_64 rng(666);
  std::uniform_int_distribution<int> vv(2, 12);
  std::size_t passed = 0, total = 0;
  double min_ratio = INFINITY;
  for (int i = 0; i < 500; ++i) {
    const OpinionState u = random_state(rng, vv(rng), 1, -3.0, 3.0);
    for (double alpha : {0.0, 0.5, 1.0, 1.5}) {
      const CertificateEntry e = check_poincare(u, alpha);
      ++total;
      if (e.status == CertStatus::Pass) ++passed;
      if (e.measured > 0.0) min_ratio = std::min(min_ratio, e.bound / e.measured);
      if (alpha > 0.0) {
        const CertificateEntry c = check_poincare(u, Kernel::clamped_power(0.5, alpha), alpha, 0.5);
        ++total;
        if (c.status == CertStatus::Pass) ++passed;
      }
    }
  }
  const CertificateEntry w = check_poincare(OpinionState(Matrix::from_rows({{0}, {0}, {3}})), 0.0);
  const bool worked = std::abs(w.measured - 6.0) <= 1e-12 && std::abs(w.bound - 8.0) <= 1e-12;
  if (passed != total || !worked) o.pass = false;
  o.detail = fmt("%.0f/%.0f pass (min RHS/LHS %.4g); worked instance LHS = %.15g, RHS = %.15g", double(passed),
                 double(total), min_ratio, w.measured, w.bound);
  return o;
}

struct ContinuousRun {
  Trajectory tr;
  double alpha;
  std::size_t d;
};

ContinuousRun power_run(std::mt19937_64& rng, double alpha, std::size_t d, std::size_t n, double max_step) {
  const OpinionState u = random_state(rng, d + 1, n, 0.0, 2.0);
  ContinuousOptions opt;
  opt.max_step = max_step;
  return {evolve_continuous(u, InfluenceModel::standard(Kernel::power_law(alpha)), 1e3, 1e-8, opt), alpha, d};
}

// 7. (Var^{alpha/2})' <= -c_{d,alpha} + 1e-6 until consensus; consensus
// before var0^{alpha/2}/c with 1% slack.
Outcome criterion_variance_decay() {
  const auto start = Clock::now();
  Outcome o;
  std::mt19937_64 rng(777);
  double worst_rate = -INFINITY;  // max of slope + c
  double worst_time = 0.0;        // max consensus_time / bound
  std::size_t runs = 0, reached = 0, samples = 0;
  for (double alpha : {0.5, 1.0, 1.5}) {
    for (std::size_t d : {2u, 5u, 10u}) {
      const ContinuousRun run = power_run(rng, alpha, d, 1, INFINITY);
      const Trajectory& tr = run.tr;
      ++runs;
      const double c = variance_decay_rate(d, alpha);
      const double var0 = variance(tr.states.front());
      std::vector<double> I;
      for (const auto& s : tr.states) I.push_back(std::pow(variance(s), alpha / 2.0));
      const double floor = 1e-12 * I.front();
      for (std::size_t k = 1; k + 1 < tr.size(); ++k) {
        if (I[k] <= floor) break;  // consensus
        const double slope = (I[k + 1] - I[k - 1]) / (tr.times[k + 1] - tr.times[k - 1]);
        worst_rate = std::max(worst_rate, slope + c);
        ++samples;
        if (slope > -c + 1e-6) o.pass = false;
      }
      if (tr.consensus_time) {
        ++reached;
        const double ratio = *tr.consensus_time / consensus_time_bound(var0, d, alpha);
        worst_time = std::max(worst_time, ratio);
        if (ratio > 1.01) o.pass = false;
      } else {
        o.pass = false;
      }
    }
  }
  const double secs = seconds_since(start);
  if (secs >= 60.0) o.pass = false;
  o.detail = fmt("%.0f runs, %.0f interior samples, max(I' + c) = %.3g (<= 1e-6)", double(runs), double(samples),
                 worst_rate) +
             fmt(", consensus %.0f/%.0f, max T/bound = %.4f (<= 1.01), %.1f s", double(reached), double(runs),
                 worst_time, secs);
  return o;
}

std::vector<ContinuousRun> trajectory_set() {
  std::mt19937_64 rng(888);
  std::vector<ContinuousRun> runs;
  const double alphas[] = {0.5, 1.0, 1.5, 0.75, 1.25};
  for (int i = 0; i < 20; ++i) {
    const double alpha = alphas[i % 5];
    const std::size_t d = 2 + static_cast<std::size_t>(i % 4) * 2;
    const std::size_t n = 1 + static_cast<std::size_t>(i / 10);
    runs.push_back(power_run(rng, alpha, d, n, 1e-3));
  }
  return runs;
}

// 8. Weighted-energy identities within 100 tol relative.
Outcome criterion_energy_identities(const std::vector<ContinuousRun>& runs) {
  Outcome o;
  std::size_t passed = 0, entries = 0, checked = 0, candidates = 0;
  double worst = 0.0;
  for (const auto& run : runs) {
    const CertificateReport r = verify_trajectory_certificates(run.tr);
    for (const char* name : {"sigma_energy_identity", "power_energy_identity"}) {
      const CertificateEntry* e = r.find(name);
      ++entries;
      if (!e || e->status != CertStatus::Pass) {
        o.pass = false;
        continue;
      }
      ++passed;
      checked += e->checked;
      worst = std::max(worst, std::abs(e->margin) / std::max(std::abs(e->bound), 1e-300));
    }
    candidates += 2 * (run.tr.size() > 6 ? run.tr.size() - 6 : 0);
  }
  const double coverage = candidates ? static_cast<double>(checked) / static_cast<double>(candidates) : 0.0;
  if (coverage < 0.5) o.pass = false;
  o.detail = fmt("%.0f/%.0f identities pass, %.0f samples compared (%.0f%% of interior),", double(passed),
                 double(entries), double(checked), 100.0 * coverage) +
             fmt(" worst rel gap %.3g (tolerance 100 tol = 1e-6)", worst);
  return o;
}

bool spans_merge(const Trajectory& tr, std::size_t k) {
  for (const auto& m : tr.merges)
    if (m.t > tr.times[k - 1] && m.t <= tr.times[k + 1]) return true;
  return false;
}

// 9. Second differences of I and Var >= -1e-6 I(0); both three-circles
// inequalities for 10 random (r, s) pairs.
Outcome criterion_three_circles(const std::vector<ContinuousRun>& runs) {
  Outcome o;
  std::mt19937_64 rng(999);
  double worst_second = INFINITY;
  std::size_t pairs = 0, pairs_ok = 0, triples = 0, skipped = 0;
  for (const auto& run : runs) {
    const Trajectory& tr = run.tr;
    std::vector<double> I, var;
    for (const auto& s : tr.states) {
      var.push_back(variance(s));
      I.push_back(std::pow(var.back(), run.alpha / 2.0));
    }
    const double tol = 1e-6 * I.front();
    for (std::size_t k = 1; k + 1 < tr.size(); ++k) {
      if (spans_merge(tr, k)) {
        ++skipped;
        continue;
      }
      const double h1 = tr.times[k] - tr.times[k - 1], h2 = tr.times[k + 1] - tr.times[k];
      for (const auto* f : {&I, &var}) {
        const double second = 2.0 * ((h2 * (*f)[k - 1] + h1 * (*f)[k + 1]) / (h1 + h2) - (*f)[k]);
        worst_second = std::min(worst_second, second / std::max(I.front(), 1e-300));
        ++triples;
        if (second < -tol) o.pass = false;
      }
    }
    const double T = tr.times.back();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int p = 0; p < 10; ++p) {
      double s = T * (0.05 + 0.95 * unit(rng));
      double r = s * (0.05 + 0.9 * unit(rng));
      for (const auto* f : {&I, &var}) {
        const CertificateEntry e = check_three_circles(tr.times, *f, r, s);
        ++pairs;
        if (e.status == CertStatus::Pass) ++pairs_ok;
        else o.pass = false;
      }
    }
  }
  o.detail = fmt("%.0f second differences (min / I(0) = %.3g, tol -1e-6; %.0f merge-spanning skipped),",
                 double(triples), worst_second, double(skipped)) +
             fmt(" three circles %.0f/%.0f", double(pairs_ok), double(pairs));
  return o;
}

// 10. Cluster contraction: kappa_step > 1 until dist_to_rest < 10 and
// h_{t+1} >= h_t - 2.
Outcome criterion_cluster() {
  Outcome o;
  const Kernel k = Kernel::clamped_power(1.0, 1.0);
  auto examine = [&](const Matrix& values, const Members& members, std::size_t steps, std::size_t& resolved,
                     std::size_t& collapsed, double& kmin, double& drift) {
    const Trajectory tr = evolve_discrete(OpinionState(values), InfluenceModel::standard(k), steps, {.early_stop = false});
    const ContractionReport r = track_cluster_contraction(tr, members);
    for (std::size_t t = 0; t < r.per_step.size(); ++t) {
      const ContractionStep& s = r.per_step[t];
      drift = std::min(drift, s.h_next - (s.h - 2.0));
      if (s.h_next < s.h - 2.0) o.pass = false;
      if (s.h < 10.0) continue;
      if (s.resolved) {
        ++resolved;
        kmin = std::min(kmin, *s.kappa_step);
        if (!(*s.kappa_step > 1.0)) o.pass = false;
      } else {
        // The cluster is a single point up to rounding and must stay one.
        ++collapsed;
        const double floor = cluster_noise_floor(tr.states[t + 1]);
        if (s.g_next > floor) o.pass = false;
      }
    }
  };
  std::size_t resolved = 0, collapsed = 0;
  double kmin = INFINITY, drift = INFINITY;
  examine(Matrix::from_rows({{0}, {0.1}, {0.2}, {100}}), {0, 1, 2}, 100, resolved, collapsed, kmin, drift);
  const std::size_t res_primary = resolved, col_primary = collapsed;
  const double kmin_primary = kmin;
  if (res_primary == 0) o.pass = false;

  // Larger bulk that contracts over many resolved steps.
  std::size_t res2 = 0, col2 = 0;
  double kmin2 = INFINITY, drift2 = INFINITY;
  examine(Matrix::from_rows({{0}, {0.05}, {0.1}, {0.15}, {0.2}, {100}, {101}, {102}, {103}, {104}}), {0, 1, 2, 3, 4},
          60, res2, col2, kmin2, drift2);
  if (res2 < 5) o.pass = false;
  o.detail = fmt("u=(0,.1,.2,100): %.0f resolved steps (kappa_min %.3g), %.0f collapsed steps stay collapsed;",
                 double(res_primary), kmin_primary, double(col_primary)) +
             fmt(" 10-vertex bulk: %.0f resolved steps, kappa_min %.4g; min(h_{t+1} - h_t + 2) = %.3g", double(res2),
                 kmin2, std::min(drift, drift2));
  return o;
}

// 11. Cluster-embedded L_mu x equals the n-body acceleration; centre of mass
// and momentum preserved over 100 steps; substep 1e-2 keeps coordinates O(1).
Outcome criterion_nbody() {
  Outcome o;
  std::mt19937_64 rng(1111);
  std::uniform_int_distribution<int> nb(1, 3), mass(1, 3);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), vel(-0.5, 0.5);
  double worst_embed = 0.0, worst_cons = 0.0;
  std::size_t embeddings = 0, runs = 0, truncated = 0;
  for (int i = 0; i < 300; ++i) {
    const std::size_t N = nb(rng);
    PhaseState p;
    p.x = Matrix(N, 3);
    p.v = Matrix(N, 3);
    for (std::size_t b = 0; b < N; ++b) {
      p.m.push_back(mass(rng));
      for (std::size_t c = 0; c < 3; ++c) {
        p.x(b, c) = pos(rng);
        p.v(b, c) = vel(rng);
      }
    }
    if (N > 1 && min_pair_distance(p.x) < 0.5) continue;
    if (p.total_mass() >= 2.0) {
      const ClusterEmbedding e = embed_as_clusters(p);
      const Matrix L = apply_L(e.state, e.model);
      const Matrix a = nbody_acceleration(p);
      for (std::size_t b = 0; b < N; ++b)
        for (std::size_t c = 0; c < 3; ++c)
          worst_embed = std::max(worst_embed, std::abs(L(e.first_vertex[b], c) - a(b, c)) / (1.0 + std::abs(a(b, c))));
      ++embeddings;
    }
    // Move to the centre-of-mass frame so both sums start at zero.
    const double M = p.total_mass();
    for (std::size_t c = 0; c < 3; ++c) {
      double cx = 0.0, cv = 0.0;
      for (std::size_t b = 0; b < N; ++b) {
        cx += p.m[b] * p.x(b, c);
        cv += p.m[b] * p.v(b, c);
      }
      for (std::size_t b = 0; b < N; ++b) {
        p.x(b, c) -= cx / M;
        p.v(b, c) -= cv / M;
      }
    }
    const NBodyDiagnostics d0 = nbody_diagnostics(p);
    const NBodyRun run = nbody_evolve(p, 100, 1e-2);
    ++runs;
    if (run.truncated) ++truncated;
    for (const auto& d : run.diagnostics)
      for (std::size_t c = 0; c < 3; ++c)
        worst_cons = std::max({worst_cons, std::abs(d.total_weighted_position[c] - d0.total_weighted_position[c]),
                               std::abs(d.total_momentum[c] - d0.total_momentum[c])});
  }
  if (worst_embed > 1e-12 || worst_cons > 1e-12 || embeddings < 100) o.pass = false;
  o.detail = fmt("%.0f embeddings, max rel gap %.3g (tol 1e-12); %.0f runs of 100 steps at substep 1e-2", double(embeddings),
                 worst_embed, double(runs)) +
             fmt(" (%.0f stopped at close encounters), max drift of sums %.3g (tol 1e-12)", double(truncated),
                 worst_cons);
  return o;
}

// 12. Rank-dependent model: |grad u(t)| <= (1 - a(d-1)/(2d))^t |grad u(0)|.
Outcome criterion_rank_dependent() {
  Outcome o;
  std::mt19937_64 rng(1212);
  std::uniform_int_distribution<int> dd(2, 20), nn(1, 5);
  const RankKernel rk = RankKernel::inverse_product(1.0);
  const InfluenceModel model = InfluenceModel::rank_dependent(rk);
  double worst = -INFINITY;
  double min_a = INFINITY;
  for (int i = 0; i < 50; ++i) {
    const std::size_t d = dd(rng), n = nn(rng);
    const OpinionState u = random_state(rng, d + 1, n, -1.0, 1.0);
    const double g0 = grad_sup_norm(u);
    const double a = rk(max_row_norm(u), g0);
    min_a = std::min(min_a, a);
    const double factor = grad_decay_conservative(a, d);
    const Trajectory tr = evolve_discrete(u, model, 50, {.early_stop = false, .diagnostics = false});
    for (std::size_t t = 0; t < tr.size(); ++t) {
      const double excess = grad_sup_norm(tr.states[t]) - std::pow(factor, tr.times[t]) * g0;
      worst = std::max(worst, excess);
      if (excess > 1e-10) o.pass = false;
    }
  }
  o.detail = fmt("50 instances, t <= 50, min a = %.3g, max(measured - bound) = %.3g (slack 1e-10)", min_a, worst);
  return o;
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const auto instances = contraction_instances();
  report(1, "exponential gradient decay", criterion_gradient_decay(instances));
  report(2, "tightness witness", criterion_tightness());
  report(3, "average and extrema", criterion_conservation(instances));
  report(4, "discrete variance identity", criterion_variance_identity());
  report(5, "entropy and Renyi monotonicity", criterion_entropy());
  report(6, "Poincare inequalities", criterion_poincare());
  report(7, "continuous variance decay", criterion_variance_decay());
  const auto runs = trajectory_set();
  report(8, "weighted-energy identities", criterion_energy_identities(runs));
  report(9, "three circles", criterion_three_circles(runs));
  report(10, "cluster contraction", criterion_cluster());
  report(11, "n-body correspondence", criterion_nbody());
  report(12, "rank-dependent decay", criterion_rank_dependent());
  std::printf("%d of 12 criteria failed, %.1f s total\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
