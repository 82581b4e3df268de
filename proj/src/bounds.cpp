#include "consensus/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "consensus/diagnostics.hpp"
#include "consensus/error.hpp"
#include "consensus/operators.hpp"

namespace consensus {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

double grad_decay_factor(double a, std::size_t d) {
  if (d < 2) throw DomainError("gradient decay needs d >= 2: the two-vertex graph is bipartite");
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("lower bound a must lie in [0, 1]");
  return std::exp(-a * static_cast<double>(d - 1) / static_cast<double>(d));
}

double grad_decay_pre_exponential(double a, std::size_t d) {
  grad_decay_factor(a, d);
  return std::pow(1.0 - a / static_cast<double>(d), static_cast<double>(d - 1));
}

double grad_decay_conservative(double a, std::size_t d) {
  grad_decay_factor(a, d);
  return 1.0 - a * static_cast<double>(d - 1) / (2.0 * static_cast<double>(d));
}

double variance_decay_rate(std::size_t d, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("variance decay rate needs 0 < alpha < 2");
  if (d < 1) throw DomainError("variance decay rate needs d >= 1");
  const double dd = static_cast<double>(d);
  const double top = alpha * std::pow(dd + 1.0, (4.0 - 3.0 * alpha) / 2.0);
  return alpha <= 1.0 ? top / (2.0 * std::pow(dd, 2.0 - alpha)) : top / (2.0 * dd);
}

double consensus_time_bound(double var0, std::size_t d, double alpha) {
  if (!(var0 >= 0.0)) throw DomainError("initial variance must be nonnegative");
  return std::pow(var0, alpha / 2.0) / variance_decay_rate(d, alpha);
}

double poincare_constant(std::size_t d, double alpha) {
  if (!(alpha >= 0.0 && alpha < 2.0)) throw DomainError("Poincare inequality needs 0 <= alpha < 2");
  if (d < 1) throw DomainError("Poincare inequality needs d >= 1");
  const double dd = static_cast<double>(d);
  if (alpha <= 1.0) return 2.0 * std::pow(dd / (dd + 1.0), 2.0 - alpha);
  return 2.0 * dd / std::pow(dd + 1.0, 2.0 - alpha);
}

namespace {

// Returns (K/c, K N^{1-p} d^{p-1} c^{-p}).
std::pair<double, double> clamped_poincare_terms(std::size_t d, double alpha, double c) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("clamped Poincare inequality needs 0 < alpha < 2");
  if (!(c > 0.0)) throw DomainError("clamped Poincare inequality needs c > 0");
  const double K = poincare_constant(d, alpha);
  const double dd = static_cast<double>(d);
  const double p = (2.0 - alpha) / 2.0;
  const double edges = dd * (dd + 1.0) / 2.0;
  return {K / c, K * std::pow(edges, 1.0 - p) * std::pow(dd, p - 1.0) * std::pow(c, -p)};
}

}  // namespace

double clamped_poincare_constant(std::size_t d, double alpha, double c) {
  const auto [linear, power] = clamped_poincare_terms(d, alpha, c);
  return std::max(linear, power);
}

BoundSet evaluate_bounds(double a, std::size_t d, double alpha, std::optional<double> var0) {
  if (d == 0) throw DomainError("d must be at least 1");
  if (!(alpha >= 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in [0, 2)");
  BoundSet b;
  if (d >= 2 && a >= 0.0 && a <= 1.0) {
    b.grad_factor_sharp = grad_decay_factor(a, d);
    b.grad_factor_pre_exponential = grad_decay_pre_exponential(a, d);
    b.grad_factor_conservative = grad_decay_conservative(a, d);
  } else if (d < 2) {
    b.notes.push_back("gradient factors need d >= 2: the two-vertex graph is bipartite");
  } else {
    b.notes.push_back("gradient factors need a in [0, 1]");
  }
  if (alpha > 0.0) {
    b.variance_rate = variance_decay_rate(d, alpha);
    if (var0) b.consensus_time = consensus_time_bound(*var0, d, alpha);
  } else {
    b.notes.push_back("variance rate needs alpha > 0");
  }
  b.poincare_constant = poincare_constant(d, alpha);
  return b;
}

const char* to_string(CertStatus s) {
  switch (s) {
    case CertStatus::Pass:
      return "pass";
    case CertStatus::Fail:
      return "fail";
    case CertStatus::NotApplicable:
      return "not-applicable";
  }
  return "unknown";
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::AtMost:
      return "<=";
    case Relation::AtLeast:
      return ">=";
    case Relation::Equal:
      return "==";
  }
  return "?";
}

bool CertificateReport::passed() const {
  return std::none_of(entries.begin(), entries.end(), [](const auto& e) { return e.status == CertStatus::Fail; });
}

std::size_t CertificateReport::count(CertStatus s) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [s](const auto& e) { return e.status == s; }));
}

const CertificateEntry* CertificateReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

namespace {

double margin_of(Relation rel, double measured, double bound) {
  switch (rel) {
    case Relation::AtMost:
      return bound - measured;
    case Relation::AtLeast:
      return measured - bound;
    case Relation::Equal:
      return -std::abs(measured - bound);
  }
  return 0.0;
}

// Keeps the comparison with the smallest slack (margin + tolerance).
class Worst {
 public:
  Worst(std::string name, Relation rel, bool strict = false) : rel_(rel), strict_(strict) { entry_.name = std::move(name); }

  void add(double measured, double bound, double tolerance, std::optional<double> t = std::nullopt) {
    const double margin = margin_of(rel_, measured, bound);
    const double slack = std::isnan(margin) ? -kInf : margin + tolerance;
    ++entry_.checked;
    if (entry_.checked == 1 || slack < best_) {
      best_ = slack;
      entry_.measured = measured;
      entry_.bound = bound;
      entry_.margin = margin;
      entry_.tolerance = tolerance;
      entry_.at_time = t;
    }
  }

  CertificateEntry finish(std::string note = {}) {
    entry_.relation = rel_;
    entry_.note = std::move(note);
    if (entry_.checked == 0) {
      entry_.status = CertStatus::NotApplicable;
      if (entry_.note.empty()) entry_.note = "no qualifying samples";
      return entry_;
    }
    const bool ok = strict_ ? best_ > 0.0 : best_ >= 0.0;
    entry_.status = ok ? CertStatus::Pass : CertStatus::Fail;
    return entry_;
  }

 private:
  CertificateEntry entry_;
  Relation rel_;
  bool strict_;
  double best_ = kInf;
};

CertificateEntry not_applicable(std::string name, std::string why) {
  CertificateEntry e;
  e.name = std::move(name);
  e.status = CertStatus::NotApplicable;
  e.note = std::move(why);
  return e;
}

bool scalar(const OpinionState& u) { return u.n() == 1; }

}  // namespace

CertificateEntry check_poincare(const OpinionState& u, double alpha) {
  if (!scalar(u)) return not_applicable("poincare", "needs a scalar state (n = 1)");
  const double K = poincare_constant(u.d(), alpha);
  const double lhs = std::pow(centered_l2_squared(u), (2.0 - alpha) / 2.0);
  const double energy = weighted_energy(u, [alpha](double s) { return std::pow(s, -alpha); });
  Worst w("poincare", Relation::AtMost);
  w.add(lhs, K * energy, 1e-12 * (lhs + K * energy));
  return w.finish("rho(s) = s^-" + fmt(alpha) + ", K = " + fmt(K));
}

CertificateEntry check_poincare(const OpinionState& u, const Kernel& kernel, double alpha, double c) {
  if (!scalar(u)) return not_applicable("poincare_clamped", "needs a scalar state (n = 1)");
  const auto [linear, power] = clamped_poincare_terms(u.d(), alpha, c);
  const double p = (2.0 - alpha) / 2.0;
  const double lhs = std::pow(centered_l2_squared(u), p);
  const double energy = weighted_energy(u, kernel);
  const double rhs = linear * energy + power * std::pow(energy, p);
  Worst w("poincare_clamped", Relation::AtMost);
  w.add(lhs, rhs, 1e-12 * (lhs + rhs));
  return w.finish("C = " + fmt(std::max(linear, power)));
}

namespace {

double interpolate(const std::vector<double>& t, const std::vector<double>& f, double x) {
  auto it = std::upper_bound(t.begin(), t.end(), x);
  if (it == t.begin()) return f.front();
  if (it == t.end()) return f.back();
  const std::size_t k = static_cast<std::size_t>(it - t.begin());
  const double w = (x - t[k - 1]) / (t[k] - t[k - 1]);
  return (1.0 - w) * f[k - 1] + w * f[k];
}

}  // namespace

CertificateEntry check_three_circles(const std::vector<double>& times, const std::vector<double>& values, double r,
                                     double s) {
  if (times.size() != values.size() || times.size() < 2) throw DomainError("three circles needs matching samples");
  if (!(r > 0.0 && r < s)) throw DomainError("three circles needs 0 < r < s");
  if (s > times.back() || times.front() != 0.0) throw DomainError("three circles needs samples covering [0, s]");
  const double i0 = values.front();
  const double ir = interpolate(times, values, r);
  const double is = interpolate(times, values, s);
  const double tol = 1e-6 * std::abs(i0);
  Worst w("three_circles", Relation::AtMost);
  w.add(ir, (s - r) / s * i0 + r / s * is, tol, r);
  w.add(i0 - is, s / r * (i0 - ir), tol, s);
  return w.finish("r = " + fmt(r) + ", s = " + fmt(s));
}

namespace {

struct Sample {
  const OpinionState* u;
  double t;
};

// Lagrange weights for the first derivative at t[k] from t[first..first+4].
std::array<double, 5> fd5_weights(const std::vector<double>& t, std::size_t k, std::size_t first) {
  std::array<double, 5> w{};
  const double tk = t[k];
  for (std::size_t j = 0; j < 5; ++j) {
    const std::size_t a = first + j;
    if (a == k) {
      double sum = 0.0;
      for (std::size_t m = first; m < first + 5; ++m)
        if (m != k) sum += 1.0 / (tk - t[m]);
      w[j] = sum;
      continue;
    }
    double prod = 1.0 / (t[a] - tk);
    for (std::size_t m = first; m < first + 5; ++m) {
      if (m == a || m == k) continue;
      prod *= (tk - t[m]) / (t[a] - t[m]);
    }
    w[j] = prod;
  }
  return w;
}

struct Derivative {
  double value;
  double roundoff;    // rounding error of the stencil applied to f
  double truncation;  // spread against the shifted stencils
};

double apply_stencil(const std::vector<double>& t, const std::vector<double>& f, std::size_t k, std::size_t first,
                     double* roundoff = nullptr) {
  const auto w = fd5_weights(t, k, first);
  double value = 0.0;
  double weight_sum = 0.0;
  double fmax = 0.0;
  for (std::size_t j = 0; j < 5; ++j) {
    value += w[j] * f[first + j];
    weight_sum += std::abs(w[j]);
    fmax = std::max(fmax, std::abs(f[first + j]));
  }
  if (roundoff) *roundoff = 64.0 * kEps * fmax * weight_sum;
  return value;
}

// Centered five-point derivative at k; needs samples k-3..k+3 for the
// truncation estimate.
Derivative fd5(const std::vector<double>& t, const std::vector<double>& f, std::size_t k) {
  Derivative d{};
  d.value = apply_stencil(t, f, k, k - 2, &d.roundoff);
  double left_round = 0.0;
  double right_round = 0.0;
  const double left = apply_stencil(t, f, k, k - 3, &left_round);
  const double right = apply_stencil(t, f, k, k - 1, &right_round);
  d.roundoff = std::max({d.roundoff, left_round, right_round});
  d.truncation = std::max(std::abs(left - d.value), std::abs(right - d.value));
  return d;
}

double inf_norm_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double inf_norm(const Vector& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_entry(const OpinionState& u) {
  double m = 0.0;
  for (double x : u.values().data()) m = std::max(m, std::abs(x));
  return m;
}

// Exact power kernel c s^-alpha (no cap): the setting of the energy
// identities and the convexity theorem.
std::optional<double> pure_power_exponent(const Kernel& k) {
  if (k.cap_at_one()) return std::nullopt;
  if (const auto* p = std::get_if<PowerLawKernel>(&k.variant())) return p->alpha;
  if (const auto* c = std::get_if<ClampedPowerKernel>(&k.variant())) return c->alpha;
  return std::nullopt;
}

// Exponent alpha for which rho(s) = c s^-alpha (constant kernels give 0).
std::optional<double> homogeneous_exponent(const Kernel& k) {
  if (std::holds_alternative<ConstantKernel>(k.variant())) return 0.0;
  return pure_power_exponent(k);
}

bool constant_at_least_one(const Kernel& k) {
  if (const auto* c = std::get_if<ConstantKernel>(&k.variant())) return c->p >= 1.0;
  if (const auto* p = std::get_if<PowerLawKernel>(&k.variant())) return p->alpha == 0.0 && p->coeff >= 1.0 && !k.cap_at_one();
  return false;
}

struct OffDiagonal {
  double min = kInf;
  double max = 0.0;
};

OffDiagonal off_diagonal_range(const Matrix& w) {
  OffDiagonal r;
  for (std::size_t v = 0; v < w.rows(); ++v) {
    for (std::size_t x = 0; x < w.cols(); ++x) {
      if (v == x) continue;
      r.min = std::min(r.min, w(v, x));
      r.max = std::max(r.max, w(v, x));
    }
  }
  return r;
}

double entropy_rate(const OpinionState& u, const Kernel& kernel) {
  double acc = 0.0;
  for (std::size_t v = 0; v < u.vertices(); ++v) {
    for (std::size_t w = 0; w < u.vertices(); ++w) {
      if (v == w) continue;
      const double a = u(v, 0);
      const double b = u(w, 0);
      if (a == b) continue;
      acc += std::log(b / a) * (b - a) * kernel.coupling(std::abs(b - a));
    }
  }
  return acc / (2.0 * static_cast<double>(u.d()));
}

class Runner {
 public:
  Runner(const Trajectory& tr, const CertificateOptions& opt)
      : tr_(tr), opt_(opt), model_(tr.model), d_(tr.states.front().d()) {
    DiagnosticsOptions dopt;
    dopt.renyi_alphas = opt.renyi_alphas;
    diag_ = compute_diagnostics(tr.states, tr.times, model_, dopt);
    u0_ = &tr.states.front();
    osc0_ = diag_.front().osc;
    scale_ = std::max(1.0, max_abs_entry(*u0_));
    discrete_ = tr.mode == EvolutionMode::Discrete;
    adjacent_ = tr.stride == 1;
    positive_scalar_ = std::all_of(tr.states.begin(), tr.states.end(), [](const auto& s) { return is_positive_scalar(s); });
  }

  CertificateReport run() {
    common();
    if (discrete_) {
      discrete();
    } else {
      continuous();
    }
    for (auto& e : report_.entries) {
      if (opt_.disabled.count(e.name)) {
        e.status = CertStatus::NotApplicable;
        e.note = "disabled by configuration";
      }
    }
    return std::move(report_);
  }

 private:
  void push(CertificateEntry e) { report_.entries.push_back(std::move(e)); }

  double dt(std::size_t k) const { return tr_.times[k + 1] - tr_.times[k]; }

  // Tolerance for comparing two consecutive samples of a state functional
  // with magnitude `size`.
  double step_tol(std::size_t k, double size) const {
    const double round = 1e-12 * (1.0 + size);
    if (discrete_) return round;
    return round + 10.0 * tr_.integrator.tol * dt(k) * (1.0 + size);
  }

  // Discrete steps between two samples; accepted integrator steps for
  // continuous trajectories.
  double steps_between(std::size_t k) const {
    return discrete_ ? dt(k) : static_cast<double>(tr_.stride);
  }

  void common() {
    if (model_.symmetric()) {
      Worst w("average_conservation", Relation::AtMost);
      for (std::size_t k = 0; k + 1 < diag_.size(); ++k) {
        const double drift = inf_norm_diff(diag_[k + 1].mean, diag_[k].mean);
        w.add(drift, 0.0, 1e-12 * (1.0 + inf_norm(diag_[k].mean)) * steps_between(k), tr_.times[k + 1]);
      }
      push(w.finish());
    } else {
      push(not_applicable("average_conservation", "weights are not symmetric"));
    }

    {
      Worst w("max_min_monotone", Relation::AtMost);
      for (std::size_t k = 0; k + 1 < diag_.size(); ++k) {
        for (std::size_t i = 0; i < diag_[k].max_per_coord.size(); ++i) {
          const double tol = step_tol(k, scale_);
          w.add(diag_[k + 1].max_per_coord[i], diag_[k].max_per_coord[i], tol, tr_.times[k + 1]);
          w.add(-diag_[k + 1].min_per_coord[i], -diag_[k].min_per_coord[i], tol, tr_.times[k + 1]);
        }
      }
      push(w.finish("max decreases, min increases per coordinate"));
    }

    {
      Worst w("osc_monotone", Relation::AtMost);
      for (std::size_t k = 0; k + 1 < diag_.size(); ++k)
        w.add(diag_[k + 1].osc, diag_[k].osc, step_tol(k, scale_), tr_.times[k + 1]);
      push(w.finish());
    }

    monotone_entropies();
  }

  void monotone_entropies() {
    static const char* kNeeds = "needs a positive scalar state and symmetric weights";
    const bool ok = positive_scalar_ && model_.symmetric();
    if (!ok) {
      push(not_applicable("entropy_monotone", kNeeds));
      for (double a : opt_.renyi_alphas) {
        if (a <= 0.0 || a == 1.0) continue;
        push(not_applicable("renyi_monotone_" + fmt(a), kNeeds));
        if (a > 1.0) push(not_applicable("power_sum_monotone_" + fmt(a), kNeeds));
      }
      return;
    }
    Worst s("entropy_monotone", Relation::AtLeast);
    for (std::size_t k = 0; k + 1 < diag_.size(); ++k)
      s.add(*diag_[k + 1].entropy, *diag_[k].entropy, step_tol(k, std::abs(*diag_[k].entropy)), tr_.times[k + 1]);
    push(s.finish());
    for (double a : opt_.renyi_alphas) {
      if (a <= 0.0 || a == 1.0) continue;
      Worst r("renyi_monotone_" + fmt(a), Relation::AtLeast);
      for (std::size_t k = 0; k + 1 < diag_.size(); ++k) {
        const double now = diag_[k].renyi.at(a);
        r.add(diag_[k + 1].renyi.at(a), now, step_tol(k, std::abs(now)), tr_.times[k + 1]);
      }
      push(r.finish());
      if (a > 1.0) {
        Worst p("power_sum_monotone_" + fmt(a), Relation::AtMost);
        for (std::size_t k = 0; k + 1 < diag_.size(); ++k) {
          const double now = power_sum(tr_.states[k], a);
          p.add(power_sum(tr_.states[k + 1], a), now, step_tol(k, now), tr_.times[k + 1]);
        }
        push(p.finish());
      }
    }
  }

  // ---- discrete ----------------------------------------------------------

  void discrete() {
    const std::size_t steps = tr_.size() - 1;
    std::vector<Matrix> weights;
    if (adjacent_) {
      weights.reserve(tr_.size());
      for (const auto& s : tr_.states) weights.push_back(effective_weights(s, model_));
    }

    {
      Worst w("max_row_norm", Relation::AtMost);
      for (std::size_t k = 0; k < steps; ++k)
        w.add(max_row_norm(tr_.states[k + 1]), max_row_norm(tr_.states[k]), step_tol(k, scale_), tr_.times[k + 1]);
      push(w.finish());
    }

    contraction(weights);
    rank_dependent_decay();
    speed_bound();
    variance_identities(weights);
    energy_identity();
    discrete_variance_decay(weights);
    cluster_contraction();
  }

  void contraction(const std::vector<Matrix>& weights) {
    const char* names[] = {"grad_decay_step", "grad_decay_sharp", "mean_deviation_decay"};
    auto skip = [&](const std::string& why) {
      for (const char* n : names) push(not_applicable(n, why));
    };
    if (d_ < 2) return skip("d = 1: the two-vertex graph is bipartite");
    if (!adjacent_) return skip("needs every step (stride 1)");
    double a = kInf;
    double top = 0.0;
    std::vector<double> a_step;
    for (const auto& w : weights) {
      const auto r = off_diagonal_range(w);
      a_step.push_back(r.min);
      a = std::min(a, r.min);
      top = std::max(top, r.max);
    }
    if (top > 1.0 + 1e-15) return skip("weights exceed one (max " + fmt(top) + ")");

    const double dd = static_cast<double>(d_);
    Worst step("grad_decay_step", Relation::AtMost);
    for (std::size_t k = 0; k + 1 < tr_.size(); ++k) {
      const double factor = grad_decay_pre_exponential(std::clamp(a_step[k], 0.0, 1.0), d_);
      step.add(diag_[k + 1].osc, factor * diag_[k].osc, 1e-12 * scale_, tr_.times[k + 1]);
    }
    push(step.finish("osc(t+1) <= (1 - a_t/d)^{d-1} osc(t), a_t the smallest weight at step t"));

    if (!(a > 0.0)) {
      push(not_applicable("grad_decay_sharp", "no positive lower bound a on the weights"));
      push(not_applicable("mean_deviation_decay", "no positive lower bound a on the weights"));
      return;
    }
    const double slack = 1e-10 * std::max(1.0, osc0_);
    Worst sharp("grad_decay_sharp", Relation::AtMost);
    Worst mean("mean_deviation_decay", Relation::AtMost);
    const double dev0 = max_deviation_from_mean(*u0_);
    for (std::size_t k = 1; k < tr_.size(); ++k) {
      const double t = tr_.times[k];
      const double factor = std::exp(-a * t * (dd - 1.0) / dd);
      sharp.add(diag_[k].osc, factor * osc0_, slack, t);
      mean.add(max_deviation_from_mean(tr_.states[k]), 2.0 * dd / (dd + 1.0) * factor * dev0, slack, t);
    }
    push(sharp.finish("a = " + fmt(a)));
    push(mean.finish("a = " + fmt(a)));
  }

  void rank_dependent_decay() {
    const std::string name = "rank_dependent_decay";
    if (model_.variant != ModelVariant::RankDependent) return push(not_applicable(name, "model is not rank dependent"));
    if (d_ < 2) return push(not_applicable(name, "d = 1: the two-vertex graph is bipartite"));
    const double a = (*model_.rank_kernel)(max_row_norm(*u0_), osc0_);
    if (!(a > 0.0 && a <= 1.0)) return push(not_applicable(name, "a = rho(max |u0|, osc0) not in (0, 1]"));
    const double factor = grad_decay_conservative(a, d_);
    Worst w(name, Relation::AtMost);
    for (std::size_t k = 1; k < tr_.size(); ++k) {
      const double t = tr_.times[k];
      w.add(diag_[k].osc, std::pow(factor, t) * osc0_, 1e-10 * std::max(1.0, osc0_), t);
    }
    push(w.finish("a = " + fmt(a)));
  }

  bool linear_decay_below_one(std::string& why) const {
    if (!model_.symmetric()) {
      why = "needs the standard model";
      return false;
    }
    const KernelReport rep = check_kernel_assumptions(model_.kernel, 0.0, std::max(2.0, 2.0 * osc0_), 4001);
    if (!rep.range_ok) {
      why = "kernel not within [0, 1]";
      return false;
    }
    if (!rep.linear_decay_ok) {
      why = "kernel fails linear decay";
      return false;
    }
    return true;
  }

  void speed_bound() {
    std::string why;
    if (!adjacent_) why = "needs every step (stride 1)";
    if (why.empty() && !linear_decay_below_one(why)) {
      push(not_applicable("speed_bound", why));
      push(not_applicable("osc_drop_bound", why));
      return;
    }
    if (!why.empty()) {
      push(not_applicable("speed_bound", why));
      push(not_applicable("osc_drop_bound", why));
      return;
    }
    Worst speed("speed_bound", Relation::AtMost);
    Worst drop("osc_drop_bound", Relation::AtMost);
    for (std::size_t k = 0; k + 1 < tr_.size(); ++k) {
      const auto& a = tr_.states[k];
      const auto& b = tr_.states[k + 1];
      double v = 0.0;
      for (std::size_t x = 0; x < a.vertices(); ++x) v = std::max(v, distance(a.row(x), b.row(x)));
      speed.add(v, 1.0, 1e-12 * scale_, tr_.times[k + 1]);
      drop.add(diag_[k].osc - diag_[k + 1].osc, 2.0, 1e-12 * scale_, tr_.times[k + 1]);
    }
    push(speed.finish());
    push(drop.finish());
  }

  double identity_roundoff(const OpinionState& u, double osc) const {
    const double size = static_cast<double>(u.vertices() * u.n());
    return 64.0 * kEps * size * std::max(1.0, max_abs_entry(u)) * std::max(osc, kEps);
  }

  void variance_identities(const std::vector<Matrix>& weights) {
    std::string why;
    if (!model_.symmetric()) why = "needs the standard model";
    else if (!adjacent_) why = "needs every step (stride 1)";
    if (!why.empty()) {
      push(not_applicable("variance_identity", why));
      push(not_applicable("variance_decrease", why));
      return;
    }
    const double vertices = static_cast<double>(d_ + 1);
    Worst ident("variance_identity", Relation::Equal);
    Worst decr("variance_decrease", Relation::AtMost);
    for (std::size_t k = 0; k + 1 < tr_.size(); ++k) {
      const auto& u = tr_.states[k];
      const double lhs = vertices * (diag_[k + 1].variance - diag_[k].variance);
      const double energy = diag_[k].energy_rho;
      const double lsq = squared_norm(apply_L(u, model_));
      const double tol = 1e-10 * (2.0 * energy + lsq) + identity_roundoff(u, diag_[k].osc);
      ident.add(lhs, -2.0 * energy + lsq, tol, tr_.times[k]);
      const double top = off_diagonal_range(weights[k]).max;
      decr.add(lhs, 2.0 * (top - 1.0) * energy, tol, tr_.times[k]);
    }
    push(ident.finish("(d+1)(Var(t+1) - Var(t)) vs -2E + |Lu|^2"));
    push(decr.finish("bound 2 (max rho - 1) E"));
  }

  void energy_identity() {
    if (!model_.symmetric()) return push(not_applicable("energy_identity", "needs the standard model"));
    Worst w("energy_identity", Relation::Equal);
    for (std::size_t k = 0; k < tr_.size(); ++k) {
      const auto& u = tr_.states[k];
      const Matrix L = apply_L(u, model_);
      double pairing = 0.0;
      double lmax = 0.0;
      for (std::size_t v = 0; v < u.vertices(); ++v) {
        pairing += dot(u.row(v), L.row(v));
        lmax = std::max(lmax, norm(L.row(v)));
      }
      const double e = diag_[k].energy_rho;
      const double round = 64.0 * kEps * static_cast<double>(u.vertices() * u.n()) *
                           std::max(1.0, max_abs_entry(u)) * lmax;
      w.add(-pairing, e, 1e-10 * e + round, tr_.times[k]);
    }
    push(w.finish("E_rho vs -sum <u, L u>"));
  }

  void discrete_variance_decay(const std::vector<Matrix>& weights) {
    const std::string big = "variance_power_decay";
    const std::string small = "log_variance_decay";
    auto skip = [&](const std::string& why) {
      push(not_applicable(big, why));
      push(not_applicable(small, why));
    };
    const auto* clamped = std::get_if<ClampedPowerKernel>(&model_.kernel.variant());
    if (!model_.symmetric()) return skip("needs the standard model");
    if (!clamped) return skip("needs a clamped power kernel");
    if (!(clamped->alpha > 0.0 && clamped->alpha < 2.0)) return skip("needs 0 < alpha < 2");
    if (!adjacent_) return skip("needs every step (stride 1)");
    double top = 0.0;
    for (const auto& w : weights) top = std::max(top, off_diagonal_range(w).max);
    if (!(top < 1.0)) return skip("needs rho <= rho0 < 1 on occurring distances");

    const double half = clamped->alpha / 2.0;
    Worst wb(big, Relation::AtLeast, true);
    Worst ws(small, Relation::AtLeast, true);
    for (std::size_t k = 0; k + 1 < tr_.size(); ++k) {
      const double v0 = diag_[k].variance;
      const double v1 = diag_[k + 1].variance;
      const double mean = inf_norm(diag_[k].mean);
      const double floor = std::pow(1e3 * kEps * (1.0 + mean), 2.0);
      if (v0 >= 1.0) {
        wb.add(std::pow(v0, half) - std::pow(v1, half), 0.0, 0.0, tr_.times[k]);
      } else if (v0 > floor) {
        ws.add(std::log(v0) - std::log(v1), 0.0, 0.0, tr_.times[k]);
      }
    }
    push(wb.finish("smallest per-step drop of Var^{alpha/2} while Var >= 1; max rho " + fmt(top)));
    push(ws.finish("smallest per-step drop of log Var while Var < 1; max rho " + fmt(top)));
  }

  void cluster_contraction() {
    const std::string name = "cluster_contraction";
    const std::string drift = "cluster_drift";
    auto skip = [&](const std::string& why) {
      push(not_applicable(name, why));
      push(not_applicable(drift, why));
    };
    if (!opt_.cluster) return skip("no cluster configured");
    if (!adjacent_) return skip("needs every step (stride 1)");
    if (opt_.cluster->size() <= 2) return skip("cluster needs more than two members");
    std::string why;
    if (!linear_decay_below_one(why)) return skip(why);

    const ContractionReport rep = track_cluster_contraction(tr_, *opt_.cluster);
    Worst k(name, Relation::AtLeast, true);
    Worst h(drift, Relation::AtLeast);
    std::size_t unresolved_bad = 0;
    for (std::size_t t = 0; t < rep.per_step.size(); ++t) {
      const auto& s = rep.per_step[t];
      h.add(s.h_next, s.h - 2.0, 1e-12 * scale_, tr_.times[t + 1]);
      if (s.h < opt_.cluster_stop_distance) continue;
      if (s.resolved) {
        k.add(*s.kappa_step, 1.0, 0.0, tr_.times[t]);
      } else if (s.g_next > cluster_noise_floor(tr_.states[t + 1])) {
        ++unresolved_bad;
        k.add(0.0, 1.0, 0.0, tr_.times[t]);
      }
    }
    std::string note = "kappa_step = g(t)/g(t+1) while dist_to_rest >= " + fmt(opt_.cluster_stop_distance);
    if (unresolved_bad) note += "; collapsed cluster re-expanded";
    push(k.finish(note));
    push(h.finish("h(t+1) >= h(t) - 2"));
  }

  // ---- continuous --------------------------------------------------------

  // True when a merge moved vertices within (t[a], t[b]].
  bool snapped_between(std::size_t a, std::size_t b) const {
    return std::any_of(tr_.merges.begin(), tr_.merges.end(),
                       [&](const MergeEvent& m) { return m.t > tr_.times[a] && m.t <= tr_.times[b]; });
  }

  // Samples k whose seven-point window contains no merge.
  std::vector<std::size_t> smooth_interior() const {
    std::vector<std::size_t> ks;
    if (tr_.size() < 7) return ks;
    for (std::size_t k = 3; k + 3 < tr_.size(); ++k)
      if (!snapped_between(k - 3, k + 3)) ks.push_back(k);
    return ks;
  }

  // Tolerance 100 tol relative plus stencil rounding. Samples the stencil
  // cannot resolve (truncation spread above 10 tol relative) and samples
  // with osc below 1e-2 osc(0), where the absolute integrator tolerance is
  // no longer small against the state, are skipped and counted.
  std::string fd_identity(Worst& w, const std::vector<double>& f, const std::vector<double>& rhs) {
    const double tol = tr_.integrator.tol;
    std::size_t skipped = 0;
    std::size_t candidates = 0;
    for (std::size_t k : smooth_interior()) {
      if (diag_[k].osc < 1e-2 * osc0_) continue;
      ++candidates;
      const Derivative der = fd5(tr_.times, f, k);
      const double scale = std::abs(rhs[k]);
      if (der.truncation > 10.0 * tol * scale + der.roundoff) {
        ++skipped;
        continue;
      }
      w.add(der.value, rhs[k], 100.0 * tol * scale + der.roundoff, tr_.times[k]);
    }
    return std::to_string(candidates - skipped) + " of " + std::to_string(candidates) + " smooth samples resolved";
  }

  void continuous() {
    const std::size_t K = tr_.size();
    std::vector<double> ut_sq(K);
    for (std::size_t k = 0; k < K; ++k) ut_sq[k] = squared_norm(apply_L(tr_.states[k], model_));

    const bool fd_ok = adjacent_ && model_.symmetric();
    const std::string fd_why = !model_.symmetric() ? "needs the standard model" : "needs every accepted step (stride 1)";

    if (fd_ok) {
      std::vector<double> f(K), rhs(K);
      for (std::size_t k = 0; k < K; ++k) {
        f[k] = diag_[k].l2_sq;
        rhs[k] = -2.0 * diag_[k].energy_rho;
      }
      Worst w("l2_identity", Relation::Equal);
      const std::string res = fd_identity(w, f, rhs);
      push(w.finish("d/dt |u|^2 vs -2 E_rho; " + res));
    } else {
      push(not_applicable("l2_identity", fd_why));
    }

    const bool sigma_ok = std::all_of(diag_.begin(), diag_.end(), [](const auto& r) { return r.energy_sigma.has_value(); });
    if (fd_ok && sigma_ok) {
      std::vector<double> f(K), rhs(K);
      for (std::size_t k = 0; k < K; ++k) {
        f[k] = *diag_[k].energy_sigma;
        rhs[k] = -2.0 * ut_sq[k];
      }
      Worst w("sigma_energy_identity", Relation::Equal);
      const std::string res = fd_identity(w, f, rhs);
      push(w.finish("d/dt E_sigma vs -2 |u_t|^2; " + res));
    } else {
      push(not_applicable("sigma_energy_identity", fd_ok ? "sigma undefined for this kernel" : fd_why));
    }

    const auto alpha = pure_power_exponent(model_.kernel);
    if (fd_ok && alpha && *alpha > 0.0) {
      std::vector<double> f(K), rhs(K);
      for (std::size_t k = 0; k < K; ++k) {
        f[k] = diag_[k].energy_rho;
        rhs[k] = (*alpha - 2.0) * ut_sq[k];
      }
      Worst w("power_energy_identity", Relation::Equal);
      const std::string res = fd_identity(w, f, rhs);
      push(w.finish("d/dt E_rho vs (alpha - 2) |u_t|^2; " + res));
    } else {
      push(not_applicable("power_energy_identity", fd_ok ? "needs an uncapped power kernel" : fd_why));
    }

    const auto hom = homogeneous_exponent(model_.kernel);
    if (fd_ok && hom && *hom < 2.0) {
      std::vector<double> g(K), rhs(K);
      for (std::size_t k = 0; k < K; ++k) {
        g[k] = diag_[k].energy_rho;
        const double f = static_cast<double>(d_ + 1) * diag_[k].variance;
        rhs[k] = f > 0.0 ? -(2.0 - *hom) * g[k] * g[k] / f : 0.0;
      }
      Worst w("differential_inequality", Relation::AtMost);
      const std::string res = fd_identity(w, g, rhs);
      push(w.finish("g_t <= -(2 - alpha) g^2 / f; " + res));
    } else {
      push(not_applicable("differential_inequality", fd_ok ? "needs rho = c s^-alpha with 0 <= alpha < 2" : fd_why));
    }

    if (fd_ok && positive_scalar_) {
      std::vector<double> f(K), rhs(K);
      for (std::size_t k = 0; k < K; ++k) {
        f[k] = *diag_[k].entropy;
        rhs[k] = entropy_rate(tr_.states[k], model_.kernel);
      }
      Worst w("entropy_rate", Relation::Equal);
      const std::string res = fd_identity(w, f, rhs);
      push(w.finish("d/dt S vs the pairwise log-ratio sum (each term >= 0); " + res));
    } else {
      push(not_applicable("entropy_rate", fd_ok ? "needs a positive scalar state" : fd_why));
    }

    variance_rate();
    convexity();
  }

  void variance_rate() {
    const auto alpha = model_.kernel.power_exponent();
    const bool ok = model_.symmetric() && model_.kernel.dominates_inverse_power() && alpha && *alpha > 0.0 && *alpha < 2.0;
    if (!ok) {
      push(not_applicable("variance_rate", "needs rho >= s^-alpha with 0 < alpha < 2"));
      push(not_applicable("consensus_time", "needs rho >= s^-alpha with 0 < alpha < 2"));
    } else {
      const double c = variance_decay_rate(d_, *alpha);
      Worst w("variance_rate", Relation::AtMost);
      for (std::size_t k = 1; k + 1 < tr_.size(); ++k) {
        if (diag_[k - 1].variance == 0.0) break;
        const double slope = (std::pow(diag_[k + 1].variance, *alpha / 2.0) - std::pow(diag_[k - 1].variance, *alpha / 2.0)) /
                             (tr_.times[k + 1] - tr_.times[k - 1]);
        w.add(slope, -c, 1e-6, tr_.times[k]);
      }
      push(w.finish("secant slope of Var^{alpha/2}; c = " + fmt(c)));

      const double bound = consensus_time_bound(diag_.front().variance, d_, *alpha);
      if (tr_.consensus_time) {
        Worst ct("consensus_time", Relation::AtMost);
        ct.add(*tr_.consensus_time, bound, 0.01 * bound, *tr_.consensus_time);
        push(ct.finish());
      } else if (tr_.stop == StopReason::Completed && tr_.times.back() > 1.01 * bound) {
        Worst ct("consensus_time", Relation::AtMost);
        ct.add(kInf, bound, 0.01 * bound);
        push(ct.finish("no consensus by t_end"));
      } else {
        push(not_applicable("consensus_time", "trajectory ends before the bound " + fmt(bound)));
      }
    }

    if (model_.symmetric() && constant_at_least_one(model_.kernel)) {
      const double dd = static_cast<double>(d_);
      const double rate = (dd + 1.0) * (dd + 1.0) / (dd * dd);
      Worst w("log_variance_rate", Relation::AtMost);
      for (std::size_t k = 1; k + 1 < tr_.size(); ++k) {
        const double lo = diag_[k + 1].variance;
        const double floor = std::pow(1e3 * kEps * (1.0 + inf_norm(diag_[k].mean)), 2.0);
        if (lo <= floor) break;
        const double slope = (std::log(lo) - std::log(diag_[k - 1].variance)) / (tr_.times[k + 1] - tr_.times[k - 1]);
        w.add(slope, -rate, 1e-6, tr_.times[k]);
      }
      push(w.finish("secant slope of log Var"));
    } else {
      push(not_applicable("log_variance_rate", "needs rho >= 1 everywhere"));
    }
  }

  void convexity() {
    const auto hom = homogeneous_exponent(model_.kernel);
    const bool ok = model_.symmetric() && hom && *hom < 2.0;
    const std::string why = "needs rho = c s^-alpha with 0 <= alpha < 2";
    const bool i_ok = ok && *hom > 0.0;
    const double alpha = ok ? *hom : 0.0;
    const std::size_t K = tr_.size();
    std::vector<double> var(K), I(K);
    for (std::size_t k = 0; k < K; ++k) {
      var[k] = diag_[k].variance;
      I[k] = std::pow(var[k], alpha / 2.0);
    }
    const double tol = 1e-6 * I.front();

    auto second = [&](const std::string& name, const std::vector<double>& f) {
      Worst w(name, Relation::AtLeast);
      for (std::size_t k = 1; k + 1 < K; ++k) {
        if (snapped_between(k - 1, k + 1)) continue;
        const double h1 = tr_.times[k] - tr_.times[k - 1];
        const double h2 = tr_.times[k + 1] - tr_.times[k];
        const double diff = 2.0 * ((h2 * f[k - 1] + h1 * f[k + 1]) / (h1 + h2) - f[k]);
        w.add(diff, 0.0, tol, tr_.times[k]);
      }
      push(w.finish("second differences away from merges, tolerance 1e-6 I(0)"));
    };
    if (i_ok) second("convexity_I", I);
    else push(not_applicable("convexity_I", "needs rho = c s^-alpha with 0 < alpha < 2"));
    if (ok) second("convexity_var", var);
    else push(not_applicable("convexity_var", why));

    if (!i_ok || tr_.times.back() <= 0.0) {
      push(not_applicable("three_circles_I", "needs rho = c s^-alpha with 0 < alpha < 2"));
      push(not_applicable("three_circles_var", "needs rho = c s^-alpha with 0 < alpha < 2"));
      return;
    }
    std::mt19937_64 rng(opt_.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Worst wi("three_circles_I", Relation::AtMost);
    Worst wv("three_circles_var", Relation::AtMost);
    const double end = tr_.times.back();
    for (std::size_t p = 0; p < opt_.three_circle_pairs; ++p) {
      double s = end * (0.05 + 0.95 * unit(rng));
      double r = s * (0.02 + 0.96 * unit(rng));
      const auto ei = check_three_circles(tr_.times, I, r, s);
      wi.add(ei.measured, ei.bound, ei.tolerance, ei.at_time);
      // Var uses the same tolerance scale as I.
      const auto ev = check_three_circles(tr_.times, var, r, s);
      wv.add(ev.measured, ev.bound, tol, ev.at_time);
    }
    push(wi.finish("random (r, s) pairs, seed " + std::to_string(opt_.seed)));
    push(wv.finish("random (r, s) pairs, seed " + std::to_string(opt_.seed)));
  }

  const Trajectory& tr_;
  const CertificateOptions& opt_;
  const InfluenceModel& model_;
  std::size_t d_;
  std::vector<DiagnosticsRecord> diag_;
  const OpinionState* u0_ = nullptr;
  double osc0_ = 0.0;
  double scale_ = 1.0;
  bool discrete_ = true;
  bool adjacent_ = true;
  bool positive_scalar_ = false;
  CertificateReport report_;
};

}  // namespace

CertificateReport verify_trajectory_certificates(const Trajectory& trajectory, const CertificateOptions& options) {
  if (trajectory.size() < 2) throw DomainError("certificates need at least two samples");
  if (trajectory.times.size() != trajectory.states.size()) throw DomainError("times and states differ in length");
  return Runner(trajectory, options).run();
}

}  // namespace consensus
