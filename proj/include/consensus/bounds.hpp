#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "consensus/clusters.hpp"
#include "consensus/evolution.hpp"
#include "consensus/kernel.hpp"
#include "consensus/state.hpp"

namespace consensus {

// e^{-a (d-1)/d}. Throws DomainError unless a in [0, 1] and d >= 2; with two
// vertices the graph is bipartite and the oscillation need not decay.
double grad_decay_factor(double a, std::size_t d);
// (1 - a/d)^{d-1}, never larger than grad_decay_factor.
double grad_decay_pre_exponential(double a, std::size_t d);
// 1 - a (d-1)/(2d), the factor for the rank-dependent model.
double grad_decay_conservative(double a, std::size_t d);

// c_{d,alpha}; throws DomainError unless 0 < alpha < 2 and d >= 1.
double variance_decay_rate(std::size_t d, double alpha);
// var0^{alpha/2} / c_{d,alpha}.
double consensus_time_bound(double var0, std::size_t d, double alpha);

// K in ||u - A_u||_2^{2-alpha} <= K ||grad u||^2_{2,rho} for rho >= s^-alpha:
// 2 (d/(d+1))^{2-alpha} for 0 <= alpha <= 1 and 2d/(d+1)^{2-alpha} for
// 1 < alpha < 2.
double poincare_constant(std::size_t d, double alpha);
// Constant C with ||u - A_u||_2^{2-alpha} <= C (E + E^{(2-alpha)/2}) when
// rho(s) >= c s^-alpha for s >= 1 and rho >= c below 1. Taking p = (2-alpha)/2
// and N = d(d+1)/2 edges, C = K max(1/c, N^{1-p} d^{p-1} c^{-p}).
double clamped_poincare_constant(std::size_t d, double alpha, double c);

struct BoundSet {
  std::optional<double> grad_factor_sharp;
  std::optional<double> grad_factor_pre_exponential;
  std::optional<double> grad_factor_conservative;
  std::optional<double> variance_rate;
  std::optional<double> consensus_time;
  std::optional<double> poincare_constant;
  std::vector<std::string> notes;  // why an entry is absent
};

// Every bound that the parameters admit. Throws DomainError when alpha lies
// outside [0, 2) or d == 0.
BoundSet evaluate_bounds(double a, std::size_t d, double alpha, std::optional<double> var0);

enum class CertStatus { Pass, Fail, NotApplicable };
enum class Relation { AtMost, AtLeast, Equal };

const char* to_string(CertStatus s);
const char* to_string(Relation r);

// One checked inequality. For AtMost the margin is bound - measured, for
// AtLeast measured - bound and for Equal -|measured - bound|; the entry
// passes when margin >= -tolerance. Values are taken at the worst sample.
struct CertificateEntry {
  std::string name;
  CertStatus status = CertStatus::NotApplicable;
  Relation relation = Relation::AtMost;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  std::optional<double> at_time;
  std::size_t checked = 0;  // number of samples or steps compared
  std::string note;
};

struct CertificateReport {
  std::vector<CertificateEntry> entries;

  bool passed() const;  // no applicable entry fails
  std::size_t count(CertStatus s) const;
  const CertificateEntry* find(const std::string& name) const;
};

// Nonlinear Poincare inequality for a scalar state with rho(s) = s^-alpha,
// 0 <= alpha < 2.
CertificateEntry check_poincare(const OpinionState& u, double alpha);
// Clamped form for a kernel with rho(s) >= c s^-alpha on s >= 1 and rho >= c
// below 1, 0 < alpha < 2. The right side is
// K (E/c + N^{1-p} d^{p-1} c^{-p} E^p) with E the rho-energy of `kernel`.
CertificateEntry check_poincare(const OpinionState& u, const Kernel& kernel, double alpha, double c);

// Both three-circles inequalities at 0 < r < s <= last time, using linear
// interpolation of the samples; tolerance 1e-6 I(0). Throws DomainError for
// r >= s or times outside the sampled range.
CertificateEntry check_three_circles(const std::vector<double>& times, const std::vector<double>& values, double r,
                                     double s);

struct CertificateOptions {
  std::optional<Members> cluster;          // tracked for contraction
  double cluster_stop_distance = 10.0;     // stop once dist_to_rest falls below
  std::size_t three_circle_pairs = 10;
  std::uint64_t seed = 0;                  // for the three-circles (r, s) pairs
  std::vector<double> renyi_alphas{0.5, 2.0, 5.0};
  std::set<std::string> disabled;
};

// Runs every certificate; entries whose hypotheses fail are reported
// not-applicable with the reason in `note`.
CertificateReport verify_trajectory_certificates(const Trajectory& trajectory, const CertificateOptions& options = {});

}  // namespace consensus
