#include "consensus/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "consensus/error.hpp"
#include "consensus/matrix.hpp"

namespace consensus {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double power(double coeff, double s, double alpha) {
  if (alpha == 0.0) return coeff;
  if (s == 0.0) return alpha > 0.0 ? kInf : 0.0;
  return coeff * std::pow(s, -alpha);
}

double table_value(const TableKernel& t, double s) {
  const auto& k = t.knots;
  if (s <= k.front().s) return k.front().rho;
  if (s >= k.back().s) return k.back().rho;
  auto hi = std::upper_bound(k.begin(), k.end(), s,
                             [](double x, const TableKernel::Knot& knot) { return x < knot.s; });
  auto lo = hi - 1;
  const double w = (s - lo->s) / (hi->s - lo->s);
  return lo->rho + w * (hi->rho - lo->rho);
}

double table_slope(const TableKernel& t, double s) {
  const auto& k = t.knots;
  if (s < k.front().s || s >= k.back().s) return 0.0;
  auto hi = std::upper_bound(k.begin(), k.end(), s,
                             [](double x, const TableKernel::Knot& knot) { return x < knot.s; });
  auto lo = hi - 1;
  return (hi->rho - lo->rho) / (hi->s - lo->s);
}

}  // namespace

Kernel Kernel::constant(double p, bool cap_at_one) {
  if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("constant kernel requires finite p >= 0");
  return Kernel(ConstantKernel{p}, cap_at_one);
}

Kernel Kernel::power_law(double alpha, double coeff, bool cap_at_one) {
  if (!(alpha >= 0.0) || !(coeff > 0.0)) throw DomainError("power kernel requires alpha >= 0, coeff > 0");
  return Kernel(PowerLawKernel{alpha, coeff}, cap_at_one);
}

Kernel Kernel::clamped_power(double c, double alpha, bool cap_at_one, double ceiling) {
  if (!(c > 0.0) || !(alpha >= 0.0)) throw DomainError("clamped power kernel requires c > 0, alpha >= 0");
  if (!(ceiling > 0.0 && ceiling <= 1.0)) throw DomainError("clamped power ceiling must lie in (0, 1]");
  return Kernel(ClampedPowerKernel{c, alpha, ceiling}, cap_at_one);
}

Kernel Kernel::table(std::vector<TableKernel::Knot> knots, bool cap_at_one) {
  if (knots.empty()) throw DomainError("table kernel needs at least one knot");
  std::sort(knots.begin(), knots.end(), [](const auto& a, const auto& b) { return a.s < b.s; });
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].s) || !std::isfinite(knots[i].rho) || knots[i].rho < 0.0 || knots[i].s < 0.0)
      throw DomainError("table kernel knots must be finite with s >= 0 and rho >= 0");
    if (i > 0 && knots[i].s == knots[i - 1].s) throw DomainError("table kernel knots must have distinct s");
  }
  return Kernel(TableKernel{std::move(knots)}, cap_at_one);
}

Kernel Kernel::custom(std::function<double(double)> fn, std::function<double(double)> derivative,
                      bool cap_at_one, std::string name) {
  if (!fn) throw DomainError("custom kernel needs a callable");
  return Kernel(CustomKernel{std::move(fn), std::move(derivative), std::move(name)}, cap_at_one);
}

Kernel Kernel::inverse_square_formal_sigma() {
  return custom([](double s) { return s == 0.0 ? kInf : 2.0 * std::log(s) / (s * s); },
                [](double s) { return (2.0 - 4.0 * std::log(s)) / (s * s * s); }, false,
                "inverse_square_formal_sigma");
}

double Kernel::raw(double s) const {
  return std::visit(Overloaded{
                        [&](const ConstantKernel& k) { return k.p; },
                        [&](const PowerLawKernel& k) { return power(k.coeff, s, k.alpha); },
                        [&](const ClampedPowerKernel& k) { return power(k.c, s, k.alpha); },
                        [&](const TableKernel& k) { return table_value(k, s); },
                        [&](const CustomKernel& k) { return k.fn(s); },
                    },
                    variant_);
}

double Kernel::operator()(double s) const {
  if (!(s >= 0.0)) throw DomainError("kernel evaluated at negative distance");
  const double v = raw(s);
  if (!cap_) return v;
  const double ceiling =
      std::holds_alternative<ClampedPowerKernel>(variant_) ? std::get<ClampedPowerKernel>(variant_).ceiling : 1.0;
  return std::min(v, ceiling);
}

std::optional<double> Kernel::derivative(double s) const {
  if (!(s >= 0.0)) throw DomainError("kernel derivative at negative distance");
  const double ceiling =
      std::holds_alternative<ClampedPowerKernel>(variant_) ? std::get<ClampedPowerKernel>(variant_).ceiling : 1.0;
  if (cap_ && raw(s) >= ceiling) return 0.0;
  return std::visit(Overloaded{
                        [&](const ConstantKernel&) -> std::optional<double> { return 0.0; },
                        [&](const PowerLawKernel& k) -> std::optional<double> {
                          return -k.alpha * k.coeff * std::pow(s, -k.alpha - 1.0);
                        },
                        [&](const ClampedPowerKernel& k) -> std::optional<double> {
                          return -k.alpha * k.c * std::pow(s, -k.alpha - 1.0);
                        },
                        [&](const TableKernel& k) -> std::optional<double> { return table_slope(k, s); },
                        [&](const CustomKernel& k) -> std::optional<double> {
                          if (!k.derivative) return std::nullopt;
                          return k.derivative(s);
                        },
                    },
                    variant_);
}

double Kernel::coupling(double dist) const {
  if (dist == 0.0 && singular_at_zero()) return 0.0;
  return (*this)(dist);
}

void Kernel::accumulate_weighted_difference(std::span<const double> diff, std::span<double> out,
                                            double scale) const {
  const double dist = norm(diff);
  if (dist == 0.0) return;
  const double w = (*this)(dist) * scale;
  for (std::size_t i = 0; i < diff.size(); ++i) out[i] += w * diff[i];
}

bool Kernel::derivative_available() const {
  if (const auto* c = std::get_if<CustomKernel>(&variant_)) return static_cast<bool>(c->derivative);
  return true;
}

Kernel::Kernel(Variant v, bool cap) : variant_(std::move(v)), cap_(cap) {
  singular_ = !cap_ && std::visit(Overloaded{
                        [](const ConstantKernel&) { return false; },
                        [](const PowerLawKernel& k) { return k.alpha > 0.0; },
                        [](const ClampedPowerKernel& k) { return k.alpha > 0.0; },
                        [](const TableKernel&) { return false; },
                        [](const CustomKernel& k) {
                          try {
                            return !std::isfinite(k.fn(0.0));
                          } catch (const std::exception&) {
                            return true;
                          }
                        },
                    },
                    variant_);
}

std::optional<double> Kernel::power_exponent() const {
  if (const auto* p = std::get_if<PowerLawKernel>(&variant_)) return p->alpha;
  if (const auto* c = std::get_if<ClampedPowerKernel>(&variant_)) return c->alpha;
  return std::nullopt;
}

bool Kernel::dominates_inverse_power() const {
  if (cap_) return false;
  if (const auto* p = std::get_if<PowerLawKernel>(&variant_)) return p->coeff >= 1.0;
  if (const auto* c = std::get_if<ClampedPowerKernel>(&variant_)) return c->c >= 1.0;
  return false;
}

std::vector<double> Kernel::breakpoints() const {
  std::vector<double> out;
  if (const auto* t = std::get_if<TableKernel>(&variant_)) {
    for (const auto& k : t->knots) out.push_back(k.s);
  } else if (cap_) {
    if (const auto* p = std::get_if<PowerLawKernel>(&variant_); p && p->alpha > 0.0) {
      out.push_back(std::pow(p->coeff, 1.0 / p->alpha));
    } else if (const auto* c = std::get_if<ClampedPowerKernel>(&variant_); c && c->alpha > 0.0) {
      out.push_back(std::pow(c->c / c->ceiling, 1.0 / c->alpha));
    }
  }
  return out;
}

std::string Kernel::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const ConstantKernel& k) { os << "constant(p=" << k.p << ")"; },
                 [&](const PowerLawKernel& k) { os << "power(alpha=" << k.alpha << ", coeff=" << k.coeff << ")"; },
                 [&](const ClampedPowerKernel& k) {
                   os << "clamped_power(c=" << k.c << ", alpha=" << k.alpha << ", ceiling=" << k.ceiling << ")";
                 },
                 [&](const TableKernel& k) { os << "table(" << k.knots.size() << " knots)"; },
                 [&](const CustomKernel& k) { os << k.name; },
             },
             variant_);
  if (cap_) os << " capped";
  return os.str();
}

double sigma_from_rho(const Kernel& kernel, double s) {
  if (!(s > 0.0)) throw DomainError("sigma requires s > 0");
  const auto& v = kernel.variant();
  if (std::holds_alternative<ConstantKernel>(v)) return kernel(s);
  double alpha = 0.0;
  double coeff = 0.0;
  if (const auto* p = std::get_if<PowerLawKernel>(&v)) {
    alpha = p->alpha;
    coeff = p->coeff;
  } else if (const auto* c = std::get_if<ClampedPowerKernel>(&v)) {
    alpha = c->alpha;
    coeff = c->c;
  }
  if (coeff > 0.0 && alpha > 0.0) {
    // int_0^s tau rho = ceiling b^2 / 2 + coeff int_b^s tau^{1 - alpha}, b the kink.
    const auto bp = kernel.breakpoints();
    const double b = bp.empty() ? 0.0 : std::min(bp.front(), s);
    const double flat = b > 0.0 ? kernel(b / 2.0) * b * b / 2.0 : 0.0;
    if (b == 0.0 && alpha >= 2.0) throw UnsupportedError("sigma diverges for power kernels with alpha >= 2");
    double tail = 0.0;
    if (s > b) {
      tail = alpha == 2.0 ? coeff * std::log(s / b)
                          : coeff * (std::pow(s, 2.0 - alpha) - std::pow(b, 2.0 - alpha)) / (2.0 - alpha);
    }
    return 2.0 * (flat + tail) / (s * s);
  }

  // Adaptive Gauss-Kronrod on each smooth piece of [0, s].
  std::vector<double> cuts{0.0};
  for (double b : kernel.breakpoints()) {
    if (b > 0.0 && b < s) cuts.push_back(b);
  }
  cuts.push_back(s);
  auto integrand = [&](double tau) { return tau == 0.0 ? 0.0 : tau * kernel(tau); };
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    integral += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, cuts[i], cuts[i + 1],
                                                                              12, 1e-12);
  }
  return 2.0 * integral / (s * s);
}

KernelReport check_kernel_assumptions(const Kernel& kernel, double s_min, double s_max, std::size_t samples) {
  if (!(s_min >= 0.0) || !(s_max > s_min)) throw DomainError("require 0 <= s_min < s_max");
  if (samples < 2) throw DomainError("require at least two samples");

  KernelReport report;
  std::vector<double> grid(samples);
  std::vector<double> vals(samples);
  const double step = (s_max - s_min) / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    grid[i] = (i + 1 == samples) ? s_max : s_min + step * static_cast<double>(i);
    vals[i] = kernel(grid[i]);
  }

  double lowest = kInf;
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = vals[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) report.range_ok = false;
    lowest = std::min(lowest, v);
    if (i > 0 && !(vals[i] <= vals[i - 1] + 1e-14 * std::max(1.0, std::abs(vals[i - 1])))) {
      report.is_nonincreasing = false;
    }
  }
  report.lower_bound_a = std::max(0.0, lowest);

  // Linear decay for 1 <= s1 < s2 is monotonicity of s * rho(s) there; on the
  // sample set, consecutive comparisons imply all pairwise ones.
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < samples; ++i) {
    if (grid[i] < 1.0) continue;
    if (prev) {
      const double lhs = grid[i] * vals[i];
      const double rhs = grid[*prev] * vals[*prev];
      if (!(lhs <= rhs * (1.0 + 1e-12) + 1e-15)) report.linear_decay_ok = false;
    }
    prev = i;
  }

  const double h = (s_max - s_min) / 1e6;
  std::optional<double> c_max;
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = grid[i];
    if (s < 1.0 || !(vals[i] > 0.0) || !std::isfinite(vals[i])) continue;
    double deriv = 0.0;
    if (kernel.derivative_available()) {
      deriv = *kernel.derivative(s);
    } else {
      deriv = (kernel(s + h) - kernel(std::max(0.0, s - h))) / (s + h - std::max(0.0, s - h));
    }
    const double ratio = s * std::abs(deriv) / vals[i];
    c_max = std::max(c_max.value_or(0.0), ratio);
  }
  report.derivative_constant_C = c_max;
  return report;
}

}  // namespace consensus
