#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace consensus {

// rho(s) = p
struct ConstantKernel {
  double p;
};

// rho(s) = coeff * s^-alpha
struct PowerLawKernel {
  double alpha;
  double coeff = 1.0;
};

// rho(s) = min(ceiling, c * s^-alpha) when capped, c * s^-alpha otherwise.
// The ceiling defaults to one; a smaller ceiling gives rho <= rho0 < 1.
struct ClampedPowerKernel {
  double c;
  double alpha;
  double ceiling = 1.0;
};

// Piecewise-linear through (s, rho) knots, constant outside the knot range.
struct TableKernel {
  struct Knot {
    double s;
    double rho;
  };
  std::vector<Knot> knots;
};

struct CustomKernel {
  std::function<double(double)> fn;
  std::function<double(double)> derivative;  // empty when unavailable
  std::string name = "custom";
};

// Influence kernel rho: [0, inf) -> [0, inf). Immutable after construction
// and safe to evaluate concurrently.
class Kernel {
 public:
  using Variant =
      std::variant<ConstantKernel, PowerLawKernel, ClampedPowerKernel, TableKernel, CustomKernel>;

  static Kernel constant(double p, bool cap_at_one = true);
  static Kernel power_law(double alpha, double coeff = 1.0, bool cap_at_one = false);
  static Kernel clamped_power(double c, double alpha, bool cap_at_one = true, double ceiling = 1.0);
  static Kernel table(std::vector<TableKernel::Knot> knots, bool cap_at_one = true);
  static Kernel custom(std::function<double(double)> fn, std::function<double(double)> derivative = {},
                       bool cap_at_one = false, std::string name = "custom");
  // Formal sigma for rho(s) = s^-2, namely 2 s^-2 log s (not a valid rho
  // near zero; exposed for the energy identity of the inverse-square case).
  static Kernel inverse_square_formal_sigma();

  // rho(s). Throws DomainError for s < 0. Singular kernels return +inf at 0.
  double operator()(double s) const;
  double eval(double s) const { return (*this)(s); }

  // rho'(s) where available (one-sided at kinks: the active branch).
  std::optional<double> derivative(double s) const;

  // Interaction weight for a pair at distance `dist`. Coincident pairs carry
  // weight zero under a singular kernel since their difference vanishes.
  double coupling(double dist) const;

  // out += diff * rho(|diff|), with the zero vector when diff == 0.
  void accumulate_weighted_difference(std::span<const double> diff, std::span<double> out,
                                      double scale = 1.0) const;

  bool cap_at_one() const { return cap_; }
  bool derivative_available() const;
  bool singular_at_zero() const { return singular_; }

  // Exponent alpha for power-type kernels.
  std::optional<double> power_exponent() const;
  // True when rho(s) >= s^-alpha for all s > 0 (uncapped power with coeff >= 1).
  bool dominates_inverse_power() const;
  // Points where rho is not smooth, in increasing order.
  std::vector<double> breakpoints() const;

  const Variant& variant() const { return variant_; }
  std::string describe() const;

 private:
  Kernel(Variant v, bool cap);
  double raw(double s) const;

  Variant variant_;
  bool cap_ = false;
  bool singular_ = false;
};

// sigma(s) = 2 * int_0^s tau rho(tau) dtau / s^2.
double sigma_from_rho(const Kernel& kernel, double s);

struct KernelReport {
  bool is_nonincreasing = true;
  double lower_bound_a = 0.0;
  bool linear_decay_ok = true;
  std::optional<double> derivative_constant_C;
  bool range_ok = true;
};

KernelReport check_kernel_assumptions(const Kernel& kernel, double s_min, double s_max,
                                      std::size_t samples);

}  // namespace consensus
