#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "consensus/error.hpp"
#include "consensus/kernel.hpp"

using namespace consensus;

TEST_CASE("kernel evaluation") {
  CHECK(Kernel::constant(0.5)(7.0) == 0.5);
  CHECK(Kernel::power_law(1.0)(3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(Kernel::clamped_power(1.0, 1.0, true)(0.5) == 1.0);
  CHECK(Kernel::clamped_power(1.0, 1.0, true)(4.0) == 0.25);
  CHECK(Kernel::clamped_power(2.0, 1.0, true, 0.5)(1.0) == 0.5);
  CHECK(Kernel::power_law(1.0, 1.0, true)(0.25) == 1.0);
  CHECK_THROWS_AS(Kernel::constant(1.0)(-1.0), DomainError);
  CHECK(std::isinf(Kernel::power_law(1.0)(0.0)));
}

TEST_CASE("singular kernels give coincident pairs zero weight") {
  const Kernel k = Kernel::power_law(1.5);
  CHECK(k.singular_at_zero());
  CHECK(k.coupling(0.0) == 0.0);
  std::vector<double> out{0.0, 0.0};
  const std::vector<double> zero{0.0, 0.0};
  k.accumulate_weighted_difference(zero, out);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
}

TEST_CASE("capped kernels stay in [0, 1]") {
  const Kernel kernels[] = {Kernel::constant(1.0), Kernel::clamped_power(3.0, 1.5),
                            Kernel::power_law(0.5, 1.0, true),
                            Kernel::table({{0.0, 1.0}, {1.0, 0.5}, {4.0, 0.1}})};
  for (const auto& k : kernels) {
    for (double s = 0.0; s < 50.0; s += 0.037) {
      const double v = k(s);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("sigma examples") {
  CHECK(sigma_from_rho(Kernel::constant(0.3), 5.0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(sigma_from_rho(Kernel::power_law(1.0), 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  // rho = min(1, 1/s): sigma(2) = 2 (1/2 + 1) / 4.
  CHECK(sigma_from_rho(Kernel::clamped_power(1.0, 1.0, true), 2.0) == doctest::Approx(0.75).epsilon(1e-14));
  std::vector<TableKernel::Knot> knots;
  for (int i = 0; i <= 4000; ++i) {
    const double s = i * 1e-3;
    knots.push_back({s, s <= 1.0 ? 1.0 : 1.0 / s});
  }
  CHECK(sigma_from_rho(Kernel::table(knots), 2.0) == doctest::Approx(0.75).epsilon(1e-6));
  CHECK_THROWS_AS(sigma_from_rho(Kernel::power_law(2.0), 1.0), UnsupportedError);
  CHECK_THROWS_AS(sigma_from_rho(Kernel::power_law(2.5), 1.0), UnsupportedError);
  CHECK_THROWS_AS(sigma_from_rho(Kernel::constant(1.0), 0.0), DomainError);
}

TEST_CASE("formal sigma for the inverse square kernel") {
  const Kernel k = Kernel::inverse_square_formal_sigma();
  CHECK(k(3.0) == doctest::Approx(2.0 * std::log(3.0) / 9.0).epsilon(1e-14));
}

TEST_CASE("sigma from power law matches quadrature of the definition") {
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (double alpha : {0.25, 0.5, 1.0, 1.5, 1.9}) {
    for (double s : {0.1, 0.5, 1.0, 3.0, 17.0, 100.0}) {
      const double integral = integrator.integrate([&](double t) { return std::pow(t, 1.0 - alpha); }, 0.0, s);
      const double oracle = 2.0 * integral / (s * s);
      CHECK(sigma_from_rho(Kernel::power_law(alpha), s) == doctest::Approx(oracle).epsilon(1e-9));
    }
  }
}

TEST_CASE("sigma properties for nonincreasing kernels") {
  const Kernel kernels[] = {Kernel::clamped_power(1.0, 1.0), Kernel::clamped_power(2.0, 0.5),
                            Kernel::table({{0.0, 1.0}, {0.5, 0.8}, {2.0, 0.2}, {5.0, 0.05}}),
                            Kernel::constant(0.7)};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 20.0);
  for (const auto& k : kernels) {
    const double rho0 = k(0.0);
    for (int trial = 0; trial < 200; ++trial) {
      double r = u(rng);
      double s = u(rng);
      if (r > s) std::swap(r, s);
      if (r == s) continue;
      const double sr = sigma_from_rho(k, r);
      const double ss = sigma_from_rho(k, s);
      const double slack = 1e-10;
      CHECK(k(s) <= ss + slack);
      CHECK(ss <= rho0 + slack);
      CHECK(ss <= sr + slack);
      const double q = (r / s) * (r / s);
      CHECK(ss <= q * sr + (1.0 - q) * k(r) + slack);
    }
  }
}

TEST_CASE("kernel assumption report") {
  const KernelReport c = check_kernel_assumptions(Kernel::constant(0.4), 0.0, 10.0, 1001);
  CHECK(c.is_nonincreasing);
  CHECK(c.lower_bound_a == doctest::Approx(0.4));
  CHECK_FALSE(c.linear_decay_ok);
  CHECK(c.range_ok);

  const KernelReport p = check_kernel_assumptions(Kernel::power_law(1.0), 1.0, 100.0, 1001);
  CHECK(p.linear_decay_ok);
  REQUIRE(p.derivative_constant_C);
  CHECK(*p.derivative_constant_C == doctest::Approx(1.0).epsilon(1e-9));

  const KernelReport inc =
      check_kernel_assumptions(Kernel::custom([](double s) { return std::min(1.0, 0.1 + 0.1 * s); }), 0.0, 5.0, 101);
  CHECK_FALSE(inc.is_nonincreasing);
  REQUIRE(inc.derivative_constant_C);

  const KernelReport big = check_kernel_assumptions(Kernel::power_law(1.0), 0.1, 10.0, 101);
  CHECK_FALSE(big.range_ok);
}

TEST_CASE("custom kernel derivative falls back to finite differences") {
  const Kernel k = Kernel::custom([](double s) { return 1.0 / (1.0 + s * s); });
  CHECK_FALSE(k.derivative_available());
  const KernelReport r = check_kernel_assumptions(k, 0.0, 10.0, 501);
  REQUIRE(r.derivative_constant_C);
  // s |rho'| / rho = 2 s^2 / (1 + s^2) < 2
  CHECK(*r.derivative_constant_C < 2.0);
  CHECK(*r.derivative_constant_C > 1.9);
}

TEST_CASE("invalid kernel parameters") {
  CHECK_THROWS_AS(Kernel::constant(-0.1), DomainError);
  CHECK(Kernel::constant(1.5, true)(2.0) == 1.0);
  CHECK_THROWS_AS(Kernel::power_law(-1.0), DomainError);
  CHECK_THROWS_AS(Kernel::table({}), DomainError);
  CHECK_THROWS_AS(Kernel::table({{1.0, 0.5}, {1.0, 0.2}}), DomainError);
  CHECK_THROWS_AS(Kernel::clamped_power(1.0, 1.0, true, 1.5), DomainError);
}
