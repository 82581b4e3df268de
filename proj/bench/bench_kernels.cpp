// Serial reference versus OpenMP kernels. Usage: bench_kernels [vertices] [repeats]

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>

#include "consensus/nbody.hpp"
#include "consensus/operators.hpp"

using namespace consensus;

namespace {

double time_ms(const std::function<Matrix()>& f, int repeats, Matrix& last) {
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) last = f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count() / repeats;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

void row(const char* name, const std::function<Matrix()>& serial, const std::function<Matrix()>& parallel,
         int repeats) {
  Matrix a, b;
  const double ts = time_ms(serial, repeats, a);
  const double tp = time_ms(parallel, repeats, b);
  std::printf("%-22s %12.3f %12.3f %9.2fx %12.3g\n", name, ts, tp, ts / tp, max_abs_diff(a, b));
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t V = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 1000;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  Matrix m(V, 3);
  for (double& x : m.data()) x = unit(rng);
  const OpinionState u(m);
  const InfluenceModel model = InfluenceModel::standard(Kernel::clamped_power(0.5, 1.0));

  PhaseState p;
  p.x = m;
  p.v = Matrix(V, 3);
  p.m.assign(V, 1.0);

  std::printf("vertices %zu, n 3, threads %d, repeats %d\n", V, omp_get_max_threads(), repeats);
  std::printf("%-22s %12s %12s %10s %12s\n", "kernel", "serial ms", "openmp ms", "speedup", "max |diff|");
  row("apply_L", [&] { return reference::apply_L(u, model); }, [&] { return apply_L(u, model); }, repeats);
  row("effective_weights", [&] { return reference::effective_weights(u, model); },
      [&] { return effective_weights(u, model); }, repeats);
  row("nbody_acceleration", [&] { return reference::nbody_acceleration(p); }, [&] { return nbody_acceleration(p); },
      repeats);
  return 0;
}
