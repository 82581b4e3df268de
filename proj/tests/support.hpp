#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "consensus/state.hpp"

namespace testing_support {

inline consensus::OpinionState random_state(std::mt19937_64& rng, std::size_t vertices, std::size_t n,
                                            double low = -1.0, double high = 1.0) {
  std::uniform_real_distribution<double> u(low, high);
  consensus::Matrix m(vertices, n);
  for (double& x : m.data()) x = u(rng);
  return consensus::OpinionState(std::move(m));
}

inline consensus::OpinionState scalar(std::initializer_list<double> values) {
  consensus::Matrix m(values.size(), 1);
  std::size_t i = 0;
  for (double v : values) m(i++, 0) = v;
  return consensus::OpinionState(std::move(m));
}

inline double rel_err(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) / scale;
}

}  // namespace testing_support
