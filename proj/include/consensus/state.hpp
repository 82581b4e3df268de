#pragma once

#include <functional>
#include <span>
#include <vector>

#include "consensus/kernel.hpp"
#include "consensus/matrix.hpp"

namespace consensus {

// Opinion map u: Gamma -> R^n on the complete graph with d + 1 vertices.
// Row v of `values()` is u(v). Adjacency is implicit.
class OpinionState {
 public:
  OpinionState() = default;
  explicit OpinionState(Matrix values);

  std::size_t d() const { return values_.rows() - 1; }
  std::size_t n() const { return values_.cols(); }
  std::size_t vertices() const { return values_.rows(); }

  const Matrix& values() const { return values_; }
  std::span<const double> row(std::size_t v) const { return values_.row(v); }
  double operator()(std::size_t v, std::size_t i) const { return values_(v, i); }

  bool operator==(const OpinionState&) const = default;

 private:
  Matrix values_;
};

using Vector = std::vector<double>;
using WeightFn = std::function<double(double)>;

Vector average(const OpinionState& u);
double variance(const OpinionState& u);
double l2_squared(const OpinionState& u);
// ||u - A_u||_2^2 = (d + 1) Var_u.
double centered_l2_squared(const OpinionState& u);
double grad_sup_norm(const OpinionState& u);
// max_v |u(v) - A_u|.
double max_deviation_from_mean(const OpinionState& u);
double max_row_norm(const OpinionState& u);
Vector max_per_coord(const OpinionState& u);
Vector min_per_coord(const OpinionState& u);

// (1/d) sum over unoriented edges of |du|^2 weight(|du|); zero-length edges
// contribute nothing.
double weighted_energy(const OpinionState& u, const WeightFn& weight);
double weighted_energy(const OpinionState& u, const Kernel& kernel);
// Energy with weight rho^2.
double squared_kernel_energy(const OpinionState& u, const Kernel& kernel);

bool is_positive_scalar(const OpinionState& u);
double entropy(const OpinionState& u);
double renyi_entropy(const OpinionState& u, double alpha);
// sum_v u(v)^alpha for positive scalar states.
double power_sum(const OpinionState& u, double alpha);

}  // namespace consensus
