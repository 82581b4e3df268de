#pragma once

#include <span>
#include <vector>

#include "consensus/matrix.hpp"
#include "consensus/model.hpp"
#include "consensus/state.hpp"

namespace consensus {

// mu_{v,w} for all ordered pairs; diagonal is zero.
Matrix effective_weights(const OpinionState& u, const InfluenceModel& model);

// (L_mu u)(v) = (1/d) sum_{w != v} (u(w) - u(v)) mu_{v,w}, one row per vertex.
// Rows are computed in parallel; each row is summed in a fixed order, so the
// result does not depend on the thread count.
Matrix apply_L(const OpinionState& u, const InfluenceModel& model);

// A_u = u + L_mu u. Requires the convex-combination coefficients mu/d to lie
// in [0, 1] with row sums at most one; throws ModelInvalidError otherwise.
OpinionState time_one_map(const OpinionState& u, const InfluenceModel& model);

// Validation used by time_one_map, exposed for callers holding weights.
void check_convex_weights(const Matrix& weights, std::size_t d);

namespace detail {
// L_mu applied to a raw matrix. When `groups` is non-empty, pairs sharing a
// group label do not interact (rigidly merged vertices).
void apply_L_into(const Matrix& u, const InfluenceModel& model, std::span<const std::size_t> groups, Matrix& out);
// out(v) = u(v) + (1/d) sum_w weights(v, w) (u(w) - u(v))
void apply_weights_into(const Matrix& u, const Matrix& weights, Matrix& out);
}  // namespace detail

// Serial reference implementations, kept independent of the parallel
// kernels for testing and benchmarking.
namespace reference {
Matrix effective_weights(const OpinionState& u, const InfluenceModel& model);
Matrix apply_L(const OpinionState& u, const InfluenceModel& model);
// Direct evaluation of the recursive ranking update
// f(v, t+1) = (1/d) sum_w [f(v) (1 - mu) + f(w) mu].
OpinionState ranking_update(const OpinionState& u, const InfluenceModel& model);
}  // namespace reference

}  // namespace consensus
