#include "consensus/operators.hpp"

#include <cmath>
#include <exception>
#include <sstream>
#include <vector>

#include "consensus/error.hpp"

namespace consensus {

namespace {

// Weights mu_{v,w} for a single row v; out[v] = 0.
void row_weights(const Matrix& u, const InfluenceModel& model, std::size_t v, std::span<double> out) {
  const std::size_t rows = u.rows();
  const auto uv = u.row(v);
  switch (model.variant) {
    case ModelVariant::Standard:
      for (std::size_t w = 0; w < rows; ++w) out[w] = (w == v) ? 0.0 : model.kernel.coupling(distance(uv, u.row(w)));
      break;
    case ModelVariant::RankDependent: {
      const double r = norm(uv);
      for (std::size_t w = 0; w < rows; ++w)
        out[w] = (w == v) ? 0.0 : model.rank_kernel->coupling(r, distance(uv, u.row(w)));
      break;
    }
    case ModelVariant::NormalizedWeights: {
      double total = 0.0;
      for (std::size_t w = 0; w < rows; ++w) {
        out[w] = (w == v) ? 0.0 : model.kernel.coupling(distance(uv, u.row(w)));
        total += out[w];
      }
      const double d = static_cast<double>(rows - 1);
      for (std::size_t w = 0; w < rows; ++w) out[w] = total > 0.0 ? d * out[w] * out[w] / total : 0.0;
      break;
    }
  }
}

}  // namespace

namespace detail {

void apply_L_into(const Matrix& u, const InfluenceModel& model, std::span<const std::size_t> groups, Matrix& out) {
  model.check_consistent();
  const std::size_t rows = u.rows();
  const std::size_t cols = u.cols();
  const double inv_d = 1.0 / static_cast<double>(rows - 1);
  out = Matrix(rows, cols, 0.0);
  const long long n_rows = static_cast<long long>(rows);

  std::exception_ptr failure;

#pragma omp parallel
  {
    std::vector<double> weights(rows);
#pragma omp for schedule(static)
    for (long long vi = 0; vi < n_rows; ++vi) {
      const auto v = static_cast<std::size_t>(vi);
      try {
        row_weights(u, model, v, weights);
      } catch (...) {
#pragma omp critical(apply_L_failure)
        if (!failure) failure = std::current_exception();
        continue;
      }
      auto acc = out.row(v);
      const auto uv = u.row(v);
      for (std::size_t w = 0; w < rows; ++w) {
        if (w == v || weights[w] == 0.0) continue;
        if (!groups.empty() && groups[w] == groups[v]) continue;
        const auto uw = u.row(w);
        for (std::size_t i = 0; i < cols; ++i) acc[i] += (uw[i] - uv[i]) * weights[w];
      }
      for (std::size_t i = 0; i < cols; ++i) acc[i] *= inv_d;
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void apply_weights_into(const Matrix& u, const Matrix& weights, Matrix& out) {
  const std::size_t rows = u.rows();
  const std::size_t cols = u.cols();
  const double inv_d = 1.0 / static_cast<double>(rows - 1);
  out = u;
  const long long n_rows = static_cast<long long>(rows);
#pragma omp parallel for schedule(static)
  for (long long vi = 0; vi < n_rows; ++vi) {
    const auto v = static_cast<std::size_t>(vi);
    std::vector<double> acc(cols, 0.0);
    const auto uv = u.row(v);
    for (std::size_t w = 0; w < rows; ++w) {
      const double mu = weights(v, w);
      if (w == v || mu == 0.0) continue;
      const auto uw = u.row(w);
      for (std::size_t i = 0; i < cols; ++i) acc[i] += (uw[i] - uv[i]) * mu;
    }
    auto dst = out.row(v);
    for (std::size_t i = 0; i < cols; ++i) dst[i] += acc[i] * inv_d;
  }
}

}  // namespace detail

Matrix effective_weights(const OpinionState& u, const InfluenceModel& model) {
  model.check_consistent();
  const std::size_t rows = u.vertices();
  Matrix weights(rows, rows, 0.0);
  const long long n_rows = static_cast<long long>(rows);
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (long long vi = 0; vi < n_rows; ++vi) {
    const auto v = static_cast<std::size_t>(vi);
    try {
      row_weights(u.values(), model, v, weights.row(v));
    } catch (...) {
#pragma omp critical(weights_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return weights;
}

Matrix apply_L(const OpinionState& u, const InfluenceModel& model) {
  Matrix out;
  detail::apply_L_into(u.values(), model, {}, out);
  return out;
}

void check_convex_weights(const Matrix& weights, std::size_t d) {
  const double inv_d = 1.0 / static_cast<double>(d);
  for (std::size_t v = 0; v < weights.rows(); ++v) {
    double total = 0.0;
    std::size_t heaviest = v == 0 ? 1 : 0;
    for (std::size_t w = 0; w < weights.cols(); ++w) {
      if (w == v) continue;
      const double a = weights(v, w) * inv_d;
      if (!(a >= 0.0 && a <= 1.0)) {
        std::ostringstream os;
        os << "weight mu(" << v << "," << w << ")/d = " << a << " outside [0, 1]";
        throw ModelInvalidError(os.str(), v, w);
      }
      if (weights(v, w) > weights(v, heaviest)) heaviest = w;
      total += a;
    }
    if (total > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "weights of vertex " << v << " sum to " << total << " > 1 (largest at pair (" << v << "," << heaviest
         << "))";
      throw ModelInvalidError(os.str(), v, heaviest);
    }
  }
}

OpinionState time_one_map(const OpinionState& u, const InfluenceModel& model) {
  const Matrix weights = effective_weights(u, model);
  check_convex_weights(weights, u.d());
  Matrix next;
  detail::apply_weights_into(u.values(), weights, next);
  return OpinionState(std::move(next));
}

namespace reference {

Matrix effective_weights(const OpinionState& u, const InfluenceModel& model) {
  model.check_consistent();
  const std::size_t rows = u.vertices();
  Matrix dist(rows, rows, 0.0);
  for (std::size_t v = 0; v < rows; ++v) {
    for (std::size_t w = 0; w < rows; ++w) dist(v, w) = distance(u.row(v), u.row(w));
  }
  Matrix mu(rows, rows, 0.0);
  for (std::size_t v = 0; v < rows; ++v) {
    for (std::size_t w = 0; w < rows; ++w) {
      if (v == w) continue;
      if (model.variant == ModelVariant::RankDependent) {
        mu(v, w) = model.rank_kernel->coupling(norm(u.row(v)), dist(v, w));
      } else {
        mu(v, w) = model.kernel.coupling(dist(v, w));
      }
    }
  }
  if (model.variant == ModelVariant::NormalizedWeights) {
    const double d = static_cast<double>(u.d());
    for (std::size_t v = 0; v < rows; ++v) {
      double total = 0.0;
      for (std::size_t w = 0; w < rows; ++w) total += mu(v, w);
      std::vector<double> row(rows, 0.0);
      for (std::size_t w = 0; w < rows; ++w) row[w] = total > 0.0 ? d * mu(v, w) * mu(v, w) / total : 0.0;
      for (std::size_t w = 0; w < rows; ++w) mu(v, w) = row[w];
    }
  }
  return mu;
}

Matrix apply_L(const OpinionState& u, const InfluenceModel& model) {
  const Matrix mu = reference::effective_weights(u, model);
  const std::size_t rows = u.vertices();
  Matrix out(rows, u.n(), 0.0);
  for (std::size_t v = 0; v < rows; ++v) {
    for (std::size_t w = 0; w < rows; ++w) {
      if (v == w) continue;
      for (std::size_t i = 0; i < u.n(); ++i) out(v, i) += (u(w, i) - u(v, i)) * mu(v, w);
    }
    for (std::size_t i = 0; i < u.n(); ++i) out(v, i) /= static_cast<double>(u.d());
  }
  return out;
}

OpinionState ranking_update(const OpinionState& u, const InfluenceModel& model) {
  const Matrix mu = reference::effective_weights(u, model);
  const std::size_t rows = u.vertices();
  Matrix next(rows, u.n(), 0.0);
  for (std::size_t v = 0; v < rows; ++v) {
    for (std::size_t w = 0; w < rows; ++w) {
      if (v == w) continue;
      for (std::size_t i = 0; i < u.n(); ++i) next(v, i) += u(v, i) * (1.0 - mu(v, w)) + u(w, i) * mu(v, w);
    }
    for (std::size_t i = 0; i < u.n(); ++i) next(v, i) /= static_cast<double>(u.d());
  }
  return OpinionState(std::move(next));
}

}  // namespace reference

}  // namespace consensus
