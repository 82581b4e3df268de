#include "consensus/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "consensus/error.hpp"

namespace consensus {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<bool> membership(const OpinionState& u, const Members& members) {
  std::vector<bool> in(u.vertices(), false);
  for (std::size_t v : members) {
    if (v >= u.vertices()) throw DomainError("cluster member " + std::to_string(v) + " out of range");
    in[v] = true;
  }
  return in;
}

double internal_osc(const OpinionState& u, const Members& m) {
  double g = 0.0;
  for (std::size_t a = 0; a < m.size(); ++a)
    for (std::size_t b = a + 1; b < m.size(); ++b) g = std::max(g, distance(u.row(m[a]), u.row(m[b])));
  return g;
}

double dist_to_rest(const OpinionState& u, const std::vector<bool>& in) {
  double h = kInf;
  for (std::size_t v = 0; v < u.vertices(); ++v) {
    if (!in[v]) continue;
    for (std::size_t w = 0; w < u.vertices(); ++w)
      if (!in[w]) h = std::min(h, distance(u.row(v), u.row(w)));
  }
  return h;
}

}  // namespace

ClusterSpec cluster_metrics(const OpinionState& u, const Members& members) {
  ClusterSpec spec;
  spec.members = members;
  std::sort(spec.members.begin(), spec.members.end());
  spec.members.erase(std::unique(spec.members.begin(), spec.members.end()), spec.members.end());
  if (spec.members.empty()) throw DomainError("cluster must be nonempty");
  if (spec.members.size() >= u.vertices()) throw DomainError("cluster must be a proper subset");
  const auto in = membership(u, spec.members);
  spec.d0 = spec.members.size() - 1;
  spec.internal_osc = internal_osc(u, spec.members);
  spec.dist_to_rest = dist_to_rest(u, in);
  spec.lambda = spec.internal_osc == 0.0 ? kInf : spec.dist_to_rest / spec.internal_osc;
  return spec;
}

std::vector<Members> detect_clusters(const OpinionState& u, double gap_ratio) {
  if (!(gap_ratio > 1.0)) throw DomainError("gap_ratio must exceed 1");
  const std::size_t rows = u.vertices();

  // Prim's algorithm on the complete graph; single linkage follows the MST.
  struct Edge {
    double len;
    std::size_t a, b;
  };
  std::vector<Edge> mst;
  std::vector<bool> done(rows, false);
  std::vector<double> best(rows, kInf);
  std::vector<std::size_t> from(rows, 0);
  best[0] = 0.0;
  for (std::size_t it = 0; it < rows; ++it) {
    std::size_t next = rows;
    for (std::size_t v = 0; v < rows; ++v)
      if (!done[v] && (next == rows || best[v] < best[next])) next = v;
    done[next] = true;
    if (it > 0) mst.push_back({best[next], from[next], next});
    for (std::size_t v = 0; v < rows; ++v) {
      if (done[v]) continue;
      const double dist = distance(u.row(next), u.row(v));
      if (dist < best[v]) {
        best[v] = dist;
        from[v] = next;
      }
    }
  }
  std::sort(mst.begin(), mst.end(), [](const Edge& x, const Edge& y) { return x.len < y.len; });

  // Keeping the k smallest MST edges leaves blocks whose closest cross pair
  // is the next MST edge.
  // At least one edge is kept, so distinct points are never all split.
  std::size_t keep = mst.size();
  for (std::size_t k = mst.size(); k-- > 1;) {
    const double theta = mst[k - 1].len;
    if (mst[k].len > gap_ratio * theta) {
      keep = k;
      break;
    }
  }

  std::vector<std::size_t> parent(rows);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t k = 0; k < keep; ++k) parent[find(mst[k].a)] = find(mst[k].b);
  // Coincident vertices always share a block.
  for (const auto& e : mst)
    if (e.len == 0.0) parent[find(e.a)] = find(e.b);

  std::vector<Members> blocks;
  std::vector<std::size_t> index(rows, rows);
  for (std::size_t v = 0; v < rows; ++v) {
    const std::size_t r = find(v);
    if (index[r] == rows) {
      index[r] = blocks.size();
      blocks.emplace_back();
    }
    blocks[index[r]].push_back(v);
  }
  return blocks;
}

double cluster_noise_floor(const OpinionState& u) {
  return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, max_row_norm(u));
}

ContractionReport track_cluster_contraction(const Trajectory& trajectory, const Members& members) {
  if (trajectory.mode != EvolutionMode::Discrete) throw DomainError("cluster tracking needs a discrete trajectory");
  if (trajectory.stride != 1) throw DomainError("cluster tracking needs every step (stride 1)");
  if (trajectory.states.empty()) throw DomainError("empty trajectory");

  std::vector<ClusterSpec> specs;
  specs.reserve(trajectory.size());
  for (const auto& s : trajectory.states) specs.push_back(cluster_metrics(s, members));
  if (specs.front().members.size() <= 2) throw DomainError("cluster needs more than two members");

  ContractionReport report;
  report.degenerate = specs.front().internal_osc == 0.0;
  report.kappa_min = kInf;
  for (std::size_t t = 0; t + 1 < specs.size(); ++t) {
    ContractionStep step;
    step.g = specs[t].internal_osc;
    step.h = specs[t].dist_to_rest;
    step.g_next = specs[t + 1].internal_osc;
    step.h_next = specs[t + 1].dist_to_rest;
    step.resolved = step.g > cluster_noise_floor(trajectory.states[t]);
    if (step.resolved) {
      step.kappa_step = step.g_next == 0.0 ? kInf : step.g / step.g_next;
      report.kappa_min = std::min(report.kappa_min, *step.kappa_step);
    }
    report.per_step.push_back(step);
  }
  for (std::size_t t = 0; t + 1 < specs.size(); ++t) {
    const double next = specs[t + 1].lambda;
    const double now = specs[t].lambda;
    report.cluster_preserved.push_back(std::isinf(next) || next >= report.kappa_min * now);
  }
  return report;
}

Matrix cluster_inner_map(const OpinionState& u, const Kernel& kernel, const Members& members) {
  membership(u, members);
  const double inv_d = 1.0 / static_cast<double>(u.d());
  Matrix out(members.size(), u.n(), 0.0);
  std::vector<double> diff(u.n());
  for (std::size_t a = 0; a < members.size(); ++a) {
    auto row = out.row(a);
    const auto uv = u.row(members[a]);
    for (std::size_t b = 0; b < members.size(); ++b) {
      if (a == b) continue;
      const auto uw = u.row(members[b]);
      for (std::size_t i = 0; i < u.n(); ++i) diff[i] = uw[i] - uv[i];
      kernel.accumulate_weighted_difference(diff, row, inv_d);
    }
    for (std::size_t i = 0; i < u.n(); ++i) row[i] += uv[i];
  }
  return out;
}

Matrix cluster_outer_term(const OpinionState& u, const Kernel& kernel, const Members& members) {
  const auto in = membership(u, members);
  const double inv_d = 1.0 / static_cast<double>(u.d());
  Matrix out(members.size(), u.n(), 0.0);
  std::vector<double> diff(u.n());
  for (std::size_t a = 0; a < members.size(); ++a) {
    auto row = out.row(a);
    const auto uv = u.row(members[a]);
    for (std::size_t w = 0; w < u.vertices(); ++w) {
      if (in[w]) continue;
      const auto uw = u.row(w);
      for (std::size_t i = 0; i < u.n(); ++i) diff[i] = uw[i] - uv[i];
      kernel.accumulate_weighted_difference(diff, row, inv_d);
    }
  }
  return out;
}

double outer_term_lipschitz_bound(const OpinionState& u, const Kernel& kernel, const Members& members, double C) {
  const ClusterSpec spec = cluster_metrics(u, members);
  const double d = static_cast<double>(u.d());
  return (d - static_cast<double>(spec.d0)) / d * (C + 1.0) * kernel(spec.dist_to_rest);
}

double inner_map_gradient_bound(const OpinionState& u, const Kernel& kernel, const Members& members) {
  const ClusterSpec spec = cluster_metrics(u, members);
  const double g = spec.internal_osc;
  if (g == 0.0) return 0.0;
  const double d = static_cast<double>(u.d());
  return (1.0 - kernel(g) * (static_cast<double>(spec.d0) - 1.0) / (2.0 * d)) * g;
}

}  // namespace consensus
