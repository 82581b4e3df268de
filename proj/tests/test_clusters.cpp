#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "consensus/clusters.hpp"
#include "consensus/error.hpp"
#include "consensus/operators.hpp"
#include "support.hpp"

using namespace consensus;
using testing_support::random_state;
using testing_support::scalar;

TEST_CASE("cluster metrics") {
  const auto u = scalar({0, 0.1, 0.2, 100});
  const ClusterSpec c = cluster_metrics(u, {0, 1, 2});
  CHECK(c.d0 == 2);
  CHECK(c.internal_osc == doctest::Approx(0.2));
  CHECK(c.dist_to_rest == doctest::Approx(99.8));
  CHECK(c.lambda == doctest::Approx(499.0));

  const ClusterSpec flat = cluster_metrics(scalar({1, 1, 5}), {0, 1});
  CHECK(flat.internal_osc == 0.0);
  CHECK(std::isinf(flat.lambda));

  const ClusterSpec adj = cluster_metrics(scalar({0, 1, 2, 3}), {0, 1});
  CHECK(adj.internal_osc == 1.0);
  CHECK(adj.dist_to_rest == 1.0);
  CHECK(adj.lambda == 1.0);

  CHECK_THROWS_AS(cluster_metrics(u, {}), DomainError);
  CHECK_THROWS_AS(cluster_metrics(u, {0, 1, 2, 3}), DomainError);
  CHECK_THROWS_AS(cluster_metrics(u, {7}), DomainError);
}

TEST_CASE("cluster metrics are permutation invariant") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = random_state(rng, 7, 2);
    std::vector<std::size_t> perm(7);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix p(7, 2);
    for (std::size_t v = 0; v < 7; ++v)
      for (std::size_t i = 0; i < 2; ++i) p(perm[v], i) = u(v, i);
    Members members{0, 2, 5};
    Members mapped;
    for (auto v : members) mapped.push_back(perm[v]);
    std::sort(mapped.begin(), mapped.end());
    const ClusterSpec a = cluster_metrics(u, members);
    const ClusterSpec b = cluster_metrics(OpinionState(p), mapped);
    CHECK(a.internal_osc == b.internal_osc);
    CHECK(a.dist_to_rest == b.dist_to_rest);
  }
}

TEST_CASE("cluster detection") {
  const auto blocks = detect_clusters(scalar({0, 0.1, 0.2, 100}), 10.0);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0] == Members{0, 1, 2});
  CHECK(blocks[1] == Members{3});

  CHECK(detect_clusters(scalar({0, 1, 2, 3, 4, 5}), 2.0).size() == 1);

  const auto two = detect_clusters(scalar({0, 0.01, 0.005, 50, 50.01, 50.003}), 5.0);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == Members{0, 1, 2});
  CHECK(two[1] == Members{3, 4, 5});
}

TEST_CASE("cluster contraction on a separated cluster") {
  const auto u = scalar({0, 0.1, 0.2, 100});
  const InfluenceModel m = InfluenceModel::standard(Kernel::clamped_power(1.0, 1.0));
  const Trajectory tr = evolve_discrete(u, m, 10, {.early_stop = false});
  const ContractionReport r = track_cluster_contraction(tr, {0, 1, 2});
  REQUIRE(r.per_step.size() == 10);
  CHECK_FALSE(r.degenerate);
  CHECK(r.kappa_min > 1.0);
  for (const auto& s : r.per_step) {
    CHECK(s.h_next >= s.h - 2.0);
    if (s.resolved) {
      REQUIRE(s.kappa_step);
      CHECK(*s.kappa_step > 1.0);
    }
  }
  CHECK(r.per_step.front().resolved);
}

TEST_CASE("degenerate cluster") {
  const auto u = scalar({1, 1, 1, 9});
  const Trajectory tr = evolve_discrete(u, InfluenceModel::standard(Kernel::clamped_power(1.0, 1.0)), 3);
  const ContractionReport r = track_cluster_contraction(tr, {0, 1, 2});
  CHECK(r.degenerate);
}

TEST_CASE("cluster tracking preconditions") {
  const auto u = scalar({0, 0.1, 0.2, 100});
  const InfluenceModel m = InfluenceModel::standard(Kernel::clamped_power(1.0, 1.0));
  CHECK_THROWS_AS(track_cluster_contraction(evolve_discrete(u, m, 4, {.stride = 2}), {0, 1, 2}), DomainError);
  CHECK_THROWS_AS(track_cluster_contraction(evolve_discrete(u, m, 4), {0, 1}), DomainError);
  CHECK_THROWS_AS(track_cluster_contraction(evolve_continuous(u, m, 1.0, 1e-8), {0, 1, 2}), DomainError);
}

TEST_CASE("cluster decomposition of the time-one map") {
  std::mt19937_64 rng(12);
  const Kernel k = Kernel::clamped_power(1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto u = random_state(rng, 6, 2, -3, 3);
    const Members members{1, 3, 4};
    const Matrix inner = cluster_inner_map(u, k, members);
    const Matrix outer = cluster_outer_term(u, k, members);
    const OpinionState a = time_one_map(u, InfluenceModel::standard(k));
    for (std::size_t j = 0; j < members.size(); ++j)
      for (std::size_t i = 0; i < 2; ++i)
        CHECK(inner(j, i) + outer(j, i) == doctest::Approx(a(members[j], i)).epsilon(1e-13));
    double osc = 0.0;
    for (std::size_t x = 0; x < inner.rows(); ++x)
      for (std::size_t y = x + 1; y < inner.rows(); ++y) osc = std::max(osc, distance(inner.row(x), inner.row(y)));
    CHECK(osc <= inner_map_gradient_bound(u, k, members) * (1.0 + 1e-12));
  }
}
