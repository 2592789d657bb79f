#include <doctest.h>

#include <random>
#include <set>
#include <stdexcept>

#include "mwucb/topology.hpp"
#include "support.hpp"

using namespace mwucb;

TEST_CASE("grid sizes") {
  auto g33 = build_grid(3, 3);
  CHECK(g33.node_count() == 9);
  CHECK(g33.link_count() == 12);

  auto g11 = build_grid(1, 1);
  CHECK(g11.node_count() == 1);
  CHECK(g11.link_count() == 0);

  auto g22 = build_grid(2, 2);
  CHECK(g22.node_count() == 4);
  CHECK(g22.link_count() == 4);

  for (std::size_t r = 1; r <= 5; ++r)
    for (std::size_t c = 1; c <= 5; ++c)
      CHECK(build_grid(r, c).link_count() == r * (c - 1) + c * (r - 1));

  CHECK_THROWS_AS(build_grid(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(3, 0), std::invalid_argument);
}

TEST_CASE("grid links point from lower to higher id and are sorted") {
  auto g = build_grid(3, 4);
  for (std::size_t e = 0; e < g.link_count(); ++e) {
    CHECK(g.link(e).tail < g.link(e).head);
    if (e > 0) CHECK(g.link(e - 1) < g.link(e));
    CHECK(g.index_of(g.link(e)) == e);
  }
}

TEST_CASE("adjacent links") {
  auto g = build_grid(3, 3);
  CHECK(adjacent_links(g, 0).size() == 2);
  CHECK(adjacent_links(g, 4).size() == 4);
  CHECK(adjacent_links(g, 1).size() == 3);
  CHECK(adjacent_links(build_grid(1, 1), 0).empty());
  CHECK_THROWS_AS(adjacent_links(g, 9), std::out_of_range);

  auto center = adjacent_links(g, 4);
  CHECK(std::is_sorted(center.begin(), center.end()));
  for (auto e : center) CHECK((g.link(e).tail == 4 || g.link(e).head == 4));
}

TEST_CASE("adjacency partitions incidences") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto t = testsupport::random_topology(rng, 8, 16);
    std::size_t total = 0;
    for (NodeId v = 0; v < t.node_count(); ++v) total += t.adjacent_links(v).size();
    CHECK(total == 2 * t.link_count());
  }
}

TEST_CASE("topology validation") {
  CHECK_THROWS_AS(NetworkTopology(2, {{0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(NetworkTopology(2, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(NetworkTopology(3, {{0, 1}, {0, 1}}), std::invalid_argument);
  // Antiparallel links are distinct directed links.
  NetworkTopology t(2, {{1, 0}, {0, 1}});
  CHECK(t.link_count() == 2);
  CHECK(t.link(0) == Link{0, 1});
  CHECK(t.share_node(0, 1));
}

TEST_CASE("node-exclusive admissibility") {
  auto g = build_grid(3, 3);
  auto model = InterferenceModel::node_exclusive();
  ActivationVector x(g.link_count());
  CHECK(is_admissible(model, x, g));
  auto a = g.index_of({0, 1});
  auto b = g.index_of({1, 2});
  x.set(a, true);
  CHECK(is_admissible(model, x, g));
  x.set(b, true);
  CHECK_FALSE(is_admissible(model, x, g));
  CHECK_THROWS_AS(is_admissible(model, ActivationVector(3), g), std::invalid_argument);
}

TEST_CASE("node-exclusive admissible set equals matchings") {
  std::mt19937_64 rng(5);
  auto model = InterferenceModel::node_exclusive();
  for (int trial = 0; trial < 60; ++trial) {
    auto t = testsupport::random_topology(rng, 6, 8);
    for (std::uint32_t mask = 0; mask < (1u << t.link_count()); ++mask) {
      ActivationVector x(t.link_count());
      for (std::size_t e = 0; e < t.link_count(); ++e) x.set(e, mask >> e & 1u);
      CHECK(is_admissible(model, x, t) == testsupport::is_matching(t, mask));
    }
  }
}

TEST_CASE("conflict graph admissibility") {
  auto g = build_grid(2, 2);
  ActivationVector all(std::vector<std::uint8_t>(g.link_count(), 1));
  CHECK(is_admissible(InterferenceModel::conflict_graph({}), all, g));
  auto cg = InterferenceModel::conflict_graph({{0, 3}});
  CHECK_FALSE(is_admissible(cg, all, g));
  ActivationVector x(g.link_count());
  x.set(0, true);
  x.set(1, true);
  CHECK(is_admissible(cg, x, g));
  CHECK_THROWS_AS(InterferenceModel::conflict_graph({{0, 7}}).validate(g), std::invalid_argument);
  CHECK_THROWS_AS(InterferenceModel::conflict_graph({{2, 2}}).validate(g), std::invalid_argument);
}

TEST_CASE("explicit set always contains the zero vector") {
  auto g = build_grid(1, 3);
  ActivationVector one(std::vector<std::uint8_t>{1, 0});
  auto model = InterferenceModel::explicit_set(2, {one, one});
  const auto& set = std::get<ExplicitSet>(model.kind());
  CHECK(set.members().size() == 2);
  CHECK(set.members().front() == ActivationVector(2));
  CHECK(is_admissible(model, ActivationVector(2), g));
  CHECK(is_admissible(model, one, g));
  CHECK_FALSE(is_admissible(model, ActivationVector(std::vector<std::uint8_t>{0, 1}), g));
  CHECK_THROWS_AS(InterferenceModel::explicit_set(3, {one}), std::invalid_argument);
}

TEST_CASE("activation vectors order lexicographically") {
  ActivationVector a(std::vector<std::uint8_t>{0, 1, 1});
  ActivationVector b(std::vector<std::uint8_t>{1, 0, 0});
  CHECK(a < b);
  CHECK(a.active_count() == 2);
  CHECK(a.active_links() == std::vector<LinkId>{1, 2});
}
