#include <doctest.h>

#include <sstream>

#include "oracle.hpp"
#include "synclab/errors.hpp"
#include "synclab/graph.hpp"

using namespace synclab;

namespace {

VertexSet set_of(std::size_t n, std::initializer_list<Vertex> vs) {
  std::vector<Vertex> m(vs);
  return VertexSet(n, m);
}

}  // namespace

TEST_CASE("graph construction validates input") {
  CHECK_THROWS_AS(Graph(3, {{0, 0}}), InputError);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), InputError);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), InputError);
  const Graph g(4, {{2, 0}, {1, 2}, {3, 2}});
  CHECK(g.num_edges() == 3);
  CHECK(g.degree(2) == 3);
  CHECK(g.has_edge(0, 2));
  CHECK(g.has_edge(2, 0));
  CHECK_FALSE(g.has_edge(0, 1));
  const auto nb = g.neighbors(2);
  CHECK(std::is_sorted(nb.begin(), nb.end()));
  CHECK(g.edges() == std::vector<Edge>{{0, 2}, {1, 2}, {2, 3}});
}

TEST_CASE("pair_count examples") {
  const Graph k3 = generators::complete(3);
  CHECK(pair_count(k3, set_of(3, {0}), set_of(3, {1, 2})) == 2);
  CHECK(pair_count(k3, VertexSet(3), VertexSet::all(3)) == 0);
  CHECK(pair_count(k3, VertexSet::all(3), VertexSet::all(3)) == 6);
  CHECK_THROWS_AS(pair_count(k3, VertexSet(4), VertexSet(3)), InputError);
}

TEST_CASE("pair_count symmetry and degree sums") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(70);
    const Graph g = oracle::random_graph(n, rng.uniform(), rng);
    VertexSet x(n), y(n);
    for (Vertex v = 0; v < n; ++v) {
      if (rng.below(2)) x.insert(v);
      if (rng.below(3) == 0) y.insert(v);
    }
    CHECK(pair_count(g, x, y) == pair_count(g, y, x));
    std::uint64_t deg = 0;
    for (Vertex v : x.members()) deg += g.degree(v);
    CHECK(pair_count(g, x, VertexSet::all(n)) == deg);
    std::uint64_t total = 0;
    for (Vertex v = 0; v < n; ++v) total += g.degree(v);
    CHECK(total == 2 * g.num_edges());
  }
}

TEST_CASE("vertex set algebra") {
  VertexSet x = set_of(130, {0, 64, 129});
  CHECK(x.size() == 3);
  CHECK(x.size() + x.complement().size() == 130);
  CHECK(x.complement().complement() == x);
  CHECK(x.intersect(x.complement()).empty());
  CHECK(x.unite(x.complement()) == VertexSet::all(130));
  CHECK(x.members() == std::vector<Vertex>{0, 64, 129});
  CHECK(set_of(130, {64}).is_subset_of(x));
  CHECK(x.minus(set_of(130, {64})) == set_of(130, {0, 129}));
  CHECK_THROWS_AS(x.insert(130), InputError);
  CHECK_FALSE(x.contains(500));
}

TEST_CASE("is_connected examples") {
  CHECK(is_connected(generators::path(3)));
  CHECK_FALSE(is_connected(Graph(4, {{0, 1}, {2, 3}})));
  CHECK(is_connected(Graph(1, {})));
  const auto comp = connected_components(Graph(5, {{3, 4}, {0, 2}}));
  CHECK(comp == std::vector<std::uint32_t>{0, 1, 0, 2, 2});
}

TEST_CASE("is_connected agrees with union-find on 1000 random graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(64);
    const double p = rng.uniform(0.0, 4.0 / static_cast<double>(n));
    const Graph g = oracle::random_graph(n, p, rng);
    REQUIRE(is_connected(g) == oracle::connected(g));
  }
}

TEST_CASE("induced subgraph examples") {
  const auto k3 = induced_subgraph(generators::complete(4), set_of(4, {0, 2, 3}));
  CHECK(k3.graph == generators::complete(3));
  CHECK(k3.to_parent == std::vector<Vertex>{0, 2, 3});

  const auto edge = induced_subgraph(generators::cycle(5), set_of(5, {1, 2}));
  CHECK(edge.graph.num_edges() == 1);
  CHECK(edge.graph.has_edge(0, 1));

  Rng rng(5);
  const Graph g = oracle::random_graph(40, 0.2, rng);
  CHECK(induced_subgraph(g, VertexSet::all(40)).graph == g);
  CHECK_THROWS_AS(induced_subgraph(g, VertexSet(40)), InputError);
}

TEST_CASE("degree profile examples") {
  auto p = degree_profile(generators::cycle(6), VertexSet::all(6));
  CHECK(p.min_degree == 2);
  CHECK(p.max_degree == 2);
  CHECK(p.outside_neighbors == std::vector<std::uint32_t>(6, 0));

  p = degree_profile(generators::star(4), set_of(4, {0}));
  CHECK(p.min_degree == 0);
  CHECK(p.max_degree == 0);
  CHECK(p.outside_neighbors[0] == 3);

  p = degree_profile(generators::path(3), set_of(3, {0, 1}));
  CHECK(p.min_degree == 1);
  CHECK(p.max_degree == 1);
  CHECK(p.outside_neighbors[0] == 0);
  CHECK(p.outside_neighbors[1] == 1);
}

TEST_CASE("generators") {
  const Graph c6 = generators::cycle(6);
  CHECK(c6.num_edges() == 6);
  CHECK(c6.min_degree() == 2);
  CHECK(c6.max_degree() == 2);
  CHECK(generators::complete(4).num_edges() == 6);
  CHECK_THROWS_AS(generators::cycle(2), InputError);

  const Graph t = generators::random_tree(10, 99);
  CHECK(t.num_edges() == 9);
  CHECK(is_connected(t));
  CHECK(generators::random_tree(10, 99) == t);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const std::size_t n = 1 + s % 60;
    const Graph tr = generators::random_tree(n, s);
    REQUIRE(tr.num_edges() == n - 1);
    REQUIRE(oracle::connected(tr));
  }

  const std::size_t offs[] = {1, 2};
  const Graph c = generators::circulant(8, offs);
  CHECK(c.num_edges() == 16);
  CHECK(c.min_degree() == 4);
  const std::size_t half[] = {4};
  CHECK(generators::circulant(8, half).num_edges() == 4);
}

TEST_CASE("edge list round trip and strict parsing") {
  Rng rng(3);
  const Graph g = oracle::random_graph(25, 0.3, rng);
  std::stringstream ss;
  write_edge_list(ss, g);
  CHECK(read_edge_list(ss) == g);

  std::istringstream commented("# header comment\n3 2\n\n0 1 # trailing\n1 2\n");
  CHECK(read_edge_list(commented).num_edges() == 2);

  for (const char* bad : {"", "3\n", "3 1\n1 0\n", "3 1\n0 3\n", "3 2\n0 1\n", "3 1\n0 1\n1 2\n", "3 1\n0 x\n",
                          "0 0\n", "3 2\n0 1\n0 1\n"}) {
    std::istringstream in(bad);
    CHECK_THROWS_AS(read_edge_list(in), InputError);
  }
  CHECK_THROWS_AS(read_edge_list_file("/nonexistent/graph.txt"), InputError);
}
