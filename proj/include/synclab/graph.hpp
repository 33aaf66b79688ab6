#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace synclab {

using Vertex = std::uint32_t;

struct Edge {
  Vertex u;
  Vertex v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Subset of {0..n-1} stored as a bitset.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(std::size_t universe);
  VertexSet(std::size_t universe, std::span<const Vertex> members);

  static VertexSet all(std::size_t universe);

  std::size_t universe() const noexcept { return universe_; }
  std::size_t size() const noexcept;
  bool empty() const noexcept { return size() == 0; }

  bool contains(Vertex v) const noexcept {
    return v < universe_ && ((words_[v >> 6] >> (v & 63)) & 1U);
  }
  void insert(Vertex v);
  void erase(Vertex v);

  VertexSet complement() const;
  VertexSet intersect(const VertexSet& other) const;
  VertexSet unite(const VertexSet& other) const;
  VertexSet minus(const VertexSet& other) const;
  bool is_subset_of(const VertexSet& other) const;

  std::vector<Vertex> members() const;

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  void require_same_universe(const VertexSet& other) const;
  void clear_tail() noexcept;

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Simple undirected graph on vertices 0..n-1 with sorted neighbor lists (CSR).
/// Immutable after construction.
class Graph {
 public:
  Graph() = default;
  /// Throws InputError on self-loops, duplicate edges or out-of-range ids.
  Graph(std::size_t n, std::span<const Edge> edges);
  Graph(std::size_t n, std::initializer_list<Edge> edges)
      : Graph(n, std::span<const Edge>(edges.begin(), edges.size())) {}

  std::size_t order() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }

  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const noexcept;
  std::size_t min_degree() const noexcept;
  bool has_edge(Vertex u, Vertex v) const noexcept;

  /// Edges with u < v in lexicographic order.
  std::vector<Edge> edges() const;

  // CSR views for kernels.
  std::span<const std::uint32_t> offsets() const noexcept { return offsets_; }
  std::span<const Vertex> adjacency() const noexcept { return neighbors_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<Vertex> neighbors_;
};

/// Sum of A[x][y] over x in X, y in Y (ordered pairs).
std::uint64_t pair_count(const Graph& g, const VertexSet& x, const VertexSet& y);

bool is_connected(const Graph& g);

/// Component label per vertex, labels dense in order of first appearance.
std::vector<std::uint32_t> connected_components(const Graph& g);

struct InducedSubgraph {
  Graph graph;
  std::vector<Vertex> to_parent;  // subgraph vertex -> parent vertex
};

InducedSubgraph induced_subgraph(const Graph& g, const VertexSet& w);

struct DegreeProfile {
  std::size_t min_degree = 0;  // within G[W]; 0 when W is empty
  std::size_t max_degree = 0;
  std::vector<std::uint32_t> outside_neighbors;  // |N(v) \ W| for every v in V
};

DegreeProfile degree_profile(const Graph& g, const VertexSet& w);

/// Edge-list text format: "n m" header, then m lines "u v" with u < v.
/// Blank lines and '#' comments are ignored.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

namespace generators {

Graph cycle(std::size_t n);
Graph path(std::size_t n);
/// Vertex 0 joined to vertices 1..n-1.
Graph star(std::size_t n);
Graph complete(std::size_t n);
/// Uniform labelled tree from a random Pruefer sequence.
Graph random_tree(std::size_t n, std::uint64_t seed);
/// Vertex i adjacent to i +- s (mod n) for every offset s.
Graph circulant(std::size_t n, std::span<const std::size_t> offsets);
/// Erdos-Renyi G(n, p).
Graph gnp(std::size_t n, double p, std::uint64_t seed);

}  // namespace generators

}  // namespace synclab
