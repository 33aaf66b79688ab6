#include "synclab/graph.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "synclab/errors.hpp"
#include "synclab/rng.hpp"

namespace synclab {

// ---------------------------------------------------------------------------
// VertexSet

VertexSet::VertexSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

VertexSet::VertexSet(std::size_t universe, std::span<const Vertex> members) : VertexSet(universe) {
  for (Vertex v : members) insert(v);
}

VertexSet VertexSet::all(std::size_t universe) { return VertexSet(universe).complement(); }

std::size_t VertexSet::size() const noexcept {
  std::size_t count = 0;
  for (auto w : words_) count += static_cast<std::size_t>(std::popcount(w));
  return count;
}

void VertexSet::insert(Vertex v) {
  if (v >= universe_) throw InputError("vertex " + std::to_string(v) + " out of range");
  words_[v >> 6] |= std::uint64_t{1} << (v & 63);
}

void VertexSet::erase(Vertex v) {
  if (v >= universe_) throw InputError("vertex " + std::to_string(v) + " out of range");
  words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
}

void VertexSet::clear_tail() noexcept {
  if (universe_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (universe_ % 64)) - 1;
  }
}

void VertexSet::require_same_universe(const VertexSet& other) const {
  if (other.universe_ != universe_) throw InputError("vertex sets over different universes");
}

VertexSet VertexSet::complement() const {
  VertexSet out = *this;
  for (auto& w : out.words_) w = ~w;
  out.clear_tail();
  return out;
}

VertexSet VertexSet::intersect(const VertexSet& other) const {
  require_same_universe(other);
  VertexSet out = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] &= other.words_[i];
  return out;
}

VertexSet VertexSet::unite(const VertexSet& other) const {
  require_same_universe(other);
  VertexSet out = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] |= other.words_[i];
  return out;
}

VertexSet VertexSet::minus(const VertexSet& other) const {
  require_same_universe(other);
  VertexSet out = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] &= ~other.words_[i];
  return out;
}

bool VertexSet::is_subset_of(const VertexSet& other) const {
  require_same_universe(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~other.words_[i]) return false;
  }
  return true;
}

std::vector<Vertex> VertexSet::members() const {
  std::vector<Vertex> out;
  out.reserve(size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::uint64_t w = words_[i];
    while (w) {
      out.push_back(static_cast<Vertex>(i * 64 + std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(std::size_t n, std::span<const Edge> edges) : offsets_(n + 1, 0) {
  if (n > 0x7fffffffU) throw InputError("graph order exceeds 2^31 - 1");
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw InputError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                       ") out of range for n = " + std::to_string(n));
    }
    if (e.u == e.v) throw InputError("self-loop at vertex " + std::to_string(e.u));
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
  neighbors_.resize(offsets_[n]);
  std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges) {
    neighbors_[cursor[e.u]++] = e.v;
    neighbors_[cursor[e.v]++] = e.u;
  }
  for (std::size_t v = 0; v < n; ++v) {
    auto first = neighbors_.begin() + offsets_[v];
    auto last = neighbors_.begin() + offsets_[v + 1];
    std::sort(first, last);
    if (auto dup = std::adjacent_find(first, last); dup != last) {
      throw InputError("duplicate edge (" + std::to_string(v) + ", " + std::to_string(*dup) + ")");
    }
  }
}

std::size_t Graph::max_degree() const noexcept {
  std::size_t best = 0;
  for (std::size_t v = 0; v < order(); ++v) best = std::max(best, degree(static_cast<Vertex>(v)));
  return best;
}

std::size_t Graph::min_degree() const noexcept {
  if (order() == 0) return 0;
  std::size_t best = degree(0);
  for (std::size_t v = 1; v < order(); ++v) best = std::min(best, degree(static_cast<Vertex>(v)));
  return best;
}

bool Graph::has_edge(Vertex u, Vertex v) const noexcept {
  if (u >= order() || v >= order()) return false;
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (Vertex u = 0; u < order(); ++u) {
    for (Vertex v : neighbors(u)) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Primitives

std::uint64_t pair_count(const Graph& g, const VertexSet& x, const VertexSet& y) {
  if (x.universe() != g.order() || y.universe() != g.order()) {
    throw InputError("vertex set universe does not match graph order");
  }
  std::uint64_t count = 0;
  for (Vertex u : x.members()) {
    for (Vertex v : g.neighbors(u)) count += y.contains(v) ? 1 : 0;
  }
  return count;
}

std::vector<std::uint32_t> connected_components(const Graph& g) {
  constexpr std::uint32_t kUnseen = ~std::uint32_t{0};
  std::vector<std::uint32_t> label(g.order(), kUnseen);
  std::vector<Vertex> stack;
  std::uint32_t next = 0;
  for (Vertex s = 0; s < g.order(); ++s) {
    if (label[s] != kUnseen) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      for (Vertex v : g.neighbors(u)) {
        if (label[v] == kUnseen) {
          label[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return label;
}

bool is_connected(const Graph& g) {
  if (g.order() <= 1) return true;
  auto label = connected_components(g);
  return std::all_of(label.begin(), label.end(), [](std::uint32_t c) { return c == 0; });
}

InducedSubgraph induced_subgraph(const Graph& g, const VertexSet& w) {
  if (w.universe() != g.order()) throw InputError("vertex set universe does not match graph order");
  if (w.empty()) throw InputError("induced subgraph on an empty vertex set");
  InducedSubgraph out;
  out.to_parent = w.members();
  std::vector<Vertex> local(g.order(), ~Vertex{0});
  for (std::size_t i = 0; i < out.to_parent.size(); ++i) local[out.to_parent[i]] = static_cast<Vertex>(i);
  std::vector<Edge> edges;
  for (Vertex u : out.to_parent) {
    for (Vertex v : g.neighbors(u)) {
      if (u < v && w.contains(v)) edges.push_back({local[u], local[v]});
    }
  }
  out.graph = Graph(out.to_parent.size(), edges);
  return out;
}

DegreeProfile degree_profile(const Graph& g, const VertexSet& w) {
  if (w.universe() != g.order()) throw InputError("vertex set universe does not match graph order");
  DegreeProfile out;
  out.outside_neighbors.assign(g.order(), 0);
  bool first = true;
  for (Vertex v = 0; v < g.order(); ++v) {
    std::size_t inside = 0;
    for (Vertex u : g.neighbors(v)) {
      if (w.contains(u)) {
        ++inside;
      } else {
        ++out.outside_neighbors[v];
      }
    }
    if (!w.contains(v)) continue;
    if (first) {
      out.min_degree = out.max_degree = inside;
      first = false;
    } else {
      out.min_degree = std::min(out.min_degree, inside);
      out.max_degree = std::max(out.max_degree, inside);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Edge-list I/O

namespace {

bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

[[noreturn]] void parse_fail(std::size_t lineno, const std::string& msg) {
  throw InputError("edge list line " + std::to_string(lineno) + ": " + msg);
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_content_line(in, line, lineno)) throw InputError("edge list: missing header");
  long long n = -1;
  long long m = -1;
  {
    std::istringstream hdr(line);
    std::string rest;
    if (!(hdr >> n >> m) || (hdr >> rest)) parse_fail(lineno, "expected header \"n m\"");
  }
  if (n < 1) parse_fail(lineno, "vertex count must be at least 1");
  if (m < 0) parse_fail(lineno, "edge count must be nonnegative");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    if (!next_content_line(in, line, lineno)) {
      throw InputError("edge list: expected " + std::to_string(m) + " edges, found " + std::to_string(i));
    }
    std::istringstream row(line);
    long long u = -1;
    long long v = -1;
    std::string rest;
    if (!(row >> u >> v) || (row >> rest)) parse_fail(lineno, "expected \"u v\"");
    if (u < 0 || v >= n || u >= v) parse_fail(lineno, "need 0 <= u < v < n");
    edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
  }
  if (next_content_line(in, line, lineno)) parse_fail(lineno, "unexpected content after the edge list");
  return Graph(static_cast<std::size_t>(n), edges);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file '" + path + "'");
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.order() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

// ---------------------------------------------------------------------------
// Generators

namespace generators {

Graph cycle(std::size_t n) {
  if (n < 3) throw InputError("cycle needs n >= 3");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({Vertex(i), Vertex(i + 1)});
  edges.push_back({0, Vertex(n - 1)});
  return Graph(n, edges);
}

Graph path(std::size_t n) {
  if (n < 1) throw InputError("path needs n >= 1");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({Vertex(i), Vertex(i + 1)});
  return Graph(n, edges);
}

Graph star(std::size_t n) {
  if (n < 1) throw InputError("star needs n >= 1");
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) edges.push_back({0, Vertex(i)});
  return Graph(n, edges);
}

Graph complete(std::size_t n) {
  if (n < 1) throw InputError("complete graph needs n >= 1");
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({Vertex(i), Vertex(j)});
  }
  return Graph(n, edges);
}

Graph random_tree(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InputError("tree needs n >= 1");
  if (n == 1) return Graph(1, std::span<const Edge>{});
  if (n == 2) return Graph(2, {Edge{0, 1}});
  Rng rng(seed);
  std::vector<Vertex> prufer(n - 2);
  for (auto& x : prufer) x = static_cast<Vertex>(rng.below(n));

  // Linear-time decoding.
  std::vector<std::size_t> degree(n, 1);
  for (Vertex x : prufer) ++degree[x];
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  std::size_t ptr = 0;
  while (degree[ptr] != 1) ++ptr;
  std::size_t leaf = ptr;
  for (Vertex x : prufer) {
    edges.push_back({Vertex(std::min<std::size_t>(leaf, x)), Vertex(std::max<std::size_t>(leaf, x))});
    if (--degree[x] == 1 && x < ptr) {
      leaf = x;
    } else {
      ++ptr;
      while (degree[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  edges.push_back({Vertex(leaf), Vertex(n - 1)});
  return Graph(n, edges);
}

Graph circulant(std::size_t n, std::span<const std::size_t> offsets) {
  if (n < 1) throw InputError("circulant needs n >= 1");
  std::vector<Edge> edges;
  for (std::size_t s : offsets) {
    if (s == 0 || s > n / 2) throw InputError("circulant offset must lie in [1, n/2]");
  }
  std::vector<std::size_t> uniq(offsets.begin(), offsets.end());
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  for (std::size_t s : uniq) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = (i + s) % n;
      // offset n/2 on even n would list each edge twice
      if (2 * s == n && i >= j) continue;
      edges.push_back({Vertex(std::min(i, j)), Vertex(std::max(i, j))});
    }
  }
  return Graph(n, edges);
}

Graph gnp(std::size_t n, double p, std::uint64_t seed) {
  if (n < 1) throw InputError("G(n,p) needs n >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("G(n,p) needs p in [0, 1]");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < p) edges.push_back({Vertex(i), Vertex(j)});
    }
  }
  return Graph(n, edges);
}

}  // namespace generators

}  // namespace synclab
