#include "synclab/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "synclab/errors.hpp"
#include "synclab/rng.hpp"

namespace synclab::process {

namespace {

// Full materialization below this many pairs (n <= ~2048).
constexpr std::uint64_t kFullMaterializeLimit = std::uint64_t{1} << 21;

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1), components_(n) {
    std::iota(parent_.begin(), parent_.end(), 0U);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --components_;
  }
  std::size_t components() const noexcept { return components_; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::size_t components_;
};

bool process_order(const WeightedEdge& a, const WeightedEdge& b) {
  return a.weight < b.weight || (a.weight == b.weight && a.pair < b.pair);
}

bool connects(std::size_t n, std::span<const WeightedEdge> edges) {
  UnionFind uf(n);
  for (const auto& e : edges) {
    uf.unite(e.edge.u, e.edge.v);
    if (uf.components() == 1) return true;
  }
  return uf.components() == 1;
}

Graph graph_from(std::size_t n, std::span<const WeightedEdge> edges) {
  std::vector<Edge> plain;
  plain.reserve(edges.size());
  for (const auto& e : edges) plain.push_back(e.edge);
  return Graph(n, plain);
}

}  // namespace

std::uint64_t pair_index(std::size_t n, Vertex u, Vertex v) noexcept {
  if (u > v) std::swap(u, v);
  const std::uint64_t uu = u;
  return uu * (2 * static_cast<std::uint64_t>(n) - uu - 1) / 2 + (v - u - 1);
}

std::uint64_t num_pairs(std::size_t n) noexcept {
  return static_cast<std::uint64_t>(n) * (n > 0 ? n - 1 : 0) / 2;
}

ProcessTrace ProcessTrace::sample(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InputError("random graph process needs n >= 2");
  if (n > 0x7fffffffU) throw InputError("random graph process: n too large");
  ProcessTrace t;
  t.n_ = n;
  t.seed_ = seed;
  const double nn = static_cast<double>(n);
  t.build_prefix(num_pairs(n) <= kFullMaterializeLimit ? 1.0 : std::min(1.0, 6.0 * std::log(nn) / (nn - 1.0)));
  return t;
}

ProcessTrace ProcessTrace::from_weights(std::size_t n, std::vector<double> weights) {
  if (n < 2) throw InputError("random graph process needs n >= 2");
  if (weights.size() != num_pairs(n)) throw InputError("from_weights: need one weight per pair");
  for (double w : weights) {
    if (!(w >= 0.0 && w <= 1.0)) throw InputError("from_weights: weights must lie in [0, 1]");
  }
  ProcessTrace t;
  t.n_ = n;
  t.explicit_weights_ = std::move(weights);
  t.build_prefix(1.0);
  return t;
}

double ProcessTrace::weight_of_pair(std::uint64_t pair) const noexcept {
  if (explicit_weights_) return (*explicit_weights_)[pair];
  return to_unit(splitmix_at(seed_, pair));
}

double ProcessTrace::weight(Vertex u, Vertex v) const {
  if (u == v || u >= n_ || v >= n_) throw InputError("weight: invalid pair");
  return weight_of_pair(pair_index(n_, u, v));
}

std::vector<WeightedEdge> ProcessTrace::scan(double cutoff) const {
  std::vector<WeightedEdge> out;
  std::uint64_t pair = 0;
  for (Vertex u = 0; u < n_; ++u) {
    for (Vertex v = u + 1; v < n_; ++v, ++pair) {
      const double w = weight_of_pair(pair);
      if (w <= cutoff) out.push_back({{u, v}, w, pair});
    }
  }
  std::sort(out.begin(), out.end(), process_order);
  return out;
}

void ProcessTrace::build_prefix(double initial_cutoff) {
  double cutoff = initial_cutoff;
  for (;;) {
    auto edges = scan(cutoff);
    if (cutoff >= 1.0 || connects(n_, edges)) {
      prefix_ = std::move(edges);
      cutoff_ = cutoff;
      return;
    }
    cutoff = std::min(1.0, 2.0 * cutoff);
  }
}

std::vector<WeightedEdge> ProcessTrace::first_edges(std::uint64_t m) const {
  if (m > pairs()) throw InputError("m exceeds the number of pairs");
  if (m <= prefix_.size()) return {prefix_.begin(), prefix_.begin() + static_cast<std::ptrdiff_t>(m)};
  double cutoff = cutoff_;
  for (;;) {
    cutoff = std::min(1.0, 2.0 * cutoff);
    auto edges = scan(cutoff);
    if (edges.size() >= m) {
      edges.resize(m);
      return edges;
    }
  }
}

Graph ProcessTrace::graph_at_p(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("graph_at_p: p must lie in [0, 1]");
  if (p <= cutoff_) {
    auto end = std::upper_bound(prefix_.begin(), prefix_.end(), p,
                                [](double x, const WeightedEdge& e) { return x < e.weight; });
    return graph_from(n_, {prefix_.begin(), end});
  }
  return graph_from(n_, scan(p));
}

Graph ProcessTrace::graph_at_m(std::uint64_t m) const { return graph_from(n_, first_edges(m)); }

Thresholds hitting_times(const ProcessTrace& t) {
  Thresholds out;
  const auto edges = t.sorted_prefix();
  UnionFind uf(t.order());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    uf.unite(edges[i].edge.u, edges[i].edge.v);
    if (uf.components() == 1) {
      out.tau_edges = i + 1;
      out.lambda_hit = edges[i].weight;
      break;
    }
  }
  if (out.tau_edges == 0) throw NumericalError("hitting_times: prefix does not connect the graph");
  if (t.order() >= 3) {
    const auto w = window(t.order());
    out.sigma = w.sigma;
    out.omega_time = w.omega_time;
  } else {
    out.sigma = out.omega_time = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double default_g(std::size_t n) { return std::log(std::log(static_cast<double>(n))); }

Window window(std::size_t n, const GFunction& g) {
  if (n < 3) throw InputError("window needs n >= 3");
  const double gn = g(n);
  if (!(gn > 0.0)) throw InputError("window: g(n) must be positive");
  const double ln = std::log(static_cast<double>(n));
  const double sigma = (ln - gn) / static_cast<double>(n - 1);
  if (!(sigma > 0.0)) throw InputError("window: n too small for a positive sigma");
  return {sigma, 5.0 * ln / static_cast<double>(n - 1)};
}

Partition partition_bw(const ProcessTrace& t, double eps, const GFunction& g) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("partition_bw: eps must lie in (0, 1)");
  const auto w = window(t.order(), g);
  const Graph g_sigma = t.graph_at_p(std::min(1.0, w.sigma));
  Partition out{VertexSet(t.order()), VertexSet(t.order()), 11.0 * eps * std::log(static_cast<double>(t.order()))};
  for (Vertex v = 0; v < t.order(); ++v) {
    if (static_cast<double>(g_sigma.degree(v)) <= out.degree_threshold) {
      out.b.insert(v);
    } else {
      out.w.insert(v);
    }
  }
  return out;
}

DefectAudit audit_defects(const ProcessTrace& t, double eps, const GFunction& g) {
  const auto part = partition_bw(t, eps, g);
  const auto w = window(t.order(), g);
  const auto hit = hitting_times(t);
  DefectAudit out;
  out.lambda_in_window = w.sigma < hit.lambda_hit && hit.lambda_hit < w.omega_time;
  out.b_size = part.b.size();
  const double n = static_cast<double>(t.order());
  out.b_size_bound = std::pow(n, 22.0 * eps * std::log(std::exp(1.0) / (11.0 * eps)));
  out.b_size_below_bound = static_cast<double>(out.b_size) < out.b_size_bound;

  const Graph g_omega = t.graph_at_p(std::min(1.0, w.omega_time));
  out.bb_edges_at_omega = pair_count(g_omega, part.b, part.b) / 2;
  for (Vertex v = 0; v < t.order(); ++v) {
    std::size_t in_b = 0;
    for (Vertex u : g_omega.neighbors(v)) in_b += part.b.contains(u) ? 1 : 0;
    if (in_b >= 2) {
      ++out.vertices_with_two_b_neighbors;
      if (part.w.contains(v)) ++out.w_vertices_with_two_outside;
    }
  }
  return out;
}

}  // namespace synclab::process
