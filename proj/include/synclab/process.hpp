#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "synclab/graph.hpp"

namespace synclab::process {

/// Index of the unordered pair {u, v}, u < v, in lexicographic order.
std::uint64_t pair_index(std::size_t n, Vertex u, Vertex v) noexcept;
std::uint64_t num_pairs(std::size_t n) noexcept;

struct WeightedEdge {
  Edge edge;
  double weight;
  std::uint64_t pair;  // pair_index, the tie-breaker
};

/// Coupled random graph process: an independent Unif[0,1] weight per pair of
/// K_n. G_p keeps pairs with weight <= p; G(n, m) keeps the m lightest pairs.
///
/// Weights are a counter-based function of (seed, pair index), so they are
/// never stored in bulk. The trace keeps the sorted list of pairs up to a
/// cutoff that is guaranteed to contain the connectivity hitting time.
class ProcessTrace {
 public:
  static constexpr const char* kRngId = "splitmix64-counter(seed, pair_index)";

  static ProcessTrace sample(std::size_t n, std::uint64_t seed);
  /// Explicit weights indexed by pair_index; for exhaustive tests.
  static ProcessTrace from_weights(std::size_t n, std::vector<double> weights);

  std::size_t order() const noexcept { return n_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t pairs() const noexcept { return num_pairs(n_); }

  double weight(Vertex u, Vertex v) const;
  double weight_of_pair(std::uint64_t pair) const noexcept;

  /// Pairs with weight <= prefix_cutoff(), sorted by (weight, pair index).
  std::span<const WeightedEdge> sorted_prefix() const noexcept { return prefix_; }
  double prefix_cutoff() const noexcept { return cutoff_; }

  /// The m lightest pairs in process order (m <= pairs()).
  std::vector<WeightedEdge> first_edges(std::uint64_t m) const;

  Graph graph_at_p(double p) const;
  Graph graph_at_m(std::uint64_t m) const;

 private:
  ProcessTrace() = default;
  std::vector<WeightedEdge> scan(double cutoff) const;
  void build_prefix(double initial_cutoff);

  std::size_t n_ = 0;
  std::uint64_t seed_ = 0;
  std::optional<std::vector<double>> explicit_weights_;
  std::vector<WeightedEdge> prefix_;
  double cutoff_ = 0.0;
};

struct Thresholds {
  double sigma = 0.0;        // NaN when n < 3
  double omega_time = 0.0;   // NaN when n < 3
  double lambda_hit = 0.0;   // weight of the edge that connects the graph
  std::uint64_t tau_edges = 0;
};

/// tau: least m with G(n, m) connected; lambda: the tau-th smallest weight.
/// Window fields are filled with the default g(n) when n >= 3.
Thresholds hitting_times(const ProcessTrace& t);

using GFunction = std::function<double(std::size_t)>;

/// g(n) = log log n.
double default_g(std::size_t n);

struct Window {
  double sigma;
  double omega_time;
};

/// sigma = (log n - g(n)) / (n - 1), omega = 5 log n / (n - 1), natural logs.
/// Throws InputError for n < 3, g(n) <= 0 or sigma <= 0.
Window window(std::size_t n, const GFunction& g = default_g);

struct Partition {
  VertexSet b;  // low degree in G_sigma
  VertexSet w;
  double degree_threshold;  // 11 eps log n
};

/// B = {v : deg_{G_sigma}(v) <= 11 eps log n}, W = V \ B.
Partition partition_bw(const ProcessTrace& t, double eps, const GFunction& g = default_g);

/// Desk-scale evaluation of the structural conclusions about B and W.
struct DefectAudit {
  bool lambda_in_window = false;         // sigma < lambda < omega
  std::size_t b_size = 0;
  double b_size_bound = 0.0;             // n^{22 eps log(e / (11 eps))}
  bool b_size_below_bound = false;
  std::uint64_t bb_edges_at_omega = 0;   // edges of G_omega inside B
  std::size_t vertices_with_two_b_neighbors = 0;  // in G_omega, over all of V
  std::size_t w_vertices_with_two_outside = 0;    // in G_omega, over W only
};

DefectAudit audit_defects(const ProcessTrace& t, double eps, const GFunction& g = default_g);

}  // namespace synclab::process
