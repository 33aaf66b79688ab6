#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's numerical code paths.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "synclab/graph.hpp"
#include "synclab/rng.hpp"

namespace oracle {

inline Eigen::MatrixXd adjacency(const synclab::Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.order());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return a;
}

inline Eigen::MatrixXd laplacian(const synclab::Graph& g) {
  Eigen::MatrixXd a = adjacency(g);
  Eigen::MatrixXd l = -a;
  for (Eigen::Index i = 0; i < a.rows(); ++i) l(i, i) = a.row(i).sum();
  return l;
}

inline Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double deviation_norm(const synclab::Graph& g, double d) {
  const auto n = static_cast<Eigen::Index>(g.order());
  Eigen::MatrixXd m = adjacency(g) - Eigen::MatrixXd::Constant(n, n, d / static_cast<double>(n));
  return eigenvalues(m).cwiseAbs().maxCoeff();
}

inline std::pair<double, double> expander_bounds(const synclab::Graph& g, double d) {
  const auto n = static_cast<Eigen::Index>(g.order());
  Eigen::MatrixXd m = laplacian(g) - d * Eigen::MatrixXd::Identity(n, n) +
                      Eigen::MatrixXd::Constant(n, n, d / static_cast<double>(n));
  auto ev = eigenvalues(m);
  return {ev.minCoeff() / d, ev.maxCoeff() / d};
}

// Straightforward edge-by-edge energy, 1/2 sum over ordered pairs.
inline double energy(const synclab::Graph& g, const std::vector<double>& th) {
  double e = 0.0;
  for (const auto& ed : g.edges()) e += 1.0 - std::cos(th[ed.u] - th[ed.v]);
  return e;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : p_(n) { std::iota(p_.begin(), p_.end(), 0U); }
  std::size_t find(std::size_t x) { return p_[x] == x ? x : p_[x] = find(p_[x]); }
  void unite(std::size_t a, std::size_t b) { p_[find(a)] = find(b); }
  std::size_t components() {
    std::size_t c = 0;
    for (std::size_t i = 0; i < p_.size(); ++i) c += find(i) == i;
    return c;
  }

 private:
  std::vector<std::size_t> p_;
};

inline bool connected(const synclab::Graph& g) {
  UnionFind uf(g.order());
  for (const auto& e : g.edges()) uf.unite(e.u, e.v);
  return uf.components() <= 1;
}

inline synclab::Graph random_graph(std::size_t n, double p, synclab::Rng& rng) {
  std::vector<synclab::Edge> edges;
  for (synclab::Vertex u = 0; u < n; ++u) {
    for (synclab::Vertex v = u + 1; v < n; ++v) {
      if (rng.uniform() < p) edges.push_back({u, v});
    }
  }
  return synclab::Graph(n, edges);
}

}  // namespace oracle
