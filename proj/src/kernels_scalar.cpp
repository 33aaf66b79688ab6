#include "synclab/kernels.hpp"

namespace synclab::kernels {

namespace {

double dot(const double* x, const double* y, std::size_t len) {
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) y[i] += a * x[i];
}

void adjacency_apply(Csr g, const double* x, double* out) {
  for (std::size_t v = 0; v < g.n; ++v) {
    double acc = 0.0;
    for (std::uint32_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) acc += x[g.adj[k]];
    out[v] = acc;
  }
}

void weighted_laplacian_apply(Csr g, const double* w, const double* x, double* out) {
  for (std::size_t v = 0; v < g.n; ++v) {
    double diag = 0.0;
    double off = 0.0;
    for (std::uint32_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      diag += w[k];
      off += w[k] * x[g.adj[k]];
    }
    out[v] = diag * x[v] - off;
  }
}

void phasor_gradient(Csr g, const double* c, const double* s, double* out) {
  for (std::size_t v = 0; v < g.n; ++v) {
    double sum_c = 0.0;
    double sum_s = 0.0;
    for (std::uint32_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      sum_c += c[g.adj[k]];
      sum_s += s[g.adj[k]];
    }
    // sin(a - b) = sin a cos b - cos a sin b
    out[v] = s[v] * sum_c - c[v] * sum_s;
  }
}

double phasor_pair_distance(Csr g, const double* c, const double* s) {
  double acc = 0.0;
  for (std::size_t v = 0; v < g.n; ++v) {
    for (std::uint32_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      const double dc = c[v] - c[g.adj[k]];
      const double ds = s[v] - s[g.adj[k]];
      acc += dc * dc + ds * ds;
    }
  }
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      Isa::scalar, "scalar", dot, axpy, adjacency_apply, weighted_laplacian_apply, phasor_gradient,
      phasor_pair_distance,
  };
  return table;
}

}  // namespace synclab::kernels
