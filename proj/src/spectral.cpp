#include "synclab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "synclab/errors.hpp"
#include "synclab/kernels.hpp"
#include "synclab/rng.hpp"

namespace synclab::spectral {

void SymmetricOperator::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dimension_ || out.size() != dimension_) {
    throw InputError("operator dimension mismatch");
  }
  apply_(x, out);
}

std::vector<double> SymmetricOperator::apply(std::span<const double> x) const {
  std::vector<double> out(dimension_);
  apply(x, out);
  return out;
}

std::vector<double> SymmetricOperator::to_dense() const {
  const std::size_t n = dimension_;
  std::vector<double> dense(n * n);
  std::vector<double> unit(n, 0.0);
  std::vector<double> column(n);
  for (std::size_t j = 0; j < n; ++j) {
    unit[j] = 1.0;
    apply_(unit, column);
    unit[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) dense[i * n + j] = column[i];
  }
  return dense;
}

// ---------------------------------------------------------------------------
// Dense symmetric eigensolver (EISPACK tred2/tql2 lineage).

namespace {

// v is row-major n x n, d/e length n. On exit d is the diagonal, e[i] the
// subdiagonal entry (i, i-1), v the accumulated orthogonal transform.
void householder_tridiagonalize(std::vector<double>& v, std::vector<double>& d, std::vector<double>& e,
                                std::size_t n) {
  auto V = [&](std::size_t i, std::size_t j) -> double& { return v[i * n + j]; };
  for (std::size_t j = 0; j < n; ++j) d[j] = V(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
        V(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        V(j, i) = f;
        g = e[j] + V(j, j) * f;
        for (std::size_t k = j + 1; k <= i - 1; ++k) {
          g += V(k, j) * d[k];
          e[k] += V(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k <= i - 1; ++k) V(k, j) -= (f * e[k] + g * d[k]);
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    V(n - 1, i) = V(i, i);
    V(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = V(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += V(k, i + 1) * V(k, j);
        for (std::size_t k = 0; k <= i; ++k) V(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) V(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = V(n - 1, j);
    V(n - 1, j) = 0.0;
  }
  V(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL with Wilkinson-style shifts. Same conventions as above; when
// `vectors` is false, v is left untouched (and may be empty).
void tridiagonal_ql(std::vector<double>& v, std::vector<double>& d, std::vector<double>& e, std::size_t n,
                    bool vectors) {
  auto V = [&](std::size_t i, std::size_t j) -> double& { return v[i * n + j]; };
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::ldexp(1.0, -52);
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 80) throw NumericalError("tridiagonal QL iteration did not converge", d[l], std::abs(e[l]));
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0;
        double c2 = c;
        double c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0;
        double s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (vectors) {
            for (std::size_t k = 0; k < n; ++k) {
              h = V(k, ii + 1);
              V(k, ii + 1) = s * V(k, ii) + c * h;
              V(k, ii) = c * V(k, ii) - s * h;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

DenseEigen sorted_result(std::vector<double>& v, std::vector<double>& d, std::size_t n, bool vectors) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  DenseEigen out;
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = d[order[k]];
  if (vectors) {
    out.vectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) out.vectors[k * n + i] = v[i * n + order[k]];
    }
  }
  return out;
}

}  // namespace

DenseEigen dense_symmetric_eigen(std::span<const double> a, std::size_t n, bool want_vectors) {
  if (a.size() != n * n) throw InputError("dense matrix size mismatch");
  if (n == 0) return {};
  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) v[i * n + j] = v[j * n + i] = a[i * n + j];
  }
  std::vector<double> d(n);
  std::vector<double> e(n);
  householder_tridiagonalize(v, d, e, n);
  tridiagonal_ql(v, d, e, n, want_vectors);
  return sorted_result(v, d, n, want_vectors);
}

DenseEigen tridiagonal_eigen(std::span<const double> diag, std::span<const double> off, bool want_vectors) {
  const std::size_t n = diag.size();
  if (n == 0) return {};
  if (off.size() + 1 != n) throw InputError("tridiagonal off-diagonal length mismatch");
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) e[i] = off[i - 1];
  std::vector<double> v;
  if (want_vectors) {
    v.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  }
  tridiagonal_ql(v, d, e, n, want_vectors);
  return sorted_result(v, d, n, want_vectors);
}

// ---------------------------------------------------------------------------
// Lanczos with full reorthogonalization.

namespace {

ExtremeEigenvalues dense_extremes(const SymmetricOperator& op) {
  const auto dense = op.to_dense();
  const auto eig = dense_symmetric_eigen(dense, op.dimension(), false);
  for (double x : eig.values) {
    if (!std::isfinite(x)) throw NumericalError("non-finite eigenvalue in dense solve");
  }
  return {eig.values.front(), eig.values.back(), 0, 0.0};
}

ExtremeEigenvalues lanczos_extremes(const SymmetricOperator& op, const EigenOptions& opts) {
  const std::size_t n = op.dimension();
  const auto& k = kernels::active_kernels();
  const std::size_t budget = opts.max_iterations ? opts.max_iterations : 10 * n;
  const std::size_t max_basis = std::min(budget, n);

  Rng rng(opts.probe_seed);
  std::vector<std::vector<double>> basis;
  std::vector<double> alphas;
  std::vector<double> betas;  // betas[j] couples basis j and j + 1

  {
    std::vector<double> q(n);
    for (auto& x : q) x = rng.uniform(-1.0, 1.0);
    const double norm = std::sqrt(k.dot(q.data(), q.data(), n));
    for (auto& x : q) x /= norm;
    basis.push_back(std::move(q));
  }
  std::vector<double> w(n);
  double best_min = 0.0;
  double best_max = 0.0;
  double best_residual = std::numeric_limits<double>::infinity();

  for (std::size_t j = 0; j < max_basis; ++j) {
    const auto& q = basis[j];
    op.apply(q, w);
    const double alpha = k.dot(q.data(), w.data(), n);
    alphas.push_back(alpha);
    k.axpy(-alpha, q.data(), w.data(), n);
    if (j > 0) k.axpy(-betas[j - 1], basis[j - 1].data(), w.data(), n);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) k.axpy(-k.dot(b.data(), w.data(), n), b.data(), w.data(), n);
    }
    const double beta = std::sqrt(k.dot(w.data(), w.data(), n));
    if (!std::isfinite(alpha) || !std::isfinite(beta)) {
      throw NumericalError("non-finite value in Lanczos iteration", best_max, best_residual);
    }

    const std::size_t m = j + 1;
    double scale = std::abs(beta);
    for (double a : alphas) scale = std::max(scale, std::abs(a));
    for (double b : betas) scale = std::max(scale, std::abs(b));
    scale = std::max(scale, 1.0);
    // A random start has a component in every eigenspace, so breakdown means
    // the Krylov space already holds every distinct eigenvalue.
    const bool breakdown = beta <= 1e-12 * scale;
    const std::size_t min_steps = std::min<std::size_t>(n, 24);
    const bool check = breakdown || m == max_basis || (m >= min_steps && m % 4 == 0);

    if (check) {
      const auto t = tridiagonal_eigen(alphas, std::span<const double>(betas.data(), m - 1), true);
      const double coupling = breakdown ? 0.0 : beta;
      const double r_min = std::abs(coupling * t.vectors[0 * m + (m - 1)]);
      const double r_max = std::abs(coupling * t.vectors[(m - 1) * m + (m - 1)]);
      best_min = t.values.front();
      best_max = t.values.back();
      best_residual = std::max(r_min, r_max);
      const double theta_scale = std::max({std::abs(best_min), std::abs(best_max), 1.0});
      if (breakdown || best_residual <= opts.tolerance * theta_scale) {
        return {best_min, best_max, m, best_residual};
      }
    }
    if (m == max_basis) break;

    betas.push_back(beta);
    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) next[i] = w[i] / beta;
    basis.push_back(std::move(next));
  }
  throw NumericalError("Lanczos did not converge within " + std::to_string(budget) + " iterations",
                       std::max(std::abs(best_min), std::abs(best_max)), best_residual);
}

}  // namespace

ExtremeEigenvalues extreme_eigenvalues(const SymmetricOperator& op, const EigenOptions& opts) {
  if (op.dimension() == 0) throw InputError("extreme_eigenvalues on a zero-dimensional operator");
  const bool dense = opts.method == Method::dense ||
                     (opts.method == Method::automatic && op.dimension() <= opts.dense_limit);
  return dense ? dense_extremes(op) : lanczos_extremes(op, opts);
}

// ---------------------------------------------------------------------------
// Graph operators

namespace {

kernels::Csr csr_of(const Graph& g) { return {g.offsets().data(), g.adjacency().data(), g.order()}; }

void require_positive_degree_parameter(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw InputError("degree parameter d must be positive and finite");
}

}  // namespace

SymmetricOperator deviation_operator(const Graph& g, double d) {
  require_positive_degree_parameter(d);
  const double shift = d / static_cast<double>(g.order());
  return SymmetricOperator(g.order(), [&g, shift](std::span<const double> x, std::span<double> out) {
    kernels::active_kernels().adjacency_apply(csr_of(g), x.data(), out.data());
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (auto& y : out) y -= shift * total;
  });
}

SymmetricOperator laplacian_operator(const Graph& g) {
  return SymmetricOperator(g.order(), [&g](std::span<const double> x, std::span<double> out) {
    kernels::active_kernels().adjacency_apply(csr_of(g), x.data(), out.data());
    for (std::size_t v = 0; v < out.size(); ++v) {
      out[v] = static_cast<double>(g.degree(static_cast<Vertex>(v))) * x[v] - out[v];
    }
  });
}

SymmetricOperator expander_laplacian_operator(const Graph& g, double d) {
  require_positive_degree_parameter(d);
  const double shift = d / static_cast<double>(g.order());
  return SymmetricOperator(g.order(), [&g, d, shift](std::span<const double> x, std::span<double> out) {
    kernels::active_kernels().adjacency_apply(csr_of(g), x.data(), out.data());
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (std::size_t v = 0; v < out.size(); ++v) {
      const double deg = static_cast<double>(g.degree(static_cast<Vertex>(v)));
      out[v] = (deg - d) * x[v] - out[v] + shift * total;
    }
  });
}

double spectral_norm_deviation(const Graph& g, double d, const EigenOptions& opts) {
  if (g.order() == 0) throw InputError("spectral_norm_deviation on an empty graph");
  const auto ext = extreme_eigenvalues(deviation_operator(g, d), opts);
  return std::max(std::abs(ext.min), std::abs(ext.max));
}

ExpanderBounds laplacian_expander_bounds(const Graph& g, double d, const EigenOptions& opts) {
  if (g.order() == 0) throw InputError("laplacian_expander_bounds on an empty graph");
  const auto ext = extreme_eigenvalues(expander_laplacian_operator(g, d), opts);
  return {ext.min / d, ext.max / d};
}

}  // namespace synclab::spectral
