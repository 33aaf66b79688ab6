// Compiled with -mavx2 -mfma. Only reached after a CPUID check.

#include <immintrin.h>

#include "synclab/kernels.hpp"

namespace synclab::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline __m128i load_index4(const std::uint32_t* p) {
  return _mm_loadu_si128(reinterpret_cast<const __m128i*>(p));
}

double dot(const double* x, const double* y, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= len; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < len; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t len) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < len; ++i) y[i] += a * x[i];
}

void adjacency_apply(Csr g, const double* x, double* out) {
  for (std::size_t v = 0; v < g.n; ++v) {
    std::uint32_t k = g.offsets[v];
    const std::uint32_t end = g.offsets[v + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      acc = _mm256_add_pd(acc, _mm256_i32gather_pd(x, load_index4(g.adj + k), 8));
    }
    double tail = hsum(acc);
    for (; k < end; ++k) tail += x[g.adj[k]];
    out[v] = tail;
  }
}

void weighted_laplacian_apply(Csr g, const double* w, const double* x, double* out) {
  for (std::size_t v = 0; v < g.n; ++v) {
    std::uint32_t k = g.offsets[v];
    const std::uint32_t end = g.offsets[v + 1];
    __m256d diag = _mm256_setzero_pd();
    __m256d off = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m256d wk = _mm256_loadu_pd(w + k);
      diag = _mm256_add_pd(diag, wk);
      off = _mm256_fmadd_pd(wk, _mm256_i32gather_pd(x, load_index4(g.adj + k), 8), off);
    }
    double d = hsum(diag);
    double o = hsum(off);
    for (; k < end; ++k) {
      d += w[k];
      o += w[k] * x[g.adj[k]];
    }
    out[v] = d * x[v] - o;
  }
}

void phasor_gradient(Csr g, const double* c, const double* s, double* out) {
  for (std::size_t v = 0; v < g.n; ++v) {
    std::uint32_t k = g.offsets[v];
    const std::uint32_t end = g.offsets[v + 1];
    __m256d acc_c = _mm256_setzero_pd();
    __m256d acc_s = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = load_index4(g.adj + k);
      acc_c = _mm256_add_pd(acc_c, _mm256_i32gather_pd(c, idx, 8));
      acc_s = _mm256_add_pd(acc_s, _mm256_i32gather_pd(s, idx, 8));
    }
    double sum_c = hsum(acc_c);
    double sum_s = hsum(acc_s);
    for (; k < end; ++k) {
      sum_c += c[g.adj[k]];
      sum_s += s[g.adj[k]];
    }
    out[v] = s[v] * sum_c - c[v] * sum_s;
  }
}

double phasor_pair_distance(Csr g, const double* c, const double* s) {
  __m256d acc = _mm256_setzero_pd();
  double tail = 0.0;
  for (std::size_t v = 0; v < g.n; ++v) {
    std::uint32_t k = g.offsets[v];
    const std::uint32_t end = g.offsets[v + 1];
    const __m256d cv = _mm256_set1_pd(c[v]);
    const __m256d sv = _mm256_set1_pd(s[v]);
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = load_index4(g.adj + k);
      const __m256d dc = _mm256_sub_pd(cv, _mm256_i32gather_pd(c, idx, 8));
      const __m256d ds = _mm256_sub_pd(sv, _mm256_i32gather_pd(s, idx, 8));
      acc = _mm256_fmadd_pd(dc, dc, _mm256_fmadd_pd(ds, ds, acc));
    }
    for (; k < end; ++k) {
      const double dc = c[v] - c[g.adj[k]];
      const double ds = s[v] - s[g.adj[k]];
      tail += dc * dc + ds * ds;
    }
  }
  return hsum(acc) + tail;
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{
      Isa::avx2, "avx2", dot, axpy, adjacency_apply, weighted_laplacian_apply, phasor_gradient,
      phasor_pair_distance,
  };
  return t;
}

}  // namespace synclab::kernels::avx2
