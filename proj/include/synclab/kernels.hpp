#pragma once

// Data-parallel inner loops shared by the dynamics and eigen solvers.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The variant is picked once at runtime from CPUID; setting
// SYNCLAB_SIMD=scalar in the environment forces the reference path.
// Variants agree with the reference up to floating-point reassociation.

#include <cstddef>
#include <cstdint>

namespace synclab::kernels {

enum class Isa { scalar, avx2 };

/// CSR adjacency as seen by the kernels. `adj` holds sorted neighbor ids,
/// `offsets` has n + 1 entries.
struct Csr {
  const std::uint32_t* offsets;
  const std::uint32_t* adj;
  std::size_t n;
};

struct KernelTable {
  Isa isa;
  const char* name;

  double (*dot)(const double* x, const double* y, std::size_t len);

  /// y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t len);

  /// out[v] = sum over u in N(v) of x[u]
  void (*adjacency_apply)(Csr g, const double* x, double* out);

  /// out[v] = sum over u in N(v) of w[vu] * (x[v] - x[u]); w aligned with adj.
  void (*weighted_laplacian_apply)(Csr g, const double* w, const double* x, double* out);

  /// out[v] = sum over u in N(v) of sin(theta_v - theta_u), from c = cos(theta), s = sin(theta).
  void (*phasor_gradient)(Csr g, const double* c, const double* s, double* out);

  /// Sum over ordered adjacent pairs of |e^{i theta_v} - e^{i theta_u}|^2.
  double (*phasor_pair_distance)(Csr g, const double* c, const double* s);
};

const KernelTable& scalar_kernels();

/// nullptr when the build lacks the variant or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// The table used by the library; chosen on first call.
const KernelTable& active_kernels();

}  // namespace synclab::kernels
