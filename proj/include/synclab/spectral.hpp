#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "synclab/graph.hpp"

namespace synclab::spectral {

/// Matrix-free symmetric linear operator on R^dimension.
class SymmetricOperator {
 public:
  using ApplyFn = std::function<void(std::span<const double>, std::span<double>)>;

  SymmetricOperator(std::size_t dimension, ApplyFn apply)
      : dimension_(dimension), apply_(std::move(apply)) {}

  std::size_t dimension() const noexcept { return dimension_; }

  void apply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> x) const;

  /// Row-major dense matrix built from the images of unit vectors.
  std::vector<double> to_dense() const;

 private:
  std::size_t dimension_;
  ApplyFn apply_;
};

enum class Method { automatic, dense, lanczos };

struct EigenOptions {
  Method method = Method::automatic;
  std::size_t dense_limit = 512;    // automatic: dense solver up to this dimension
  double tolerance = 1e-10;         // Ritz residual, relative to the spectral radius estimate
  std::size_t max_iterations = 0;   // 0 means 10 * dimension
  std::uint64_t probe_seed = 0x6c616e637a6f73ULL;
};

struct ExtremeEigenvalues {
  double min = 0.0;
  double max = 0.0;
  std::size_t iterations = 0;  // Lanczos steps; 0 for the dense path
  double residual = 0.0;       // largest Ritz residual of the two extremes
};

/// Smallest and largest eigenvalue. Throws NumericalError on non-convergence.
ExtremeEigenvalues extreme_eigenvalues(const SymmetricOperator& op, const EigenOptions& opts = {});

struct DenseEigen {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column-major: vectors[k * n + i] is entry i of eigenvector k
};

/// Householder tridiagonalization followed by implicit QL. `a` is row-major n x n
/// and only its lower triangle is read.
DenseEigen dense_symmetric_eigen(std::span<const double> a, std::size_t n, bool want_vectors = true);

/// Eigen-decomposition of a symmetric tridiagonal matrix with diagonal `diag`
/// and off-diagonal `off` (off.size() == diag.size() - 1).
DenseEigen tridiagonal_eigen(std::span<const double> diag, std::span<const double> off,
                             bool want_vectors = true);

// Graph operators. The graph must outlive the returned operator.

/// x -> A x - (d/n) (1^T x) 1
SymmetricOperator deviation_operator(const Graph& g, double d);

/// x -> (D - A) x
SymmetricOperator laplacian_operator(const Graph& g);

/// x -> (D - A - d I + (d/n) J) x
SymmetricOperator expander_laplacian_operator(const Graph& g, double d);

/// ||A - (d/n) J|| (largest absolute eigenvalue).
double spectral_norm_deviation(const Graph& g, double d, const EigenOptions& opts = {});

struct ExpanderBounds {
  double c_minus = 0.0;
  double c_plus = 0.0;
};

/// Tightest (c-, c+) with c- d I <= D - A - d I + (d/n) J <= c+ d I.
ExpanderBounds laplacian_expander_bounds(const Graph& g, double d, const EigenOptions& opts = {});

}  // namespace synclab::spectral
