#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracle.hpp"
#include "synclab/kernels.hpp"
#include "synclab/rng.hpp"

using namespace synclab;

namespace {

kernels::Csr csr(const Graph& g) { return {g.offsets().data(), g.adjacency().data(), g.order()}; }

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == doctest::Approx(b[i]).epsilon(tol).scale(1.0));
}

}  // namespace

TEST_CASE("rng is reproducible and in range") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next();
    REQUIRE(x == b.next());
    differs = differs || x != c.next();
  }
  CHECK(differs);
  Rng r(1);
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double t = r.angle();
    REQUIRE(t > -M_PI);
    REQUIRE(t <= M_PI);
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    mean += u;
    REQUIRE(r.below(7) < 7);
  }
  CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.01));
  CHECK(splitmix_at(5, 3) == splitmix_at(5, 3));
  CHECK(hash_seed({1, 2}) != hash_seed({2, 1}));
}

TEST_CASE("scalar kernels against direct loops") {
  Rng rng(8);
  const Graph g = oracle::random_graph(37, 0.3, rng);
  const auto& k = kernels::scalar_kernels();
  const auto x = random_vec(37, rng);
  const auto y = random_vec(37, rng);

  double dot = 0.0;
  for (std::size_t i = 0; i < 37; ++i) dot += x[i] * y[i];
  CHECK(k.dot(x.data(), y.data(), 37) == doctest::Approx(dot));

  std::vector<double> out(37), ref(37, 0.0);
  k.adjacency_apply(csr(g), x.data(), out.data());
  for (const auto& e : g.edges()) {
    ref[e.u] += x[e.v];
    ref[e.v] += x[e.u];
  }
  check_close(out, ref, 1e-14);

  std::vector<double> c(37), s(37), grad_ref(37, 0.0);
  for (std::size_t i = 0; i < 37; ++i) {
    c[i] = std::cos(x[i]);
    s[i] = std::sin(x[i]);
  }
  for (const auto& e : g.edges()) {
    grad_ref[e.u] += std::sin(x[e.u] - x[e.v]);
    grad_ref[e.v] += std::sin(x[e.v] - x[e.u]);
  }
  k.phasor_gradient(csr(g), c.data(), s.data(), out.data());
  check_close(out, grad_ref, 1e-12);
  CHECK(k.phasor_pair_distance(csr(g), c.data(), s.data()) / 4.0 ==
        doctest::Approx(oracle::energy(g, x)).epsilon(1e-12));
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const auto* fast = kernels::avx2_kernels();
  if (fast == nullptr) {
    MESSAGE("AVX2 variant unavailable on this machine; equivalence not exercised");
    return;
  }
  const auto& ref = kernels::scalar_kernels();
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    // Sizes around the vector width and its multiples, including degree-0 rows.
    const std::size_t n = 1 + rng.below(90);
    const Graph g = oracle::random_graph(n, rng.uniform(), rng);
    const auto x = random_vec(n, rng);
    const auto y = random_vec(n, rng);
    std::vector<double> w(g.adjacency().size());
    for (auto& v : w) v = rng.uniform(-1.0, 1.0);

    CHECK(fast->dot(x.data(), y.data(), n) == doctest::Approx(ref.dot(x.data(), y.data(), n)).epsilon(1e-13));

    auto y1 = y, y2 = y;
    fast->axpy(0.37, x.data(), y1.data(), n);
    ref.axpy(0.37, x.data(), y2.data(), n);
    check_close(y1, y2, 1e-15);

    std::vector<double> o1(n), o2(n);
    fast->adjacency_apply(csr(g), x.data(), o1.data());
    ref.adjacency_apply(csr(g), x.data(), o2.data());
    check_close(o1, o2, 1e-13);

    fast->weighted_laplacian_apply(csr(g), w.data(), x.data(), o1.data());
    ref.weighted_laplacian_apply(csr(g), w.data(), x.data(), o2.data());
    check_close(o1, o2, 1e-13);

    std::vector<double> c(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = std::cos(x[i]);
      s[i] = std::sin(x[i]);
    }
    fast->phasor_gradient(csr(g), c.data(), s.data(), o1.data());
    ref.phasor_gradient(csr(g), c.data(), s.data(), o2.data());
    check_close(o1, o2, 1e-13);

    CHECK(fast->phasor_pair_distance(csr(g), c.data(), s.data()) ==
          doctest::Approx(ref.phasor_pair_distance(csr(g), c.data(), s.data())).epsilon(1e-13));
  }
}
