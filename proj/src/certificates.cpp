#include "synclab/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>

#include "json.hpp"

#include "synclab/errors.hpp"
#include "synclab/rng.hpp"

namespace synclab::certificates {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

bool near(double lhs, double rhs, double band) {
  return std::abs(lhs - rhs) <= band * std::max(1.0, std::abs(rhs));
}

void mark_marginal(Condition& c, double band) {
  if (std::isfinite(c.lhs) && std::isfinite(c.rhs) && near(c.lhs, c.rhs, band)) {
    c.detail += c.detail.empty() ? "marginal" : "; marginal";
  }
}

Condition at_most(std::string name, double lhs, double rhs, std::string detail = {}) {
  Condition c{std::move(name), lhs, rhs, lhs <= rhs, std::move(detail)};
  mark_marginal(c, kMarginalBand);
  return c;
}

Condition at_least(std::string name, double lhs, double rhs, std::string detail = {}) {
  Condition c{std::move(name), lhs, rhs, lhs >= rhs, std::move(detail)};
  mark_marginal(c, kMarginalBand);
  return c;
}

// Spectral comparisons tolerate kSpectralGuard relative error in the favourable direction.
Condition spectral_at_most(std::string name, double lhs, double rhs) {
  const double guard = kSpectralGuard * std::max(1.0, std::abs(rhs));
  Condition c{std::move(name), lhs, rhs, lhs <= rhs + guard, "guard=" + num(guard)};
  mark_marginal(c, kSpectralGuard);
  return c;
}

Condition spectral_at_least(std::string name, double lhs, double rhs) {
  const double guard = kSpectralGuard * std::max(1.0, std::abs(rhs));
  Condition c{std::move(name), lhs, rhs, lhs >= rhs - guard, "guard=" + num(guard)};
  mark_marginal(c, kSpectralGuard);
  return c;
}

// Largest integer k >= 0 with 40 alpha k <= eps, evaluated exactly on the
// binary values of eps and alpha.
long long exact_k_star(double eps, double alpha) {
  auto fits = [&](long long k) {
    const double m = 40.0 * static_cast<double>(k);
    const double p = m * alpha;
    const double err = std::fma(m, alpha, -p);
    return p < eps || (p == eps && err <= 0.0);
  };
  const double q = eps / (40.0 * alpha);
  if (!(q < 9e15)) throw InputError("eps / (40 alpha) is too large");
  auto k = static_cast<long long>(std::floor(q));
  while (k > 0 && !fits(k)) --k;
  while (fits(k + 1)) ++k;
  return k;
}

void require_partition(const Graph& g, const VertexSet& w, const VertexSet& b) {
  const std::size_t n = g.order();
  if (w.universe() != n || b.universe() != n) throw InputError("W and B must be subsets of V(G)");
  if (!w.intersect(b).empty()) throw InputError("W and B must be disjoint");
  if (w.unite(b).size() != n) throw InputError("W and B must cover V(G)");
}

void require_defective_params(double eps, double alpha, double d) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 0.2)) throw InputError("alpha must lie in (0, 1/5)");
  if (!(d > 0.0)) throw InputError("d must be positive");
  if (!(alpha * d >= 1.0)) throw InputError("alpha d must be at least 1");
}

double max_b_neighbors(const Graph& g, const VertexSet& b) {
  std::size_t worst = 0;
  for (Vertex v = 0; v < g.order(); ++v) {
    std::size_t k = 0;
    for (Vertex u : g.neighbors(v)) k += b.contains(u) ? 1 : 0;
    worst = std::max(worst, k);
  }
  return static_cast<double>(worst);
}

double max_degree_in(const Graph& g, const VertexSet& s) {
  std::size_t worst = 0;
  for (Vertex v : s.members()) worst = std::max(worst, g.degree(v));
  return static_cast<double>(worst);
}

}  // namespace

void CertificateReport::add(Condition c) {
  overall = overall && c.pass;
  conditions.push_back(std::move(c));
}

const Condition* CertificateReport::find(std::string_view name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string to_json(const CertificateReport& r, int indent) {
  auto number = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return nullptr;
  };
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : r.conditions) {
    conds.push_back({{"name", c.name}, {"lhs", number(c.lhs)}, {"rhs", number(c.rhs)}, {"pass", c.pass},
                     {"detail", c.detail}});
  }
  nlohmann::json j = {{"overall", r.overall}, {"conditions", std::move(conds)}};
  return j.dump(indent);
}

CertificateReport check_expander(const Graph& g, double d, double alpha, const spectral::EigenOptions& eig) {
  if (!(d > 0.0)) throw InputError("check_expander: d must be positive");
  if (!(alpha > 0.0)) throw InputError("check_expander: alpha must be positive");
  CertificateReport r;
  r.add(spectral_at_most("expander_deviation", spectral::spectral_norm_deviation(g, d, eig), alpha * d));
  return r;
}

CertificateReport check_expander_full(const Graph& g, const ExpanderParams& p, const spectral::EigenOptions& eig) {
  if (!p.c_minus || !p.c_plus) throw InputError("check_expander_full: c_minus and c_plus are required");
  if (*p.c_minus > *p.c_plus) throw InputError("check_expander_full: c_minus must not exceed c_plus");
  if (p.n != 0 && p.n != g.order()) throw InputError("check_expander_full: n does not match the graph");
  CertificateReport r = check_expander(g, p.d, p.alpha, eig);
  const auto m = spectral::extreme_eigenvalues(spectral::expander_laplacian_operator(g, p.d), eig);
  r.add(spectral_at_least("laplacian_lower", m.min, *p.c_minus * p.d));
  r.add(spectral_at_most("laplacian_upper", m.max, *p.c_plus * p.d));
  // The diagonal of M bounds its smallest eigenvalue, so deg v >= (1 + c-) d - d/n.
  const double n = static_cast<double>(g.order());
  const double implied = (1.0 + *p.c_minus) * p.d;
  Condition deg = at_least("min_degree", static_cast<double>(g.min_degree()), implied - p.d / n,
                           "(1+c-)d=" + num(implied));
  deg.pass = deg.pass || deg.lhs >= deg.rhs - kSpectralGuard * std::max(1.0, p.d);
  r.add(std::move(deg));
  return r;
}

CertificateReport check_thm_tech(const ExpanderParams& p) {
  if (!p.c_minus || !p.c_plus) throw InputError("check_thm_tech: c_minus and c_plus are required");
  if (!(p.alpha > 0.0)) throw InputError("check_thm_tech: alpha must be positive");
  if (*p.c_minus > *p.c_plus) throw InputError("check_thm_tech: c_minus must not exceed c_plus");
  const double cm = *p.c_minus;
  const double cp = *p.c_plus;
  const double a = p.alpha;
  CertificateReport r;
  r.add(Condition{"c_minus_above_minus_one", cm, -1.0, cm > -1.0, {}});
  r.add(at_most("alpha_at_most_fifth", a, 0.2));

  Condition branch{"branch_max_below_one", kNaN, 1.0, false, {}};
  const double d1 = (1.0 + cm) * (1.0 + cm);
  const double d2 = (1.0 + cm) * (1.0 + 5.0 * cp - 4.0 * cm);
  if (d1 == 0.0) {
    branch.detail = "denominator-zero";
  } else if (!(d2 > 0.0)) {
    branch.detail = "denominator-nonpositive";
  } else {
    const double b1 = 64.0 * a * (1.0 + 2.0 * cp - cm) / d1;
    const double b2 = 64.0 * a * (1.0 + cp) * std::log((1.0 + cp + a) / (2.0 * a)) / d2;
    branch.lhs = std::max(b1, b2);
    branch.pass = branch.lhs < 1.0;
    branch.detail = "branch1=" + num(b1) + "; branch2=" + num(b2);
    mark_marginal(branch, kMarginalBand);
  }
  r.add(std::move(branch));
  return r;
}

double condition_for_k_star(double delta, double d_max, double exponent) {
  return 8.0 * (1.0 + delta) * (d_max + 1.0) / (delta * delta * std::exp(exponent));
}

double condition_for_d(double d_max, double eps, double d) {
  const double den = d_max - 4.0 * eps * d;
  return den > 0.0 ? 8.0 / den : kInf;
}

DefectiveDerived derive_defective(const Graph& g, const DefectiveInput& in) {
  require_partition(g, in.w, in.b);
  require_defective_params(in.eps, in.alpha, in.d);
  const auto prof = degree_profile(g, in.w);
  DefectiveDerived out;
  out.d_max = static_cast<double>(prof.max_degree);
  out.core_min_degree = static_cast<double>(prof.min_degree);
  out.ell = 2.0 * (in.eps + in.alpha) * in.d;
  const double den = out.d_max - 2.0 * in.eps * in.d;
  out.delta = den > 0.0 ? in.eps * in.d / den : kNaN;
  out.k_star = exact_k_star(in.eps, in.alpha);
  return out;
}

CertificateReport check_defective(const Graph& g, const DefectiveInput& in, const spectral::EigenOptions& eig) {
  const auto dv = derive_defective(g, in);
  const double n = static_cast<double>(g.order());
  CertificateReport r;

  r.add(at_least("no_isolated_vertices", static_cast<double>(g.min_degree()), 1.0));

  const double deviation = in.deviation ? *in.deviation : spectral::spectral_norm_deviation(g, in.d, eig);
  r.add(spectral_at_most("expander_deviation", deviation, in.alpha * in.d));

  r.add(at_least("core_min_degree", dv.core_min_degree, dv.ell));

  Condition delta_ok{"delta_defined", dv.d_max, 2.0 * in.eps * in.d, dv.d_max > 2.0 * in.eps * in.d,
                     "delta=" + num(dv.delta)};
  mark_marginal(delta_ok, kMarginalBand);
  r.add(std::move(delta_ok));

  if (std::isfinite(dv.delta)) {
    const double lp = std::log1p(dv.delta);
    const double floored = condition_for_k_star(dv.delta, dv.d_max, static_cast<double>(dv.k_star) * lp);
    const double displayed = condition_for_k_star(dv.delta, dv.d_max, in.eps / (40.0 * in.alpha) * lp);
    r.add(at_most("condition_for_k_star", floored, 1.0,
                  "k*=" + std::to_string(dv.k_star) + "; unfloored=" + num(displayed) +
                      (displayed <= 1.0 ? " (pass)" : " (fail)")));
  } else {
    r.add(Condition{"condition_for_k_star", kNaN, 1.0, false, "delta undefined"});
  }

  const double cd = condition_for_d(dv.d_max, in.eps, in.d);
  r.add(at_most("condition_for_d", cd, 1.0, std::isfinite(cd) ? std::string{} : "d_max <= 4 eps d"));

  r.add(at_most("b1_small", static_cast<double>(in.b.size()), in.alpha * n));
  r.add(at_most("b2_independent", static_cast<double>(pair_count(g, in.b, in.b) / 2), 0.0));
  r.add(at_most("b3_degree", max_degree_in(g, in.b), dv.d_max + 1.0));
  r.add(at_most("b4_one_b_neighbor", max_b_neighbors(g, in.b), 1.0));
  return r;
}

// ---------------------------------------------------------------------------

std::size_t ExpansionReport::total_trials() const {
  std::size_t t = 0;
  for (const auto& l : lemmas) t += l.trials;
  return t;
}

std::size_t ExpansionReport::total_violations() const {
  std::size_t t = 0;
  for (const auto& l : lemmas) t += l.violations;
  return t;
}

const InequalityTally* ExpansionReport::find(std::string_view name) const {
  for (const auto& l : lemmas) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

namespace {

struct SetCounts {
  double xx = 0.0;   // e(X, X)
  double xv = 0.0;   // e(X, V)
  double xyc = 0.0;  // e(X, Y^c)
};

SetCounts count_edges(const Graph& g, const std::vector<Vertex>& x, const std::vector<char>& in_x,
                      const std::vector<char>& in_y) {
  SetCounts c;
  for (Vertex v : x) {
    for (Vertex u : g.neighbors(v)) {
      c.xx += in_x[u];
      c.xyc += in_y[u] ? 0 : 1;
    }
    c.xv += static_cast<double>(g.degree(v));
  }
  return c;
}

class SetSampler {
 public:
  SetSampler(const Graph& g, std::uint64_t seed) : g_(g), rng_(seed), perm_(g.order()) {
    std::iota(perm_.begin(), perm_.end(), Vertex{0});
  }

  std::size_t size_in(std::size_t lo, std::size_t hi) { return lo + rng_.below(hi - lo + 1); }

  // Random k-subset, or a breadth-first ball of k vertices from a random root.
  std::vector<Vertex> subset(std::size_t k) {
    if (rng_.below(2) == 0) return uniform_subset(k);
    return ball(k);
  }

  // X plus `extra` further vertices: uniformly, or those with the most edges into X.
  std::vector<Vertex> extend(const std::vector<Vertex>& x, const std::vector<char>& in_x, std::size_t extra) {
    std::vector<Vertex> y = x;
    if (extra == 0) return y;
    std::vector<Vertex> outside;
    for (Vertex v = 0; v < g_.order(); ++v) {
      if (!in_x[v]) outside.push_back(v);
    }
    if (rng_.below(2) == 0) {
      partial_shuffle(outside, extra);
    } else {
      std::vector<std::uint32_t> into(g_.order(), 0);
      for (Vertex v : x) {
        for (Vertex u : g_.neighbors(v)) ++into[u];
      }
      partial_shuffle(outside, outside.size());
      std::stable_sort(outside.begin(), outside.end(), [&](Vertex a, Vertex b) { return into[a] > into[b]; });
    }
    y.insert(y.end(), outside.begin(), outside.begin() + static_cast<std::ptrdiff_t>(extra));
    return y;
  }

 private:
  void partial_shuffle(std::vector<Vertex>& v, std::size_t k) {
    for (std::size_t i = 0; i < k && i + 1 < v.size(); ++i) {
      std::swap(v[i], v[i + rng_.below(v.size() - i)]);
    }
  }

  std::vector<Vertex> uniform_subset(std::size_t k) {
    partial_shuffle(perm_, k);
    return {perm_.begin(), perm_.begin() + static_cast<std::ptrdiff_t>(k)};
  }

  std::vector<Vertex> ball(std::size_t k) {
    const std::size_t n = g_.order();
    std::vector<char> seen(n, 0);
    std::vector<Vertex> out;
    out.reserve(k);
    while (out.size() < k) {
      auto root = static_cast<Vertex>(rng_.below(n));
      while (seen[root]) root = static_cast<Vertex>((root + 1) % n);
      seen[root] = 1;
      out.push_back(root);
      for (std::size_t head = out.size() - 1; head < out.size() && out.size() < k; ++head) {
        for (Vertex u : g_.neighbors(out[head])) {
          if (out.size() == k) break;
          if (!seen[u]) {
            seen[u] = 1;
            out.push_back(u);
          }
        }
      }
    }
    return out;
  }

  const Graph& g_;
  Rng rng_;
  std::vector<Vertex> perm_;
};

std::vector<char> indicator(std::size_t n, const std::vector<Vertex>& s) {
  std::vector<char> out(n, 0);
  for (Vertex v : s) out[v] = 1;
  return out;
}

void record(InequalityTally& t, double lhs, double rhs, bool strict, std::size_t x_size, std::size_t y_size) {
  ++t.trials;
  const double scale = std::max(1.0, std::abs(rhs));
  t.min_slack = t.trials == 1 ? (rhs - lhs) / scale : std::min(t.min_slack, (rhs - lhs) / scale);
  const bool ok = strict ? lhs < rhs : lhs <= rhs + 1e-9 * scale;
  if (!ok) {
    ++t.violations;
    if (t.counterexample.empty()) {
      t.counterexample = "|X|=" + std::to_string(x_size) + " |Y|=" + std::to_string(y_size) + " lhs=" + num(lhs) +
                         " rhs=" + num(rhs);
    }
  }
}

// Largest integer not exceeding x, shaved so round-off never admits an
// inadmissible size.
std::size_t admissible_floor(double x) {
  if (!(x > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(x * (1.0 - 1e-12)));
}

}  // namespace

ExpansionReport verify_expansion_inequalities(const Graph& g, const ExpansionParams& p, std::uint64_t seed,
                                              std::size_t trials, const spectral::EigenOptions& eig) {
  if (!(p.d > 0.0 && p.alpha > 0.0)) throw InputError("verify_expansion_inequalities: d and alpha must be positive");
  const std::size_t n = g.order();
  if (n == 0) throw InputError("verify_expansion_inequalities: empty graph");
  const VertexSet b = p.b ? *p.b : VertexSet(n);
  if (b.universe() != n) throw InputError("verify_expansion_inequalities: B must be a subset of V(G)");
  const VertexSet w = b.complement();
  const double nd = static_cast<double>(n);

  const double deviation = spectral::spectral_norm_deviation(g, p.d, eig);
  const bool expander = deviation <= p.alpha * p.d * (1.0 + kSpectralGuard);

  ExpansionReport report;
  InequalityTally xx, xy, xv, xyc;
  xx.name = "xx_bound";
  xy.name = "xy_bound";
  xv.name = "xv_bound";
  xyc.name = "xyc_to_xx";

  // xx_bound
  if (expander) {
    xx.applicable = true;
  } else {
    xx.reason = "not an (n,d,alpha)-expander";
  }

  // xy_bound on G itself.
  const double g_dmax = static_cast<double>(g.max_degree());
  const bool eps_ok = p.eps > 0.0 && p.eps < 1.0;
  const double xy_delta = eps_ok && g_dmax > 2.0 * p.eps * p.d ? p.eps * p.d / (g_dmax - 2.0 * p.eps * p.d) : kNaN;
  if (!expander) {
    xy.reason = "not an (n,d,alpha)-expander";
  } else if (!eps_ok) {
    xy.reason = "eps outside (0, 1)";
  } else if (static_cast<double>(g.min_degree()) < 2.0 * (p.eps + p.alpha) * p.d) {
    xy.reason = "minimum degree below 2(eps+alpha)d";
  } else if (!std::isfinite(xy_delta)) {
    xy.reason = "delta undefined";
  } else if (n < 2) {
    xy.reason = "vacuous";
  } else {
    xy.applicable = true;
  }

  // xv_bound needs only the degree structure of B.
  const double core_dmax = static_cast<double>(degree_profile(g, w).max_degree);
  const bool b3 = max_degree_in(g, b) <= core_dmax + 1.0;
  const bool b4 = max_b_neighbors(g, b) <= 1.0;
  if (!b3) {
    xv.reason = "B3 fails";
  } else if (!b4) {
    xv.reason = "B4 fails";
  } else {
    xv.applicable = true;
  }

  // xyc_to_xx needs the full defective-expander hypotheses.
  double core_delta = kNaN;
  std::size_t xyc_cap = 0;
  try {
    DefectiveInput in{w, b, p.eps, p.alpha, p.d, deviation};
    const auto cert = check_defective(g, in, eig);
    const auto dv = derive_defective(g, in);
    core_delta = dv.delta;
    std::string failed;
    for (const auto& c : cert.conditions) {
      if (c.pass || c.name == "condition_for_k_star" || c.name == "condition_for_d") continue;
      failed = c.name;
      break;
    }
    xyc_cap = std::min(admissible_floor(p.alpha * nd), n / 2);
    if (!failed.empty()) {
      xyc.reason = failed + " fails";
    } else if (xyc_cap == 0) {
      xyc.reason = "vacuous";
    } else {
      xyc.applicable = true;
    }
  } catch (const InputError& e) {
    xyc.reason = e.what();
  }

  SetSampler sampler(g, seed);
  for (std::size_t t = 0; t < trials; ++t) {
    if (xx.applicable || xv.applicable) {
      const auto x = sampler.subset(sampler.size_in(0, n));
      const auto in_x = indicator(n, x);
      const auto c = count_edges(g, x, in_x, in_x);
      const double k = static_cast<double>(x.size());
      if (xx.applicable) record(xx, c.xx, p.d / nd * k * k + p.alpha * p.d * k, false, x.size(), x.size());
      if (xv.applicable) record(xv, c.xv, (core_dmax + 1.0) * k, false, x.size(), x.size());
    }
    auto sample_pair = [&](std::size_t cap, double delta, InequalityTally& tally, bool lemma_xy) {
      const std::size_t k = sampler.size_in(1, cap);
      const auto x = sampler.subset(k);
      const auto in_x = indicator(n, x);
      const std::size_t extra = sampler.size_in(0, std::min(admissible_floor(delta * static_cast<double>(k)),
                                                            n / 2 - k));
      const auto y = sampler.extend(x, in_x, extra);
      const auto c = count_edges(g, x, in_x, indicator(n, y));
      const double yc = nd - static_cast<double>(y.size());
      if (lemma_xy) {
        record(tally, p.eps * p.d / nd * static_cast<double>(k) * yc, c.xyc, false, k, y.size());
      } else {
        record(tally, p.eps / (20.0 * p.alpha) * c.xx, c.xyc, true, k, y.size());
      }
    };
    if (xy.applicable) sample_pair(n / 2, xy_delta, xy, true);
    if (xyc.applicable) sample_pair(xyc_cap, core_delta, xyc, false);
  }

  report.lemmas = {std::move(xx), std::move(xy), std::move(xv), std::move(xyc)};
  return report;
}

double kernel_function(double a, double b) noexcept {
  return std::sin(std::abs(a) - std::min(std::abs(b), kPi / 2.0));
}

KernelCheck pointwise_kernel_check(std::size_t trials, std::uint64_t seed) {
  static constexpr double kSpecial[] = {0.0, kPi / 2.0, -kPi / 2.0, kPi, kPi / 4.0, -3.0 * kPi / 4.0};
  Rng rng(seed);
  KernelCheck out;
  for (std::size_t t = 0; t < trials; ++t) {
    double a = rng.angle();
    double b = rng.angle();
    // Every eighth draw pins one coordinate to a boundary value.
    if (t % 8 == 7) a = kSpecial[rng.below(std::size(kSpecial))];
    if (t % 16 == 15) b = kSpecial[rng.below(std::size(kSpecial))];
    const double lhs = kernel_function(a, b) + kernel_function(b, a);
    const double rhs = (std::abs(a) >= kPi / 2.0 ? 1.0 : 0.0) + (std::abs(b) >= kPi / 2.0 ? 1.0 : 0.0);
    out.max_excess = std::max(out.max_excess, lhs - rhs);
    if (lhs > rhs + 1e-12) ++out.violations;
    ++out.trials;
  }
  return out;
}

StabilityChain stability_inequality_check(const Graph& g, const PhaseState& s, double beta, double gamma,
                                          const kuramoto::ClassifyOptions& tols) {
  if (!(gamma > 0.0 && gamma < beta && beta <= kPi / 2.0)) {
    throw InputError("stability_inequality_check: need 0 < gamma < beta <= pi/2");
  }
  if (s.size() != g.order()) throw InputError("stability_inequality_check: state size does not match the graph");
  if (!kuramoto::is_normalized(s)) throw InputError("stability_inequality_check: state is not rotation-normalized");
  const auto cls = kuramoto::classify(g, s, tols).classification;
  if (cls != kuramoto::Classification::nontrivial_stable && cls != kuramoto::Classification::fully_synchronized) {
    throw InputError("stability_inequality_check: state is not stable");
  }
  const auto cb = kuramoto::c_beta(s, beta);
  const auto ch = kuramoto::c_beta(s, kPi / 2.0);
  const auto cg = kuramoto::c_beta(s, gamma);
  StabilityChain out;
  out.inner = static_cast<double>(pair_count(g, cb, cb));
  out.half_pi = static_cast<double>(pair_count(g, ch, cb));
  out.outer = std::sin(beta - gamma) * static_cast<double>(pair_count(g, cb, cg.complement()));
  out.holds = out.inner >= out.half_pi - 1e-9 && out.half_pi >= out.outer - 1e-9;
  return out;
}

ContradictionCheck contradiction_bound_check(const PhaseState& s, double beta, double alpha, std::size_t n) {
  const double sb = std::sin(beta);
  ContradictionCheck out;
  out.lhs = static_cast<double>(kuramoto::c_beta(s, beta).size()) * sb * sb;
  out.rhs = 5.0 * alpha * alpha * static_cast<double>(n) / 2.0;
  out.pass = out.lhs <= out.rhs;
  return out;
}

AmplificationTrace amplification_trace(const AmplificationInput& in) {
  if (!(in.alpha > 0.0 && in.alpha < 0.2)) throw InputError("amplification_trace: alpha must lie in (0, 1/5)");
  if (!(in.eps > 0.0 && in.eps < 1.0)) throw InputError("amplification_trace: eps must lie in (0, 1)");
  if (!(in.d > 0.0)) throw InputError("amplification_trace: d must be positive");
  if (!(in.d_max > 2.0 * in.eps * in.d)) throw InputError("amplification_trace: delta undefined (d_max <= 2 eps d)");
  if (in.ratio_schedule) {
    for (double r : *in.ratio_schedule) {
      if (!(r > 0.0 && r <= 1.0)) throw InputError("amplification_trace: ratios must lie in (0, 1]");
    }
  }

  AmplificationTrace out;
  out.k_star = exact_k_star(in.eps, in.alpha);
  out.delta = in.eps * in.d / (in.d_max - 2.0 * in.eps * in.d);
  const double lp = std::log1p(out.delta);
  out.condition_k_star = condition_for_k_star(out.delta, in.d_max, static_cast<double>(out.k_star) * lp);
  out.condition_k_star_holds = out.condition_k_star <= 1.0;

  const double half = kPi / 2.0;
  out.phase1_step = out.k_star > 0 ? std::asin(20.0 * in.alpha / in.eps) : 0.0;
  out.betas_phase1.reserve(static_cast<std::size_t>(out.k_star) + 1);
  for (long long k = 0; k <= out.k_star; ++k) out.betas_phase1.push_back(half - static_cast<double>(k) * out.phase1_step);
  out.phase1_drop = static_cast<double>(out.k_star) * out.phase1_step;
  out.beta_star = half - out.phase1_drop;

  const double scale = (in.d_max + 1.0) / out.delta;
  double beta = out.beta_star;
  double drop = 0.0;
  auto step = [&](long long k, double ratio) {
    const double arg = scale * ratio;
    if (arg > 1.0) {
      out.defined = false;
      out.undefined_at = k + 1;
      return false;
    }
    const double s = std::asin(arg);
    drop += s;
    beta = out.beta_star - drop;
    out.betas_phase2.push_back(beta);
    return true;
  };

  if (in.ratio_schedule) {
    long long k = out.k_star;
    for (double r : *in.ratio_schedule) {
      if (!step(k++, r)) break;
    }
  } else {
    // Worst case r_k = (1+delta)^{-k}; with n known, stop at the first M with (1+delta)^M >= n/2.
    long long m_end = std::numeric_limits<long long>::max();
    if (in.n) {
      const double target = std::log(static_cast<double>(*in.n) / 2.0) / lp;
      m_end = std::max(out.k_star, static_cast<long long>(std::ceil(std::max(0.0, target))));
    }
    constexpr long long kCap = 50'000'000;
    for (long long k = out.k_star; k < m_end && k - out.k_star < kCap; ++k) {
      const double r = std::exp(-static_cast<double>(k) * lp);
      if (!step(k, r)) break;
      if (!in.n && std::asin(scale * r) <= 1e-17 * drop) break;
    }
  }

  out.phase2_drop = drop;
  out.beta_m = out.beta_star - drop;
  constexpr double kSlack = 1e-12;
  out.phase1_within_quarter_pi = out.phase1_drop <= kPi / 4.0 + kSlack;
  out.phase2_within_sixteenth_pi = out.defined && out.phase2_drop <= kPi / 16.0 + kSlack;
  out.beta_m_at_least_three_sixteenths_pi = out.defined && out.beta_m >= 3.0 * kPi / 16.0 - kSlack;
  return out;
}

}  // namespace synclab::certificates
