#pragma once

// Decidable checks of the expander hypotheses that imply global
// synchronization, plus auditors that test the supporting combinatorial and
// trigonometric inequalities on concrete graphs and states.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "synclab/graph.hpp"
#include "synclab/kuramoto.hpp"
#include "synclab/spectral.hpp"

namespace synclab::certificates {

struct Condition {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  std::string detail;
};

struct CertificateReport {
  bool overall = true;
  std::vector<Condition> conditions;

  void add(Condition c);
  const Condition* find(std::string_view name) const;
};

/// {"overall": bool, "conditions": [{"name", "lhs", "rhs", "pass", "detail"}]}.
/// Non-finite numbers are written as null.
std::string to_json(const CertificateReport& r, int indent = 2);

struct ExpanderParams {
  std::size_t n = 0;
  double d = 0.0;
  double alpha = 0.0;
  std::optional<double> c_minus;
  std::optional<double> c_plus;
};

/// Relative guard band applied to spectral comparisons.
inline constexpr double kSpectralGuard = 1e-8;
/// Relative band within which a comparison is reported as marginal.
inline constexpr double kMarginalBand = 1e-9;

/// ||A - (d/n) J|| <= alpha d.
CertificateReport check_expander(const Graph& g, double d, double alpha,
                                 const spectral::EigenOptions& eig = {});

/// The expander check plus c- d I <= D - A - d I + (d/n) J <= c+ d I, and the
/// implied minimum degree (1 + c-) d.
CertificateReport check_expander_full(const Graph& g, const ExpanderParams& p,
                                      const spectral::EigenOptions& eig = {});

/// Parameter inequality of the (n, d, alpha, c-, c+) synchronization theorem.
CertificateReport check_thm_tech(const ExpanderParams& p);

struct DefectiveInput {
  VertexSet w;
  VertexSet b;
  double eps = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  /// Overrides the computed ||A - (d/n) J|| (used for perturbation studies).
  std::optional<double> deviation;
};

struct DefectiveDerived {
  double d_max = 0.0;         // max degree of G[W]
  double core_min_degree = 0.0;
  double ell = 0.0;           // 2 (eps + alpha) d
  double delta = 0.0;         // eps d / (d_max - 2 eps d); NaN when undefined
  long long k_star = 0;       // floor(eps / (40 alpha))
};

DefectiveDerived derive_defective(const Graph& g, const DefectiveInput& in);

/// Left-hand side of the k* condition, 8 (1+delta)(d_max+1) / (delta^2 (1+delta)^k).
double condition_for_k_star(double delta, double d_max, double exponent);

/// 8 / (d_max - 4 eps d); +inf when the denominator is not positive.
double condition_for_d(double d_max, double eps, double d);

/// Every hypothesis of the defective-expander synchronization theorem.
/// Throws InputError if W, B is not a partition of V or the parameters are
/// outside eps in (0,1), alpha in (0, 1/5), alpha d >= 1.
CertificateReport check_defective(const Graph& g, const DefectiveInput& in,
                                  const spectral::EigenOptions& eig = {});

// ---------------------------------------------------------------------------
// Inequality auditors

struct ExpansionParams {
  double d = 0.0;
  double alpha = 0.0;
  double eps = 0.0;
  std::optional<VertexSet> b;  // defect set; empty when absent
};

struct InequalityTally {
  std::string name;
  bool applicable = false;
  std::string reason;            // why the hypotheses fail, when not applicable
  std::size_t trials = 0;
  std::size_t violations = 0;
  double min_slack = 0.0;        // min over trials of (rhs - lhs) / max(1, |rhs|)
  std::string counterexample;
};

struct ExpansionReport {
  std::vector<InequalityTally> lemmas;
  std::size_t total_trials() const;
  std::size_t total_violations() const;
  const InequalityTally* find(std::string_view name) const;
};

/// Samples admissible vertex sets and checks, whenever the hypotheses are
/// certified on `g`:
///   xx_bound      e(X,X) <= (d/n)|X|^2 + alpha d |X|
///   xy_bound      eps d/n |X||Y^c| <= e(X,Y^c)   (X in Y, |Y| <= n/2, |Y| <= (1+delta)|X|)
///   xv_bound      e(X,V) <= (d_max + 1)|X|
///   xyc_to_xx     e(X,Y^c) > eps/(20 alpha) e(X,X)   (additionally |X| <= alpha n)
/// `trials` samples are drawn per inequality.
ExpansionReport verify_expansion_inequalities(const Graph& g, const ExpansionParams& p, std::uint64_t seed,
                                              std::size_t trials, const spectral::EigenOptions& eig = {});

/// K(a, b) = sin(|a| - min(|b|, pi/2)).
double kernel_function(double a, double b) noexcept;

struct KernelCheck {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double max_excess = -1.0;  // max of K(a,b) + K(b,a) - indicator sum
};

/// K(a,b) + K(b,a) <= 1{|a| >= pi/2} + 1{|b| >= pi/2}, with 1e-12 slack.
KernelCheck pointwise_kernel_check(std::size_t trials, std::uint64_t seed);

struct StabilityChain {
  double inner = 0.0;      // e(C_beta, C_beta)
  double half_pi = 0.0;    // e(C_{pi/2}, C_beta)
  double outer = 0.0;      // sin(beta - gamma) e(C_beta, C_gamma^c)
  bool holds = false;
};

/// e(C_b, C_b) >= e(C_{pi/2}, C_b) >= sin(b - g) e(C_b, C_g^c) with 1e-9 slack.
/// Requires 0 < gamma < beta <= pi/2 and a normalized stable state.
StabilityChain stability_inequality_check(const Graph& g, const PhaseState& s, double beta, double gamma,
                                          const kuramoto::ClassifyOptions& tols = {});

struct ContradictionCheck {
  double lhs = 0.0;  // |C_beta| sin^2 beta
  double rhs = 0.0;  // 5 alpha^2 n / 2
  bool pass = false;
};

ContradictionCheck contradiction_bound_check(const PhaseState& s, double beta, double alpha, std::size_t n);

struct AmplificationInput {
  double eps = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double d_max = 0.0;
  /// Measured |C_{pi/2}| / |C_{beta_k}| for k = k*, k*+1, ...; the worst case
  /// (1+delta)^{-k} is used when absent.
  std::optional<std::vector<double>> ratio_schedule;
  /// Graph order; ends the worst-case schedule once (1+delta)^k >= n/2.
  std::optional<std::size_t> n;
};

struct AmplificationTrace {
  long long k_star = 0;
  double delta = 0.0;
  double phase1_step = 0.0;            // asin(20 alpha / eps), 0 when k* = 0
  std::vector<double> betas_phase1;    // beta_0 .. beta_{k*}
  double beta_star = 0.0;
  std::vector<double> betas_phase2;    // beta_{k*+1} .. beta_M
  double beta_m = 0.0;
  double phase1_drop = 0.0;            // pi/2 - beta*
  double phase2_drop = 0.0;            // beta* - beta_M
  double condition_k_star = 0.0;       // floored exponent
  bool condition_k_star_holds = false;
  bool defined = true;
  long long undefined_at = -1;         // first k whose arcsin argument exceeds 1
  bool phase1_within_quarter_pi = false;
  bool phase2_within_sixteenth_pi = false;  // meaningful when the k* condition holds
  bool beta_m_at_least_three_sixteenths_pi = false;
};

/// Reproduces the two-phase angle sequence of the amplification argument.
/// Throws InputError unless alpha in (0, 1/5), eps in (0, 1), d_max > 2 eps d.
AmplificationTrace amplification_trace(const AmplificationInput& in);

}  // namespace synclab::certificates
