#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "synclab/graph.hpp"
#include "synclab/rng.hpp"
#include "synclab/spectral.hpp"

namespace synclab {

/// Maps any finite angle to (-pi, pi].
double wrap_angle(double x) noexcept;

/// One phase per vertex, every component in (-pi, pi].
class PhaseState {
 public:
  PhaseState() = default;
  /// Throws InputError if some component is outside (-pi, pi] or not finite.
  explicit PhaseState(std::vector<double> theta);

  /// Wraps every component instead of rejecting it.
  static PhaseState wrapped(std::vector<double> theta);
  static PhaseState constant(std::size_t n, double angle);
  /// Independent uniform phases on (-pi, pi].
  static PhaseState uniform(std::size_t n, Rng& rng);

  std::size_t size() const noexcept { return theta_.size(); }
  double operator[](std::size_t v) const noexcept { return theta_[v]; }
  const std::vector<double>& angles() const noexcept { return theta_; }

 private:
  std::vector<double> theta_;
};

/// Text form: one angle per line, 17 significant digits.
void write_phase_state(std::ostream& out, const PhaseState& s);
PhaseState read_phase_state(std::istream& in);

namespace kuramoto {

/// E(theta) = 1/2 sum_{u,v} A_uv (1 - cos(theta_u - theta_v)).
double energy(const Graph& g, const PhaseState& s);

/// Component v: sum over u in N(v) of sin(theta_v - theta_u).
std::vector<double> gradient(const Graph& g, const PhaseState& s);

double max_abs(const std::vector<double>& v) noexcept;

/// Hessian of the energy as a weighted Laplacian with edge weights
/// cos(theta_u - theta_v). The graph must outlive the operator.
spectral::SymmetricOperator hessian(const Graph& g, const PhaseState& s);

struct FlowOptions {
  double grad_tol = 1e-9;        // stop once ||grad E||_inf < grad_tol
  double max_time = 1e4;
  std::size_t sample_stride = 16;  // accepted steps between energy samples
  double initial_step = 0.01;
  double rel_tol = 1e-8;         // step-doubling local error target
};

struct EnergySample {
  double time;
  double energy;
};

struct FlowResult {
  PhaseState final_state;
  double final_energy = 0.0;
  double final_gradient_norm = 0.0;
  double final_time = 0.0;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
  bool converged = false;
  std::vector<EnergySample> energy_trace;
};

/// Integrates d theta/dt = -grad E with step-doubling RK4.
/// Throws NumericalError if the state becomes non-finite.
FlowResult flow(const Graph& g, const PhaseState& start, const FlowOptions& opts = {});

std::complex<double> order_parameter(const PhaseState& s);

PhaseState rotate(const PhaseState& s, double phi);

/// Rotates so that the order parameter is real and nonnegative. States with
/// |rho_1| < 1e-12 are returned unchanged.
PhaseState normalize_rotation(const PhaseState& s);

bool is_normalized(const PhaseState& s, double tol = 1e-9);

/// {v : |theta_v| >= beta}. Requires a normalized state and beta in (0, pi].
VertexSet c_beta(const PhaseState& s, double beta);

enum class Classification { fully_synchronized, nontrivial_stable, saddle_or_unstable, not_critical };

std::string_view to_string(Classification c) noexcept;

struct ClassifyOptions {
  double grad_tol = 1e-9;
  double eig_tol = 1e-8;
  double sync_tol = 1e-7;
};

struct StabilityReport {
  double gradient_norm = 0.0;  // infinity norm
  double lambda2 = 0.0;        // smallest Hessian eigenvalue on the complement of the constants
  Classification classification = Classification::not_critical;
  bool degenerate = false;     // stable but with |lambda2| <= eig_tol
};

/// Largest circular spread of the phases inside any connected component.
double max_component_spread(const Graph& g, const PhaseState& s);

StabilityReport classify(const Graph& g, const PhaseState& s, const ClassifyOptions& opts = {});

/// theta_j = wrap(2 pi q j / n). Requires n >= 3.
PhaseState twisted_state(std::size_t n, long long q);

/// Whether C_{pi/2}(s) is nonempty. Preconditions: g connected, s normalized
/// and classified nontrivial_stable; violations throw InputError.
bool half_circle_check(const Graph& g, const PhaseState& s, const ClassifyOptions& opts = {});

}  // namespace kuramoto
}  // namespace synclab
