#include "synclab/kuramoto.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <memory>
#include <numbers>
#include <ostream>
#include <string>

#include "synclab/errors.hpp"
#include "synclab/kernels.hpp"

namespace synclab {

namespace {

constexpr double kPi = std::numbers::pi;

kernels::Csr csr_of(const Graph& g) { return {g.offsets().data(), g.adjacency().data(), g.order()}; }

void require_matching(const Graph& g, const PhaseState& s) {
  if (s.size() != g.order()) {
    throw InputError("state length " + std::to_string(s.size()) + " does not match graph order " +
                     std::to_string(g.order()));
  }
}

}  // namespace

double wrap_angle(double x) noexcept {
  double r = std::remainder(x, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

PhaseState::PhaseState(std::vector<double> theta) : theta_(std::move(theta)) {
  for (std::size_t v = 0; v < theta_.size(); ++v) {
    const double x = theta_[v];
    if (!std::isfinite(x) || x <= -kPi || x > kPi) {
      throw InputError("phase " + std::to_string(v) + " outside (-pi, pi]");
    }
  }
}

PhaseState PhaseState::wrapped(std::vector<double> theta) {
  for (auto& x : theta) {
    if (!std::isfinite(x)) throw InputError("non-finite phase");
    x = wrap_angle(x);
  }
  return PhaseState(std::move(theta));
}

PhaseState PhaseState::constant(std::size_t n, double angle) {
  return wrapped(std::vector<double>(n, angle));
}

PhaseState PhaseState::uniform(std::size_t n, Rng& rng) {
  std::vector<double> theta(n);
  for (auto& x : theta) x = rng.angle();
  return PhaseState(std::move(theta));
}

void write_phase_state(std::ostream& out, const PhaseState& s) {
  char buf[64];
  for (double x : s.angles()) {
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    out.write(buf, res.ptr - buf);
    out.put('\n');
  }
}

PhaseState read_phase_state(std::istream& in) {
  std::vector<double> theta;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    double x = 0.0;
    auto res = std::from_chars(line.data() + first, line.data() + last + 1, x);
    if (res.ec != std::errc{} || res.ptr != line.data() + last + 1) {
      throw InputError("phase file line " + std::to_string(lineno) + ": expected one number");
    }
    theta.push_back(x);
  }
  return PhaseState::wrapped(std::move(theta));
}

namespace kuramoto {

namespace {

void fill_phasors(std::span<const double> theta, std::vector<double>& c, std::vector<double>& s) {
  c.resize(theta.size());
  s.resize(theta.size());
  for (std::size_t v = 0; v < theta.size(); ++v) {
    c[v] = std::cos(theta[v]);
    s[v] = std::sin(theta[v]);
  }
}

double energy_of(const Graph& g, std::span<const double> theta, std::vector<double>& c,
                 std::vector<double>& s) {
  fill_phasors(theta, c, s);
  // 1 - cos(a - b) = |e^{ia} - e^{ib}|^2 / 2, summed over ordered pairs then halved.
  return 0.25 * kernels::active_kernels().phasor_pair_distance(csr_of(g), c.data(), s.data());
}

}  // namespace

double energy(const Graph& g, const PhaseState& s) {
  require_matching(g, s);
  std::vector<double> c;
  std::vector<double> sn;
  return energy_of(g, s.angles(), c, sn);
}

std::vector<double> gradient(const Graph& g, const PhaseState& s) {
  require_matching(g, s);
  std::vector<double> c;
  std::vector<double> sn;
  fill_phasors(s.angles(), c, sn);
  std::vector<double> out(g.order());
  kernels::active_kernels().phasor_gradient(csr_of(g), c.data(), sn.data(), out.data());
  return out;
}

double max_abs(const std::vector<double>& v) noexcept {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

spectral::SymmetricOperator hessian(const Graph& g, const PhaseState& s) {
  require_matching(g, s);
  auto weights = std::make_shared<std::vector<double>>(g.adjacency().size());
  for (Vertex v = 0; v < g.order(); ++v) {
    const auto off = g.offsets()[v];
    const auto nb = g.neighbors(v);
    for (std::size_t k = 0; k < nb.size(); ++k) (*weights)[off + k] = std::cos(s[v] - s[nb[k]]);
  }
  return spectral::SymmetricOperator(g.order(), [&g, weights](std::span<const double> x, std::span<double> out) {
    kernels::active_kernels().weighted_laplacian_apply(csr_of(g), weights->data(), x.data(), out.data());
  });
}

// ---------------------------------------------------------------------------
// Gradient flow

namespace {

class FlowIntegrator {
 public:
  explicit FlowIntegrator(const Graph& g) : g_(g), n_(g.order()) {
    for (auto* v : {&c_, &s_, &k2_, &k3_, &k4_, &stage_, &full_, &half_, &kmid_}) v->resize(n_);
  }

  // out = -grad E(x)
  void velocity(std::span<const double> x, std::vector<double>& out) {
    fill_phasors(x, c_, s_);
    kernels::active_kernels().phasor_gradient(csr_of(g_), c_.data(), s_.data(), out.data());
    for (auto& y : out) y = -y;
  }

  // Classical RK4 from y with precomputed k1 = f(y).
  void rk4(const std::vector<double>& y, const std::vector<double>& k1, double h, std::vector<double>& out) {
    for (std::size_t i = 0; i < n_; ++i) stage_[i] = y[i] + 0.5 * h * k1[i];
    velocity(stage_, k2_);
    for (std::size_t i = 0; i < n_; ++i) stage_[i] = y[i] + 0.5 * h * k2_[i];
    velocity(stage_, k3_);
    for (std::size_t i = 0; i < n_; ++i) stage_[i] = y[i] + h * k3_[i];
    velocity(stage_, k4_);
    for (std::size_t i = 0; i < n_; ++i) {
      out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
  }

  double energy(std::span<const double> x) { return energy_of(g_, x, c_, s_); }

  std::vector<double>& full() { return full_; }
  std::vector<double>& half() { return half_; }
  std::vector<double>& kmid() { return kmid_; }

 private:
  const Graph& g_;
  std::size_t n_;
  std::vector<double> c_, s_, k2_, k3_, k4_, stage_, full_, half_, kmid_;
};

}  // namespace

FlowResult flow(const Graph& g, const PhaseState& start, const FlowOptions& opts) {
  require_matching(g, start);
  if (!(opts.grad_tol > 0.0)) throw InputError("flow: grad_tol must be positive");
  if (!(opts.max_time > 0.0)) throw InputError("flow: max_time must be positive");
  if (!(opts.rel_tol > 0.0) || !(opts.initial_step > 0.0)) throw InputError("flow: tolerances must be positive");
  const std::size_t n = g.order();
  const std::size_t stride = std::max<std::size_t>(opts.sample_stride, 1);

  FlowIntegrator integ(g);
  std::vector<double> y = start.angles();
  std::vector<double> k1(n);
  std::vector<double> two_half(n);

  // |Hessian| <= 2 max degree and RK4 is stable on the real axis up to about
  // 2.78, so steps stay below the stability limit near minima.
  const double h_max = 1.25 / std::max<double>(1.0, static_cast<double>(g.max_degree()));
  const double h_min = 1e-12;
  double h = std::min(opts.initial_step, h_max);
  double t = 0.0;

  FlowResult result;
  integ.velocity(y, k1);
  double gnorm = max_abs(k1);
  result.energy_trace.push_back({0.0, integ.energy(y)});

  while (true) {
    if (gnorm < opts.grad_tol) {
      result.converged = true;
      break;
    }
    if (t >= opts.max_time) break;
    h = std::min(h, opts.max_time - t);

    integ.rk4(y, k1, h, integ.full());
    integ.rk4(y, k1, 0.5 * h, integ.half());
    integ.velocity(integ.half(), integ.kmid());
    integ.rk4(integ.half(), integ.kmid(), 0.5 * h, two_half);

    double err = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      err = std::max(err, std::abs(two_half[i] - integ.full()[i]));
      scale = std::max(scale, std::abs(y[i]));
    }
    err /= 15.0;
    const double tol = opts.rel_tol * scale;
    if (!std::isfinite(err)) throw NumericalError("flow: non-finite state", t, err);

    if (err <= tol || h <= h_min) {
      for (std::size_t i = 0; i < n; ++i) y[i] = wrap_angle(two_half[i]);
      t += h;
      ++result.steps;
      integ.velocity(y, k1);
      gnorm = max_abs(k1);
      if (!std::isfinite(gnorm)) throw NumericalError("flow: non-finite gradient", t, gnorm);
      if (result.steps % stride == 0) result.energy_trace.push_back({t, integ.energy(y)});
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 5.0);
      h = std::min(h * factor, h_max);
    } else {
      ++result.rejected_steps;
      h = std::max(h * std::max(0.2, 0.9 * std::pow(tol / err, 0.2)), h_min);
    }
  }

  result.final_state = PhaseState(y);
  result.final_energy = integ.energy(y);
  result.final_gradient_norm = gnorm;
  result.final_time = t;
  if (result.energy_trace.back().time != t) result.energy_trace.push_back({t, result.final_energy});
  return result;
}

// ---------------------------------------------------------------------------
// Rotation, C_beta, classification

std::complex<double> order_parameter(const PhaseState& s) {
  if (s.size() == 0) throw InputError("order parameter of an empty state");
  double re = 0.0;
  double im = 0.0;
  for (double x : s.angles()) {
    re += std::cos(x);
    im += std::sin(x);
  }
  const double n = static_cast<double>(s.size());
  return {re / n, im / n};
}

PhaseState rotate(const PhaseState& s, double phi) {
  std::vector<double> theta = s.angles();
  for (auto& x : theta) x += phi;
  return PhaseState::wrapped(std::move(theta));
}

PhaseState normalize_rotation(const PhaseState& s) {
  const auto rho = order_parameter(s);
  if (std::abs(rho) < 1e-12) return s;
  return rotate(s, -std::arg(rho));
}

bool is_normalized(const PhaseState& s, double tol) {
  const auto rho = order_parameter(s);
  if (std::abs(rho) < 1e-12) return true;
  return std::abs(rho.imag()) <= tol && rho.real() >= -tol;
}

VertexSet c_beta(const PhaseState& s, double beta) {
  if (!(beta > 0.0 && beta <= kPi)) throw InputError("c_beta: beta must lie in (0, pi]");
  if (!is_normalized(s)) throw InputError("c_beta: state is not rotation-normalized");
  VertexSet out(s.size());
  for (std::size_t v = 0; v < s.size(); ++v) {
    if (std::abs(s[v]) >= beta) out.insert(static_cast<Vertex>(v));
  }
  return out;
}

std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::fully_synchronized: return "fully_synchronized";
    case Classification::nontrivial_stable: return "nontrivial_stable";
    case Classification::saddle_or_unstable: return "saddle_or_unstable";
    case Classification::not_critical: return "not_critical";
  }
  return "unknown";
}

double max_component_spread(const Graph& g, const PhaseState& s) {
  require_matching(g, s);
  const auto label = connected_components(g);
  std::vector<double> ref;
  std::vector<double> lo;
  std::vector<double> hi;
  for (std::size_t v = 0; v < s.size(); ++v) {
    const auto c = label[v];
    if (c == ref.size()) {
      ref.push_back(s[v]);
      lo.push_back(0.0);
      hi.push_back(0.0);
    }
    const double d = wrap_angle(s[v] - ref[c]);
    lo[c] = std::min(lo[c], d);
    hi[c] = std::max(hi[c], d);
  }
  double spread = 0.0;
  for (std::size_t c = 0; c < ref.size(); ++c) spread = std::max(spread, hi[c] - lo[c]);
  return spread;
}

namespace {

// Smallest Hessian eigenvalue on the orthogonal complement of the constants:
// the operator P H P + c Q pushes the constant direction to the top.
double restricted_lambda_min(const Graph& g, const PhaseState& s) {
  const std::size_t n = g.order();
  if (n <= 1) return 0.0;
  auto h = hessian(g, s);
  const double lift = 2.0 * static_cast<double>(g.max_degree()) + 1.0;
  spectral::SymmetricOperator deflated(n, [h, n, lift](std::span<const double> x, std::span<double> out) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> centered(x.begin(), x.end());
    for (auto& v : centered) v -= mean;
    h.apply(centered, out);
    double out_mean = 0.0;
    for (double v : out) out_mean += v;
    out_mean /= static_cast<double>(n);
    for (auto& v : out) v += lift * mean - out_mean;
  });
  return spectral::extreme_eigenvalues(deflated).min;
}

}  // namespace

StabilityReport classify(const Graph& g, const PhaseState& s, const ClassifyOptions& opts) {
  require_matching(g, s);
  StabilityReport report;
  report.gradient_norm = max_abs(gradient(g, s));
  report.lambda2 = restricted_lambda_min(g, s);
  if (max_component_spread(g, s) < opts.sync_tol) {
    report.classification = Classification::fully_synchronized;
  } else if (report.gradient_norm > opts.grad_tol) {
    report.classification = Classification::not_critical;
  } else if (report.lambda2 < -opts.eig_tol) {
    report.classification = Classification::saddle_or_unstable;
  } else {
    report.classification = Classification::nontrivial_stable;
    report.degenerate = report.lambda2 <= opts.eig_tol;
  }
  return report;
}

PhaseState twisted_state(std::size_t n, long long q) {
  if (n < 3) throw InputError("twisted_state needs n >= 3");
  std::vector<double> theta(n);
  for (std::size_t j = 0; j < n; ++j) {
    // reduce q*j mod n first so the angle is exact for large q*j
    const long long r = ((q % static_cast<long long>(n)) * static_cast<long long>(j)) % static_cast<long long>(n);
    theta[j] = wrap_angle(2.0 * kPi * static_cast<double>(r) / static_cast<double>(n));
  }
  return PhaseState(std::move(theta));
}

bool half_circle_check(const Graph& g, const PhaseState& s, const ClassifyOptions& opts) {
  require_matching(g, s);
  if (!is_connected(g)) throw InputError("half_circle_check: graph is not connected");
  if (!is_normalized(s)) throw InputError("half_circle_check: state is not rotation-normalized");
  if (classify(g, s, opts).classification != Classification::nontrivial_stable) {
    throw InputError("half_circle_check: state is not a nontrivial stable state");
  }
  return !c_beta(s, kPi / 2.0).empty();
}

}  // namespace kuramoto
}  // namespace synclab
