#include "synclab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <set>

#include "json.hpp"
#include "synclab/errors.hpp"
#include "synclab/process.hpp"
#include "synclab/rng.hpp"
#include "synclab/spectral.hpp"

namespace synclab::experiment {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::uint64_t ceil_u64(double x) { return static_cast<std::uint64_t>(std::ceil(x)); }

}  // namespace

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double alpha_rule(std::size_t n) {
  if (n < 2) throw InputError("alpha_rule needs n >= 2");
  return 20.0 / std::sqrt(std::log(static_cast<double>(n)));
}

std::uint64_t start_seed(std::uint64_t experiment_seed, std::size_t n, std::uint64_t trace_seed, std::uint64_t m,
                         std::uint64_t start) noexcept {
  return hash_seed({experiment_seed, static_cast<std::uint64_t>(n), trace_seed, m, start});
}

void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.n << ',';
    if (r.seed) out << *r.seed;
    out << ',' << r.m << ',';
    if (r.tau) out << *r.tau;
    out << ',' << r.start << ',' << (r.converged ? 1 : 0) << ',' << fmt_double(r.final_energy) << ','
        << fmt_double(r.final_grad_norm) << ',' << r.classification << ',';
    if (r.wall_ms == 0.0) {
      out << '0';
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
      out << buf;
    }
    out << '\n';
  }
}

const char* to_string(MPoint p) noexcept {
  switch (p) {
    case MPoint::tau: return "tau";
    case MPoint::tau_plus: return "tau_plus";
    case MPoint::cap: return "cap";
  }
  return "?";
}

MPoint parse_m_point(const std::string& s) {
  if (s == "tau") return MPoint::tau;
  if (s == "tau_plus" || s == "tau+") return MPoint::tau_plus;
  if (s == "cap") return MPoint::cap;
  throw InputError("unknown m-grid point '" + s + "' (expected tau, tau_plus or cap)");
}

std::uint64_t m_value(MPoint p, std::size_t n, std::uint64_t tau) {
  const std::uint64_t pairs = process::num_pairs(n);
  std::uint64_t m = tau;
  const double dn = static_cast<double>(n);
  if (p == MPoint::tau_plus) m = tau + ceil_u64(dn / 10.0);
  if (p == MPoint::cap) m = ceil_u64(5.0 * dn * std::log(dn) / 2.0);
  return std::clamp(m, tau, pairs);
}

void ExperimentConfig::validate() const {
  if (starts == 0) throw InputError("starts per graph must be positive");
  for (std::size_t n : n_list) {
    if (n < 2) throw InputError("every n must be at least 2");
  }
  if (std::set<std::size_t>(n_list.begin(), n_list.end()).size() != n_list.size()) {
    throw InputError("n list has duplicates");
  }
  if (std::set<std::uint64_t>(seed_list.begin(), seed_list.end()).size() != seed_list.size()) {
    throw InputError("seed list has duplicates");
  }
  if (!(flow.grad_tol > 0) || !(flow.max_time > 0) || !(flow.rel_tol > 0) || !(flow.initial_step > 0)) {
    throw InputError("integrator tolerances must be positive");
  }
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps must lie in (0, 1)");
  if (alpha && !(*alpha > 0.0)) throw InputError("alpha must be positive");
  if (m_grid.empty() && !trees) throw InputError("m grid is empty");
  if (threads == 0) throw InputError("threads must be positive");
}

namespace {

struct Cell {
  std::size_t graph;  // index into graphs
  std::string point;
  std::uint64_t m;
  Graph g;
};

std::string row_class(const Graph& g, const kuramoto::FlowResult& r) {
  if (r.final_energy < kSyncEnergy) return "fully_synchronized";
  return std::string(kuramoto::to_string(kuramoto::classify(g, r.final_state).classification));
}

}  // namespace

ExperimentResult run_hitting_sync(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult out;
  for (std::size_t n : cfg.n_list) {
    for (std::uint64_t seed : cfg.seed_list) out.graphs.push_back({n, seed, 0, 0.0, std::nullopt});
  }
  const std::size_t points = cfg.trees ? 1 : cfg.m_grid.size();
  std::vector<Cell> cells(out.graphs.size() * points);

  parallel_for(out.graphs.size(), cfg.threads, [&](std::size_t gi) {
    auto& info = out.graphs[gi];
    if (cfg.trees) {
      info.tau = info.n - 1;
      cells[gi] = {gi, "tree", info.n - 1, generators::random_tree(info.n, info.seed)};
      return;
    }
    const auto trace = process::ProcessTrace::sample(info.n, info.seed);
    const auto h = process::hitting_times(trace);
    info.tau = h.tau_edges;
    info.lambda_hit = h.lambda_hit;
    if (info.n >= 3) {
      try {
        info.b_size = process::partition_bw(trace, cfg.eps).b.size();
      } catch (const InputError&) {
        // window undefined at this n
      }
    }
    for (std::size_t k = 0; k < points; ++k) {
      const std::uint64_t m = m_value(cfg.m_grid[k], info.n, info.tau);
      cells[gi * points + k] = {gi, to_string(cfg.m_grid[k]), m, trace.graph_at_m(m)};
    }
  });

  out.records.resize(cells.size() * cfg.starts);
  parallel_for(out.records.size(), cfg.threads, [&](std::size_t i) {
    const Cell& c = cells[i / cfg.starts];
    const auto& info = out.graphs[c.graph];
    const std::size_t start = i % cfg.starts;
    ExperimentRecord& r = out.records[i];
    r.n = info.n;
    r.seed = info.seed;
    r.m = c.m;
    r.tau = info.tau;
    r.start = start;
    r.point = c.point;
    const auto t0 = Clock::now();
    Rng rng(start_seed(cfg.experiment_seed, info.n, info.seed, c.m, start));
    try {
      const auto res = kuramoto::flow(c.g, PhaseState::uniform(info.n, rng), cfg.flow);
      r.converged = res.converged;
      r.final_energy = res.final_energy;
      r.final_grad_norm = res.final_gradient_norm;
      r.classification = row_class(c.g, res);
    } catch (const NumericalError&) {
      r.converged = false;
      r.final_energy = std::nan("");
      r.final_grad_norm = std::nan("");
      r.classification = "numerical_error";
    }
    if (cfg.record_timing) r.wall_ms = elapsed_ms(t0);
  });
  out.cells = summarize(cfg, out.records);
  return out;
}

std::vector<SyncCell> summarize(const ExperimentConfig& cfg, const std::vector<ExperimentRecord>& rows) {
  std::vector<std::string> labels;
  if (cfg.trees) {
    labels.push_back("tree");
  } else {
    for (auto p : cfg.m_grid) labels.push_back(to_string(p));
  }
  std::vector<SyncCell> cells;
  for (std::size_t n : cfg.n_list) {
    for (const auto& label : labels) {
      SyncCell c;
      c.n = n;
      c.point = label;
      for (const auto& r : rows) {
        if (r.n != n || r.point != label) continue;
        ++c.runs;
        if (r.final_energy < kSyncEnergy) ++c.synced;
        if (r.classification == "numerical_error") ++c.failed;
      }
      c.fraction = c.runs == 0 ? 0.0 : static_cast<double>(c.synced) / static_cast<double>(c.runs);
      c.wilson = wilson_interval(c.synced, c.runs);
      cells.push_back(c);
    }
  }
  return cells;
}

std::string summary_json(const ExperimentConfig& cfg, const ExperimentResult& r) {
  json j;
  json c;
  c["n"] = cfg.n_list;
  c["seeds"] = cfg.seed_list;
  c["starts"] = cfg.starts;
  c["experiment_seed"] = cfg.experiment_seed;
  c["eps"] = cfg.eps;
  c["alpha_rule"] = cfg.alpha ? "fixed" : "20/sqrt(log n)";
  std::vector<std::string> grid;
  for (auto p : cfg.m_grid) grid.push_back(to_string(p));
  c["m_grid"] = cfg.trees ? std::vector<std::string>{"tree"} : grid;
  c["trees"] = cfg.trees;
  c["grad_tol"] = cfg.flow.grad_tol;
  c["rel_tol"] = cfg.flow.rel_tol;
  c["max_time"] = cfg.flow.max_time;
  c["sync_energy"] = kSyncEnergy;
  c["wilson_z"] = kWilsonZ;
  j["config"] = c;
  j["rows"] = r.records.size();
  json cells = json::array();
  for (const auto& s : r.cells) {
    json e;
    e["n"] = s.n;
    e["point"] = s.point;
    e["alpha"] = cfg.alpha ? *cfg.alpha : alpha_rule(s.n);
    e["runs"] = s.runs;
    e["synced"] = s.synced;
    e["numerical_errors"] = s.failed;
    e["sync_fraction"] = s.runs == 0 ? json(nullptr) : json(s.fraction);
    e["wilson95"] = {s.wilson.lo, s.wilson.hi};
    cells.push_back(e);
  }
  j["cells"] = cells;
  json graphs = json::array();
  for (const auto& g : r.graphs) {
    json e;
    e["n"] = g.n;
    e["seed"] = g.seed;
    e["tau"] = g.tau;
    e["lambda_hit"] = g.lambda_hit;
    e["b_size"] = g.b_size ? json(*g.b_size) : json(nullptr);
    graphs.push_back(e);
  }
  j["graphs"] = graphs;
  return j.dump(2) + "\n";
}

std::vector<PhaseState> random_starts(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::vector<PhaseState> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(hash_seed({seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i)}));
    out.push_back(PhaseState::uniform(n, rng));
  }
  return out;
}

std::vector<ExperimentRecord> simulate(const Graph& g, const std::vector<PhaseState>& starts,
                                       std::optional<std::uint64_t> seed, const SimulateOptions& opts) {
  for (const auto& s : starts) {
    if (s.size() != g.order()) throw InputError("state length does not match the graph order");
  }
  std::vector<ExperimentRecord> rows(starts.size());
  parallel_for(starts.size(), opts.threads, [&](std::size_t i) {
    const auto t0 = Clock::now();
    const auto res = kuramoto::flow(g, starts[i], opts.flow);
    auto& r = rows[i];
    r.n = g.order();
    r.seed = seed;
    r.m = g.num_edges();
    r.start = i;
    r.converged = res.converged;
    r.final_energy = res.final_energy;
    r.final_grad_norm = res.final_gradient_norm;
    r.classification = kuramoto::to_string(kuramoto::classify(g, res.final_state).classification);
    if (opts.record_timing) r.wall_ms = elapsed_ms(t0);
  });
  return rows;
}

bool same_up_to_rotation(const PhaseState& a, const PhaseState& b, double tol) {
  if (a.size() != b.size()) return false;
  if (a.size() == 0) return true;
  const double shift = a[0] - b[0];
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (std::abs(wrap_angle(a[v] - b[v] - shift)) > tol) return false;
  }
  return true;
}

StableSearchResult stable_search(const Graph& g, const StableSearchOptions& opts) {
  if (opts.beta_points == 0) throw InputError("beta grid must have at least one point");
  if (!(opts.dedupe_tol > 0.0)) throw InputError("dedupe tolerance must be positive");
  const std::size_t n = g.order();
  auto starts = random_starts(n, opts.starts, opts.seed);
  for (const auto& s : opts.extra_starts) {
    if (s.size() != n) throw InputError("start state length does not match the graph order");
    starts.push_back(s);
  }

  StableSearchResult out;
  out.runs = starts.size();
  out.d = n == 0 ? 0.0 : 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(n);
  if (opts.alpha) {
    out.alpha = *opts.alpha;
  } else if (out.d > 0.0) {
    out.alpha = spectral::spectral_norm_deviation(g, out.d) / out.d;
  }

  struct Found {
    bool converged = false;
    PhaseState state;
    kuramoto::StabilityReport report;
    double energy = 0.0;
  };
  std::vector<Found> found(starts.size());
  parallel_for(starts.size(), opts.threads, [&](std::size_t i) {
    const auto res = kuramoto::flow(g, starts[i], opts.flow);
    auto& f = found[i];
    f.converged = res.converged;
    if (!res.converged) return;
    f.state = kuramoto::normalize_rotation(res.final_state);
    f.report = kuramoto::classify(g, f.state);
    f.energy = res.final_energy;
  });

  const double half_pi = std::numbers::pi / 2.0;
  for (std::size_t i = 0; i < found.size(); ++i) {
    auto& f = found[i];
    if (!f.converged || f.report.classification == kuramoto::Classification::not_critical) {
      ++out.unconverged;
      continue;
    }
    bool dup = false;
    for (auto& e : out.entries) {
      if (same_up_to_rotation(e.state, f.state, opts.dedupe_tol)) {
        ++e.hits;
        dup = true;
        break;
      }
    }
    if (dup) continue;
    CatalogEntry e;
    e.state = f.state;
    e.report = f.report;
    e.energy = f.energy;
    e.hits = 1;
    e.first_start = i;
    e.c_half_pi = n == 0 ? 0 : kuramoto::c_beta(f.state, half_pi).size();
    for (std::size_t k = 1; k <= opts.beta_points; ++k) {
      const double beta = half_pi * static_cast<double>(k) / static_cast<double>(opts.beta_points);
      const auto c = certificates::contradiction_bound_check(f.state, beta, out.alpha, n);
      e.betas.push_back(beta);
      e.contradiction.push_back(c);
      e.contradiction_all_pass = e.contradiction_all_pass && c.pass;
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

std::string catalog_json(const StableSearchResult& r) {
  json j;
  j["runs"] = r.runs;
  j["unconverged"] = r.unconverged;
  j["d"] = r.d;
  j["alpha"] = r.alpha;
  json entries = json::array();
  for (const auto& e : r.entries) {
    json x;
    x["classification"] = std::string(kuramoto::to_string(e.report.classification));
    x["degenerate"] = e.report.degenerate;
    x["lambda2"] = num(e.report.lambda2);
    x["gradient_norm"] = num(e.report.gradient_norm);
    x["energy"] = num(e.energy);
    x["hits"] = e.hits;
    x["first_start"] = e.first_start;
    x["c_half_pi_size"] = e.c_half_pi;
    x["angles"] = e.state.angles();
    json grid = json::array();
    for (std::size_t k = 0; k < e.betas.size(); ++k) {
      grid.push_back({{"beta", e.betas[k]},
                      {"lhs", e.contradiction[k].lhs},
                      {"rhs", e.contradiction[k].rhs},
                      {"pass", e.contradiction[k].pass}});
    }
    x["contradiction"] = {{"all_pass", e.contradiction_all_pass}, {"grid", grid}};
    entries.push_back(x);
  }
  j["entries"] = entries;
  return j.dump(2) + "\n";
}

}  // namespace synclab::experiment
