#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "synclab/certificates.hpp"
#include "synclab/graph.hpp"
#include "synclab/kuramoto.hpp"

namespace synclab::experiment {

/// A run counts as synchronized when its final energy is below this.
inline constexpr double kSyncEnergy = 1e-8;
/// Two-sided 95% normal quantile.
inline constexpr double kWilsonZ = 1.959963984540054;
inline constexpr double kDefaultEps = 0.01;

inline constexpr const char* kCsvHeader =
    "n,seed,m,tau,start,converged,final_energy,final_grad_norm,classification,wall_ms";

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval; [0, 1] when trials == 0.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = kWilsonZ);

/// 20 (log n)^{-1/2}.
double alpha_rule(std::size_t n);

/// Seed of the start state for one flow run.
std::uint64_t start_seed(std::uint64_t experiment_seed, std::size_t n, std::uint64_t trace_seed, std::uint64_t m,
                         std::uint64_t start) noexcept;

/// One CSV row. Fields that do not apply (tau in simulate) are left empty.
struct ExperimentRecord {
  std::size_t n = 0;
  std::optional<std::uint64_t> seed;
  std::uint64_t m = 0;
  std::optional<std::uint64_t> tau;
  std::size_t start = 0;
  bool converged = false;
  double final_energy = 0.0;
  double final_grad_norm = 0.0;
  std::string classification;
  double wall_ms = 0.0;
  std::string point;  // grid label; not part of the CSV
};

void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& rows);

enum class MPoint { tau, tau_plus, cap };
const char* to_string(MPoint p) noexcept;
MPoint parse_m_point(const std::string& s);

/// m for a grid point: tau, tau + ceil(n/10), or ceil(5 n log n / 2); all
/// clamped to [tau, n(n-1)/2].
std::uint64_t m_value(MPoint p, std::size_t n, std::uint64_t tau);

struct ExperimentConfig {
  std::vector<std::size_t> n_list;
  std::vector<std::uint64_t> seed_list;
  std::size_t starts = 20;
  std::uint64_t experiment_seed = 0;
  kuramoto::FlowOptions flow;
  double eps = kDefaultEps;
  std::optional<double> alpha;  // recorded; defaults to alpha_rule(n)
  std::vector<MPoint> m_grid{MPoint::tau, MPoint::tau_plus, MPoint::cap};
  bool trees = false;           // uniform random trees instead of the process
  bool record_timing = false;
  std::size_t threads = 1;

  /// Throws InputError on non-positive counts or tolerances.
  void validate() const;
};

struct SyncCell {
  std::size_t n = 0;
  std::string point;  // tau, tau_plus, cap or tree
  std::size_t runs = 0;
  std::size_t synced = 0;
  std::size_t failed = 0;  // rows with a numerical error
  double fraction = 0.0;
  Interval wilson;
};

struct GraphInfo {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t tau = 0;
  double lambda_hit = 0.0;
  std::optional<std::size_t> b_size;  // |B| at the default window; n >= 3 only
};

struct ExperimentResult {
  std::vector<ExperimentRecord> records;  // canonical order: n, seed, grid point, start
  std::vector<SyncCell> cells;
  std::vector<GraphInfo> graphs;
};

ExperimentResult run_hitting_sync(const ExperimentConfig& cfg);

/// Cells recomputed from rows; used for the summary and to cross-check it.
std::vector<SyncCell> summarize(const ExperimentConfig& cfg, const std::vector<ExperimentRecord>& rows);

std::string summary_json(const ExperimentConfig& cfg, const ExperimentResult& r);

/// Random-start (or given-start) flows with full classification.
struct SimulateOptions {
  kuramoto::FlowOptions flow;
  std::size_t threads = 1;
  bool record_timing = false;
};
std::vector<ExperimentRecord> simulate(const Graph& g, const std::vector<PhaseState>& starts,
                                       std::optional<std::uint64_t> seed, const SimulateOptions& opts);
/// State i is uniform from Rng(hash(seed, n, i)).
std::vector<PhaseState> random_starts(std::size_t n, std::size_t count, std::uint64_t seed);

/// max_v |wrap(a_v - b_v - (a_0 - b_0))| <= tol.
bool same_up_to_rotation(const PhaseState& a, const PhaseState& b, double tol);

struct CatalogEntry {
  PhaseState state;  // rotation-normalized
  kuramoto::StabilityReport report;
  double energy = 0.0;
  std::size_t hits = 0;
  std::size_t first_start = 0;
  std::size_t c_half_pi = 0;
  std::vector<double> betas;
  std::vector<certificates::ContradictionCheck> contradiction;
  bool contradiction_all_pass = true;
};

struct StableSearchOptions {
  std::size_t starts = 100;
  std::uint64_t seed = 0;
  kuramoto::FlowOptions flow;
  double dedupe_tol = 1e-5;
  std::size_t beta_points = 100;
  std::optional<double> alpha;  // default ||A - (d/n)J|| / d with d the mean degree
  std::vector<PhaseState> extra_starts;  // run after the random ones
  std::size_t threads = 1;
};

struct StableSearchResult {
  std::size_t runs = 0;
  std::size_t unconverged = 0;
  double d = 0.0;
  double alpha = 0.0;
  std::vector<CatalogEntry> entries;  // in order of first discovery
};

StableSearchResult stable_search(const Graph& g, const StableSearchOptions& opts);
std::string catalog_json(const StableSearchResult& r);

/// Runs f(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any task is rethrown after all workers stop.
template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& f) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t k = std::min(threads, count);
  pool.reserve(k);
  for (std::size_t t = 0; t < k; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace synclab::experiment
