#include "synclab/cli.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "synclab/certificates.hpp"
#include "synclab/errors.hpp"
#include "synclab/experiment.hpp"
#include "synclab/process.hpp"
#include "synclab/spectral.hpp"

namespace synclab::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

unsigned long long parse_u64(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw InputError(std::string("invalid ") + what + " '" + s + "'");
  }
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
  if (errno == ERANGE) throw InputError(std::string(what) + " out of range: " + s);
  return v;
}

json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

struct Common {
  std::string output_dir;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  bool as_json = false;
  bool as_csv = false;
  bool record_timing = false;

  std::size_t thread_count() const { return threads == 0 ? default_threads() : threads; }
};

void add_common(CLI::App* sub, Common& c, bool timing) {
  sub->add_option("--output-dir", c.output_dir, "Write data files here instead of stdout");
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--threads", c.threads, "Worker threads (default: SYNCLAB_THREADS or all cores)");
  auto* j = sub->add_flag("--json", c.as_json, "JSON output");
  auto* k = sub->add_flag("--csv", c.as_csv, "CSV output");
  j->excludes(k);
  if (timing) sub->add_flag("--record-timing", c.record_timing, "Write per-run and total wall times to timing.json");
}

void add_flow(CLI::App* sub, kuramoto::FlowOptions& f) {
  sub->add_option("--grad-tol", f.grad_tol, "Stop when the gradient sup-norm is below this");
  sub->add_option("--max-time", f.max_time, "Integration time limit");
  sub->add_option("--rel-tol", f.rel_tol, "Local error target of the integrator");
}

void check_flow(const kuramoto::FlowOptions& f) {
  if (!(f.grad_tol > 0) || !(f.max_time > 0) || !(f.rel_tol > 0)) {
    throw InputError("integrator tolerances must be positive");
  }
}

// Writes `content` to output-dir/name, or to `out` when no directory was given.
void emit(const Common& c, const std::string& name, const std::string& content, std::ostream& out) {
  if (c.output_dir.empty()) {
    out << content;
    return;
  }
  fs::create_directories(c.output_dir);
  const fs::path path = fs::path(c.output_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  f << content;
  if (!f) throw InputError("write failed: " + path.string());
}

std::string timestamp_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Timing lives in its own file so the data outputs stay byte-identical; the
// wall_ms column of the data CSV is always 0.
void write_timing(const Common& c, const std::string& command, const std::string& started, double ms,
                  const std::vector<experiment::ExperimentRecord>* rows = nullptr) {
  if (!c.record_timing) return;
  json j{{"command", command}, {"started_utc", started}, {"wall_ms", ms}, {"threads", c.thread_count()}};
  if (rows != nullptr) {
    json runs = json::array();
    for (const auto& r : *rows) {
      runs.push_back({{"n", r.n},
                      {"seed", r.seed ? json(*r.seed) : json(nullptr)},
                      {"m", r.m},
                      {"start", r.start},
                      {"wall_ms", r.wall_ms}});
    }
    j["runs"] = std::move(runs);
  }
  std::ostringstream unused;
  emit(c, "timing.json", j.dump(2) + "\n", unused);
}

std::vector<experiment::ExperimentRecord> without_timing(std::vector<experiment::ExperimentRecord> rows) {
  for (auto& r : rows) r.wall_ms = 0.0;
  return rows;
}

void check_timing_target(const Common& c) {
  if (c.record_timing && c.output_dir.empty()) throw InputError("--record-timing needs --output-dir");
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string records_json(const std::vector<experiment::ExperimentRecord>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"n", r.n},
                   {"seed", r.seed ? json(*r.seed) : json(nullptr)},
                   {"m", r.m},
                   {"tau", r.tau ? json(*r.tau) : json(nullptr)},
                   {"start", r.start},
                   {"converged", r.converged},
                   {"final_energy", num(r.final_energy)},
                   {"final_grad_norm", num(r.final_grad_norm)},
                   {"classification", r.classification},
                   {"wall_ms", r.wall_ms}});
  }
  return arr.dump(2) + "\n";
}

std::string records_csv(const std::vector<experiment::ExperimentRecord>& rows) {
  std::ostringstream s;
  experiment::write_csv(s, rows);
  return s.str();
}

PhaseState read_state_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open state file '" + path + "'");
  return read_phase_state(in);
}

VertexSet read_vertex_set(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open partition file '" + path + "'");
  VertexSet b(n);
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      const auto v = parse_u64(tok, "vertex id");
      if (v >= n) throw InputError("partition vertex " + tok + " out of range");
      b.insert(static_cast<Vertex>(v));
    }
  }
  return b;
}

double mean_degree(const Graph& g) {
  return g.order() == 0 ? 0.0 : 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.order());
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string graph;
  std::string state;
  std::size_t random_starts = 0;
  kuramoto::FlowOptions flow;
};

int cmd_simulate(const SimulateArgs& a, const Common& c, std::ostream& out) {
  check_flow(a.flow);
  check_timing_target(c);
  const Graph g = read_edge_list_file(a.graph);
  std::vector<PhaseState> starts;
  std::optional<std::uint64_t> seed;
  if (!a.state.empty()) {
    if (a.random_starts > 0) throw InputError("--state and --random-starts are exclusive");
    starts.push_back(read_state_file(a.state));
  } else {
    if (a.random_starts == 0) throw InputError("give --state FILE or --random-starts K");
    seed = c.seed;
    starts = experiment::random_starts(g.order(), a.random_starts, c.seed);
  }
  experiment::SimulateOptions o;
  o.flow = a.flow;
  o.threads = c.thread_count();
  o.record_timing = c.record_timing;
  const std::string started = timestamp_utc();
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = experiment::simulate(g, starts, seed, o);
  const auto data = without_timing(rows);
  if (c.as_json) {
    emit(c, "simulate.json", records_json(data), out);
  } else {
    emit(c, "simulate.csv", records_csv(data), out);
  }
  write_timing(c, "simulate", started, ms_since(t0), &rows);
  return kOk;
}

struct CertifyArgs {
  std::string graph;
  std::string mode;
  std::optional<double> d;
  std::optional<double> alpha;
  std::optional<double> c_minus;
  std::optional<double> c_plus;
  double eps = experiment::kDefaultEps;
  std::string partition;
  bool auto_partition = false;
};

int cmd_certify(const CertifyArgs& a, const Common& c, std::ostream& out) {
  const Graph g = read_edge_list_file(a.graph);
  const std::size_t n = g.order();
  const double d = a.d ? *a.d : mean_degree(g);
  if (!(d > 0.0)) throw InputError("d must be positive (give --d, or a graph with edges)");
  std::optional<double> deviation;
  auto alpha = [&] {
    if (a.alpha) return *a.alpha;
    if (!deviation) deviation = spectral::spectral_norm_deviation(g, d);
    return *deviation / d;
  };

  certificates::CertificateReport report;
  if (a.mode == "expander") {
    report = certificates::check_expander(g, d, alpha());
  } else if (a.mode == "full" || a.mode == "tech") {
    certificates::ExpanderParams p;
    p.n = n;
    p.d = d;
    p.alpha = alpha();
    p.c_minus = a.c_minus;
    p.c_plus = a.c_plus;
    if (!p.c_minus || !p.c_plus) {
      const auto b = spectral::laplacian_expander_bounds(g, d);
      if (!p.c_minus) p.c_minus = b.c_minus;
      if (!p.c_plus) p.c_plus = b.c_plus;
    }
    report = a.mode == "full" ? certificates::check_expander_full(g, p) : certificates::check_thm_tech(p);
  } else if (a.mode == "defective") {
    if (a.partition.empty() == !a.auto_partition) {
      throw InputError("defective mode needs exactly one of --partition FILE and --auto-partition");
    }
    VertexSet b(n);
    if (a.auto_partition) {
      const double threshold = 11.0 * a.eps * std::log(static_cast<double>(n));
      for (Vertex v = 0; v < n; ++v) {
        if (static_cast<double>(g.degree(v)) <= threshold) b.insert(v);
      }
    } else {
      b = read_vertex_set(a.partition, n);
    }
    certificates::DefectiveInput in;
    in.b = b;
    in.w = b.complement();
    in.eps = a.eps;
    in.alpha = alpha();
    in.d = d;
    in.deviation = deviation;
    report = certificates::check_defective(g, in);
  } else {
    throw InputError("unknown mode '" + a.mode + "'");
  }
  emit(c, "certificate.json", certificates::to_json(report) + "\n", out);
  return report.overall ? kOk : kCertificateFail;
}

struct ProcessArgs {
  std::size_t n = 0;
  std::string at;
  std::string graph_out;
  bool allow_disconnected = false;
  double eps = experiment::kDefaultEps;
};

// tau, tau+K, tau-K, m=K, p=X, or a bare probability.
struct AtSpec {
  std::optional<std::int64_t> tau_offset;
  std::optional<std::uint64_t> m;
  std::optional<double> p;
};

AtSpec parse_at(const std::string& s) {
  AtSpec at;
  if (s.rfind("tau", 0) == 0) {
    const std::string rest = s.substr(3);
    if (rest.empty()) {
      at.tau_offset = 0;
    } else if (rest[0] == '+' || rest[0] == '-') {
      const auto k = static_cast<std::int64_t>(parse_u64(rest.substr(1), "offset in --at"));
      at.tau_offset = rest[0] == '+' ? k : -k;
    } else {
      throw InputError("bad --at value '" + s + "'");
    }
    return at;
  }
  if (s.rfind("m=", 0) == 0) {
    at.m = parse_u64(s.substr(2), "m in --at");
    return at;
  }
  const std::string ps = s.rfind("p=", 0) == 0 ? s.substr(2) : s;
  char* end = nullptr;
  const double p = std::strtod(ps.c_str(), &end);
  if (ps.empty() || end != ps.c_str() + ps.size() || !(p >= 0.0 && p <= 1.0)) {
    throw InputError("bad --at value '" + s + "' (tau, tau+K, tau-K, m=K or p in [0,1])");
  }
  at.p = p;
  return at;
}

int cmd_process(const ProcessArgs& a, const Common& c, std::ostream& out) {
  if (a.n < 2) throw InputError("--n must be at least 2");
  std::optional<AtSpec> at;
  if (!a.at.empty()) {
    at = parse_at(a.at);
    if (a.graph_out.empty() && c.output_dir.empty()) {
      throw InputError("--at needs --graph-out FILE or --output-dir");
    }
  }
  const auto trace = process::ProcessTrace::sample(a.n, c.seed);
  const auto h = process::hitting_times(trace);
  json j;
  j["n"] = a.n;
  j["seed"] = c.seed;
  j["rng_id"] = process::ProcessTrace::kRngId;
  j["tau_edges"] = h.tau_edges;
  j["lambda_hit"] = h.lambda_hit;
  j["sigma"] = num(h.sigma);
  j["omega_time"] = num(h.omega_time);
  j["eps"] = a.eps;
  json b_size = nullptr;
  if (a.n >= 3) {
    try {
      b_size = process::partition_bw(trace, a.eps).b.size();
    } catch (const InputError&) {
      // window undefined
    }
  }
  j["b_size"] = b_size;

  if (at) {
    Graph snap;
    std::uint64_t m = 0;
    if (at->p) {
      snap = trace.graph_at_p(*at->p);
      m = snap.num_edges();
    } else {
      if (at->m) {
        m = *at->m;
      } else {
        const std::int64_t target = static_cast<std::int64_t>(h.tau_edges) + *at->tau_offset;
        if (target < 0) throw InputError("--at resolves to a negative edge count");
        m = static_cast<std::uint64_t>(target);
      }
      if (m > trace.pairs()) throw InputError("--at resolves to more edges than pairs");
      snap = trace.graph_at_m(m);
    }
    const bool connected = is_connected(snap);
    if (!connected && !a.allow_disconnected) {
      throw InputError("snapshot at m=" + std::to_string(m) + " is disconnected; pass --allow-disconnected");
    }
    std::ostringstream gs;
    write_edge_list(gs, snap);
    std::string file;
    if (!a.graph_out.empty()) {
      std::ofstream f(a.graph_out, std::ios::binary);
      if (!f) throw InputError("cannot write " + a.graph_out);
      f << gs.str();
      file = a.graph_out;
    } else {
      emit(c, "snapshot.edges", gs.str(), out);
      file = "snapshot.edges";  // relative to the output directory
    }
    j["snapshot"] = {{"at", a.at}, {"m", m}, {"connected", connected}, {"file", file}};
  }
  emit(c, "process.json", j.dump(2) + "\n", out);
  return kOk;
}

struct ExperimentArgs {
  std::string config;
  std::vector<std::size_t> n_list;
  std::string seeds;
  std::size_t starts = 0;
  std::vector<std::string> m_grid;
  bool trees = false;
  double eps = 0.0;
  double alpha = 0.0;
  kuramoto::FlowOptions flow;
};

experiment::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  experiment::ExperimentConfig cfg;
  try {
    if (j.contains("n")) cfg.n_list = j["n"].get<std::vector<std::size_t>>();
    if (j.contains("seeds")) {
      if (j["seeds"].is_string()) {
        for (auto s : parse_seed_list(j["seeds"].get<std::string>())) cfg.seed_list.push_back(s);
      } else {
        cfg.seed_list = j["seeds"].get<std::vector<std::uint64_t>>();
      }
    }
    if (j.contains("starts")) cfg.starts = j["starts"].get<std::size_t>();
    if (j.contains("experiment_seed")) cfg.experiment_seed = j["experiment_seed"].get<std::uint64_t>();
    if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
    if (j.contains("alpha") && !j["alpha"].is_null()) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("m_grid")) {
      cfg.m_grid.clear();
      for (const auto& s : j["m_grid"].get<std::vector<std::string>>()) cfg.m_grid.push_back(experiment::parse_m_point(s));
    }
    if (j.contains("trees")) cfg.trees = j["trees"].get<bool>();
    if (j.contains("grad_tol")) cfg.flow.grad_tol = j["grad_tol"].get<double>();
    if (j.contains("rel_tol")) cfg.flow.rel_tol = j["rel_tol"].get<double>();
    if (j.contains("max_time")) cfg.flow.max_time = j["max_time"].get<double>();
  } catch (const json::exception& e) {
    throw InputError(std::string("bad config field: ") + e.what());
  }
  return cfg;
}

int cmd_experiment(const ExperimentArgs& a, const Common& c, const CLI::App& sub, std::ostream& out) {
  experiment::ExperimentConfig cfg = a.config.empty() ? experiment::ExperimentConfig{} : load_config(a.config);
  auto given = [&](const char* name) { return sub.count(name) > 0; };
  if (given("--n")) cfg.n_list = a.n_list;
  if (given("--seeds")) {
    cfg.seed_list.clear();
    for (auto s : parse_seed_list(a.seeds)) cfg.seed_list.push_back(s);
  }
  if (given("--starts")) cfg.starts = a.starts;
  if (given("--seed")) cfg.experiment_seed = c.seed;
  if (given("--m-grid")) {
    cfg.m_grid.clear();
    for (const auto& s : a.m_grid) cfg.m_grid.push_back(experiment::parse_m_point(s));
  }
  if (given("--trees")) cfg.trees = a.trees;
  if (given("--eps")) cfg.eps = a.eps;
  if (given("--alpha")) cfg.alpha = a.alpha;
  if (given("--grad-tol")) cfg.flow.grad_tol = a.flow.grad_tol;
  if (given("--rel-tol")) cfg.flow.rel_tol = a.flow.rel_tol;
  if (given("--max-time")) cfg.flow.max_time = a.flow.max_time;
  check_timing_target(c);
  cfg.threads = c.thread_count();
  cfg.record_timing = c.record_timing;

  const std::string started = timestamp_utc();
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = experiment::run_hitting_sync(cfg);
  const std::string csv = records_csv(without_timing(result.records));
  const std::string summary = experiment::summary_json(cfg, result);
  if (c.output_dir.empty()) {
    out << (c.as_json ? summary : csv);
  } else {
    emit(c, "records.csv", csv, out);
    emit(c, "summary.json", summary, out);
  }
  write_timing(c, "experiment", started, ms_since(t0), &result.records);
  return kOk;
}

struct StableArgs {
  std::string graph;
  std::size_t starts = 100;
  std::optional<double> alpha;
  std::size_t beta_points = 100;
  double dedupe_tol = 1e-5;
  std::vector<std::string> start_states;
  kuramoto::FlowOptions flow;
};

int cmd_stable_search(const StableArgs& a, const Common& c, std::ostream& out) {
  check_flow(a.flow);
  check_timing_target(c);
  const Graph g = read_edge_list_file(a.graph);
  experiment::StableSearchOptions o;
  o.starts = a.starts;
  o.seed = c.seed;
  o.flow = a.flow;
  o.dedupe_tol = a.dedupe_tol;
  o.beta_points = a.beta_points;
  o.alpha = a.alpha;
  o.threads = c.thread_count();
  for (const auto& p : a.start_states) o.extra_starts.push_back(read_state_file(p));
  const std::string started = timestamp_utc();
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = experiment::stable_search(g, o);
  emit(c, "catalog.json", experiment::catalog_json(r), out);
  write_timing(c, "stable-search", started, ms_since(t0));
  return kOk;
}

}  // namespace

std::size_t default_threads() {
  if (const char* env = std::getenv("SYNCLAB_THREADS"); env != nullptr && *env != '\0') {
    const auto v = parse_u64(env, "SYNCLAB_THREADS");
    if (v == 0) throw InputError("SYNCLAB_THREADS must be positive");
    return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<unsigned long long> parse_seed_list(const std::string& s) {
  std::vector<unsigned long long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    item = item.substr(b, item.find_last_not_of(" \t") - b + 1);
    if (const auto colon = item.find(':'); colon != std::string::npos) {
      const auto lo = parse_u64(item.substr(0, colon), "seed range");
      const auto hi = parse_u64(item.substr(colon + 1), "seed range");
      if (hi < lo) throw InputError("reversed seed range '" + item + "'");
      for (auto v = lo; v < hi; ++v) out.push_back(v);
    } else {
      out.push_back(parse_u64(item, "seed"));
    }
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kuramoto synchronization toolkit", "synclab"};
  app.require_subcommand(1);

  Common common;
  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "Gradient flows from given or random starts");
  s_sim->add_option("graph", sim.graph, "Edge-list file")->required();
  s_sim->add_option("--state", sim.state, "Start state file (one angle per line)");
  s_sim->add_option("--random-starts", sim.random_starts, "Number of uniform random starts");
  add_flow(s_sim, sim.flow);
  add_common(s_sim, common, true);

  CertifyArgs cert;
  auto* s_cert = app.add_subcommand("certify", "Check synchronization certificates on a graph");
  s_cert->add_option("graph", cert.graph, "Edge-list file")->required();
  s_cert->add_option("--mode", cert.mode, "expander | full | tech | defective")
      ->required()
      ->check(CLI::IsMember({"expander", "full", "tech", "defective"}));
  s_cert->add_option("--d", cert.d, "Degree parameter (default: mean degree)");
  s_cert->add_option("--alpha", cert.alpha, "Expansion parameter (default: deviation / d)");
  s_cert->add_option("--c-minus", cert.c_minus, "Lower Laplacian constant (default: computed)");
  s_cert->add_option("--c-plus", cert.c_plus, "Upper Laplacian constant (default: computed)");
  s_cert->add_option("--eps", cert.eps, "Defect parameter")->capture_default_str();
  s_cert->add_option("--partition", cert.partition, "File listing the defect set B");
  s_cert->add_flag("--auto-partition", cert.auto_partition, "B = vertices of degree <= 11 eps log n");
  add_common(s_cert, common, false);

  ProcessArgs proc;
  auto* s_proc = app.add_subcommand("process", "Sample a random graph process and report its thresholds");
  s_proc->add_option("--n", proc.n, "Number of vertices")->required();
  s_proc->add_option("--at", proc.at, "Snapshot: tau, tau+K, tau-K, m=K or p");
  s_proc->add_option("--graph-out", proc.graph_out, "Edge-list file for the snapshot");
  s_proc->add_flag("--allow-disconnected", proc.allow_disconnected, "Permit disconnected snapshots");
  s_proc->add_option("--eps", proc.eps, "Defect parameter for |B|")->capture_default_str();
  add_common(s_proc, common, false);

  ExperimentArgs ex;
  auto* s_ex = app.add_subcommand("experiment", "Synchronization of G(n, m) at and above the hitting time");
  s_ex->add_option("--config", ex.config, "JSON config file; flags override it");
  s_ex->add_option("--n", ex.n_list, "Vertex counts")->delimiter(',');
  s_ex->add_option("--seeds", ex.seeds, "Trace seeds, e.g. 0:50 or 1,2,7");
  s_ex->add_option("--starts", ex.starts, "Random starts per graph");
  s_ex->add_option("--m-grid", ex.m_grid, "Subset of tau,tau_plus,cap")->delimiter(',');
  s_ex->add_flag("--trees", ex.trees, "Use uniform random trees instead of the process");
  s_ex->add_option("--eps", ex.eps, "Defect parameter (default 0.01)");
  s_ex->add_option("--alpha", ex.alpha, "Fixed alpha (default 20/sqrt(log n))");
  add_flow(s_ex, ex.flow);
  add_common(s_ex, common, true);

  StableArgs st;
  auto* s_st = app.add_subcommand("stable-search", "Catalog critical states reached from random starts");
  s_st->add_option("graph", st.graph, "Edge-list file")->required();
  s_st->add_option("--starts", st.starts, "Random starts")->capture_default_str();
  s_st->add_option("--alpha", st.alpha, "Alpha for the contradiction bound (default: deviation / d)");
  s_st->add_option("--beta-points", st.beta_points, "Beta grid size on (0, pi/2]")->capture_default_str();
  s_st->add_option("--dedupe-tol", st.dedupe_tol, "Distance up to rotation for equal states")->capture_default_str();
  s_st->add_option("--start-state", st.start_states, "Extra start state files");
  add_flow(s_st, st.flow);
  add_common(s_st, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*s_sim) return cmd_simulate(sim, common, out);
    if (*s_cert) return cmd_certify(cert, common, out);
    if (*s_proc) return cmd_process(proc, common, out);
    if (*s_ex) return cmd_experiment(ex, common, *s_ex, out);
    if (*s_st) return cmd_stable_search(st, common, out);
  } catch (const InputError& e) {
    err << "synclab: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericalError& e) {
    err << "synclab: numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const fs::filesystem_error& e) {
    err << "synclab: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "synclab: error: " << e.what() << '\n';
    return kNumericalError;
  }
  return kInputError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"synclab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace synclab::cli
