#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "synclab/cli.hpp"
#include "synclab/graph.hpp"
#include "synclab/kuramoto.hpp"

using namespace synclab;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("synclab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_graph(const TempDir& t, const std::string& name, const Graph& g) {
  std::ofstream f(t.file(name));
  write_edge_list(f, g);
  return t.file(name);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("exit codes: help, usage and input errors") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"simulate", "--help"}).code == 0);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"process"}).code == 2);
  CHECK(run({"process", "--n", "1"}).code == 2);
  CHECK(run({"process", "--n", "abc"}).code == 2);
  CHECK(run({"simulate", "/nonexistent/graph.txt", "--random-starts", "2"}).code == 2);
  CHECK(run({"certify", "/nonexistent/graph.txt", "--mode", "expander"}).code == 2);
  CHECK(run({"certify", "/nonexistent/graph.txt", "--mode", "wrong"}).code == 2);
  CHECK(run({"experiment", "--n", "10", "--seeds", "0:2", "--starts", "0"}).code == 2);
  CHECK(run({"experiment", "--n", "10", "--seeds", "x"}).code == 2);
  TempDir t;
  {
    std::ofstream bad(t.file("bad.txt"));
    bad << "3 2\n0 1\n1 7\n";
  }
  const Run r = run({"simulate", t.file("bad.txt"), "--random-starts", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("input error") != std::string::npos);
  const auto c6 = write_graph(t, "c6.txt", generators::cycle(6));
  CHECK(run({"simulate", c6}).code == 2);  // neither --state nor --random-starts
  CHECK(run({"simulate", c6, "--random-starts", "1", "--rel-tol", "0"}).code == 2);
  CHECK(run({"simulate", c6, "--random-starts", "1", "--json", "--csv"}).code == 2);
}

TEST_CASE("exit codes: certificate pass, fail and numerical error") {
  TempDir t;
  const auto k50 = write_graph(t, "k50.txt", generators::complete(50));
  const auto c100 = write_graph(t, "c100.txt", generators::cycle(100));

  Run r = run({"certify", k50, "--mode", "expander", "--d", "49"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["overall"] == true);
  r = run({"certify", k50, "--mode", "expander", "--d", "49", "--alpha", "0.03"});
  CHECK(r.code == 0);

  for (const char* alpha : {"0.5", "0.9", "0.99"}) {
    r = run({"certify", c100, "--mode", "expander", "--d", "2", "--alpha", alpha});
    CHECK(r.code == 1);
    CHECK(json::parse(r.out)["overall"] == false);
  }

  // Defective mode with B empty and the d condition failing.
  std::ofstream(t.file("empty_b.txt")) << "# no defects\n";
  r = run({"certify", k50, "--mode", "defective", "--d", "49", "--alpha", "0.1", "--eps", "0.9", "--partition",
           t.file("empty_b.txt")});
  CHECK(r.code == 1);
  const auto j = json::parse(r.out);
  bool named = false;
  for (const auto& c : j["conditions"]) {
    if (c["name"] == "condition_for_d") named = c["pass"] == false;
  }
  CHECK(named);
  CHECK(run({"certify", k50, "--mode", "defective", "--alpha", "0.1"}).code == 2);  // no partition given

  r = run({"certify", k50, "--mode", "tech", "--d", "49", "--alpha", "0.03"});
  CHECK((r.code == 0 || r.code == 1));
  CHECK(json::parse(r.out).contains("conditions"));
  r = run({"certify", k50, "--mode", "full", "--d", "49"});
  CHECK(r.code == 0);

  // (d/n) J overflows once squared.
  r = run({"certify", k50, "--mode", "expander", "--d", "1e308", "--alpha", "1"});
  CHECK(r.code == 3);
  CHECK(r.err.find("numerical error") != std::string::npos);
}

TEST_CASE("process command") {
  Run r = run({"process", "--n", "2"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["tau_edges"] == 1);
  CHECK(j["sigma"].is_null());
  for (const char* key : {"n", "seed", "rng_id", "tau_edges", "lambda_hit", "sigma", "omega_time", "b_size"}) {
    CHECK(j.contains(key));
  }

  TempDir t;
  r = run({"process", "--n", "300", "--seed", "7", "--at", "tau", "--graph-out", t.file("g.txt")});
  REQUIRE(r.code == 0);
  const Graph g = read_edge_list_file(t.file("g.txt"));
  CHECK(is_connected(g));
  CHECK(g.num_edges() == json::parse(r.out)["tau_edges"]);

  r = run({"process", "--n", "300", "--seed", "7", "--at", "tau-1", "--graph-out", t.file("h.txt")});
  CHECK(r.code == 2);
  r = run({"process", "--n", "300", "--seed", "7", "--at", "tau-1", "--allow-disconnected", "--graph-out",
           t.file("h.txt")});
  REQUIRE(r.code == 0);
  CHECK_FALSE(is_connected(read_edge_list_file(t.file("h.txt"))));
  CHECK(json::parse(r.out)["snapshot"]["connected"] == false);

  r = run({"process", "--n", "50", "--at", "p=0.3", "--allow-disconnected", "--output-dir", t.file("o")});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  CHECK(fs::exists(t.file("o/snapshot.edges")));
  CHECK(fs::exists(t.file("o/process.json")));
  CHECK(run({"process", "--n", "50", "--at", "tau"}).code == 2);  // nowhere to put the graph
  CHECK(run({"process", "--n", "50", "--at", "1.5", "--graph-out", t.file("x")}).code == 2);
  CHECK(run({"process", "--n", "50", "--at", "tau+", "--graph-out", t.file("x")}).code == 2);
}

TEST_CASE("simulate command") {
  TempDir t;
  const auto tree = write_graph(t, "tree.txt", generators::random_tree(30, 5));
  Run r = run({"simulate", tree, "--random-starts", "100", "--seed", "2"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 100);
  for (const auto& row : rows) {
    REQUIRE(row.size() == 10);
    CHECK(row[0] == "30");
    CHECK(row[1] == "2");
    CHECK(row[3].empty());
    CHECK(row[5] == "1");
    CHECK(std::stod(row[6]) < 1e-8);
    CHECK(row[9] == "0");
  }
  CHECK(r.out.rfind("n,seed,m,tau,start,converged,final_energy,final_grad_norm,classification,wall_ms\n", 0) == 0);

  const auto c6 = write_graph(t, "c6.txt", generators::cycle(6));
  r = run({"simulate", c6, "--random-starts", "500", "--seed", "1"});
  REQUIRE(r.code == 0);
  std::size_t twisted = 0;
  for (const auto& row : csv_rows(r.out)) twisted += row[8] == "nontrivial_stable" ? 1 : 0;
  CHECK(twisted > 0);

  std::ofstream(t.file("one.txt")) << "1 0\n";
  r = run({"simulate", t.file("one.txt"), "--random-starts", "1"});
  REQUIRE(r.code == 0);
  const auto one = csv_rows(r.out);
  REQUIRE(one.size() == 1);
  CHECK(std::stod(one[0][6]) == 0.0);

  {
    std::ofstream s(t.file("tw.txt"));
    write_phase_state(s, kuramoto::twisted_state(6, 1));
  }
  r = run({"simulate", c6, "--state", t.file("tw.txt"), "--json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  REQUIRE(j.size() == 1);
  CHECK(j[0]["classification"] == "nontrivial_stable");
  CHECK(j[0]["seed"].is_null());
  CHECK(run({"simulate", c6, "--state", t.file("tw.txt"), "--random-starts", "3"}).code == 2);
}

TEST_CASE("experiment command: outputs, summary consistency and timing side file") {
  TempDir t;
  Run r = run({"experiment", "--n", "100", "--seeds", ""});
  CHECK(r.code == 0);
  CHECK(r.out == "n,seed,m,tau,start,converged,final_energy,final_grad_norm,classification,wall_ms\n");

  r = run({"experiment", "--n", "20,40", "--seeds", "0:3,9", "--starts", "5", "--m-grid", "tau,tau_plus",
           "--output-dir", t.file("e")});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(slurp(t.file("e/records.csv")));
  CHECK(rows.size() == 2 * 4 * 2 * 5);
  const auto summary = json::parse(slurp(t.file("e/summary.json")));
  CHECK(summary["config"]["eps"] == 0.01);
  // Recompute per (n, point) from the rows: point is tau when m == tau.
  std::map<std::pair<std::string, std::string>, std::pair<int, int>> cells;
  for (const auto& row : rows) {
    const std::string point = row[2] == row[3] ? "tau" : "tau_plus";
    auto& c = cells[{row[0], point}];
    ++c.first;
    c.second += std::stod(row[6]) < 1e-8 ? 1 : 0;
  }
  REQUIRE(summary["cells"].size() == 4);
  for (const auto& c : summary["cells"]) {
    const auto& e = cells.at({std::to_string(c["n"].get<int>()), c["point"].get<std::string>()});
    CHECK(c["runs"] == e.first);
    CHECK(c["synced"] == e.second);
    CHECK(c["sync_fraction"].get<double>() == doctest::Approx(static_cast<double>(e.second) / e.first));
    CHECK(c["wilson95"][0].get<double>() <= c["sync_fraction"].get<double>());
    CHECK(c["wilson95"][1].get<double>() >= c["sync_fraction"].get<double>());
  }
  CHECK_FALSE(fs::exists(t.file("e/timing.json")));

  r = run({"experiment", "--n", "20", "--seeds", "0:2", "--starts", "2", "--record-timing", "--output-dir",
           t.file("f")});
  REQUIRE(r.code == 0);
  REQUIRE(fs::exists(t.file("f/timing.json")));
  const auto timing = json::parse(slurp(t.file("f/timing.json")));
  CHECK(timing["runs"].size() == 2 * 3 * 2);
  CHECK(timing.contains("started_utc"));
  // Data stays free of wall times, so it matches an untimed run.
  for (const auto& row : csv_rows(slurp(t.file("f/records.csv")))) CHECK(row[9] == "0");
  run({"experiment", "--n", "20", "--seeds", "0:2", "--starts", "2", "--output-dir", t.file("g")});
  CHECK(slurp(t.file("f/records.csv")) == slurp(t.file("g/records.csv")));
  CHECK(slurp(t.file("f/summary.json")) == slurp(t.file("g/summary.json")));
  CHECK(run({"experiment", "--n", "20", "--seeds", "0:2", "--record-timing"}).code == 2);

  r = run({"experiment", "--n", "20", "--seeds", "0:10", "--starts", "10", "--trees", "--json"});
  REQUIRE(r.code == 0);
  const auto tj = json::parse(r.out);
  CHECK(tj["cells"][0]["point"] == "tree");
  CHECK(tj["cells"][0]["sync_fraction"] == 1.0);

  std::ofstream(t.file("cfg.json")) << R"({"n": [15], "seeds": "0:2", "starts": 3, "m_grid": ["tau"]})";
  r = run({"experiment", "--config", t.file("cfg.json")});
  REQUIRE(r.code == 0);
  CHECK(csv_rows(r.out).size() == 6);
  r = run({"experiment", "--config", t.file("cfg.json"), "--starts", "1"});
  CHECK(csv_rows(r.out).size() == 2);
  std::ofstream(t.file("broken.json")) << "{";
  CHECK(run({"experiment", "--config", t.file("broken.json")}).code == 2);
}

TEST_CASE("stable-search command") {
  TempDir t;
  const auto c6 = write_graph(t, "c6.txt", generators::cycle(6));
  Run r = run({"stable-search", c6, "--starts", "300", "--seed", "3"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["entries"].size() == 3);
  for (const auto& e : j["entries"]) {
    CHECK(e["contradiction"]["grid"].size() == 100);
    CHECK(e["angles"].size() == 6);
  }
  const auto c4 = write_graph(t, "c4.txt", generators::cycle(4));
  {
    std::ofstream s(t.file("tw4.txt"));
    write_phase_state(s, kuramoto::twisted_state(4, 1));
  }
  r = run({"stable-search", c4, "--starts", "50", "--start-state", t.file("tw4.txt")});
  REQUIRE(r.code == 0);
  bool degenerate = false;
  const auto c4j = json::parse(r.out);
  for (const auto& e : c4j["entries"]) degenerate = degenerate || e["degenerate"] == true;
  CHECK(degenerate);
}

TEST_CASE("determinism: reruns are byte-identical, independent of thread count") {
  TempDir t;
  const auto c10 = write_graph(t, "c10.txt", generators::cycle(10));
  const std::vector<std::vector<std::string>> commands = {
      {"process", "--n", "1000", "--seed", "7"},
      {"simulate", c10, "--random-starts", "40", "--seed", "5"},
      {"stable-search", c10, "--starts", "60", "--seed", "5"},
      {"certify", c10, "--mode", "full", "--d", "2", "--alpha", "0.5"},
      {"experiment", "--n", "30", "--seeds", "0:3", "--starts", "4"},
      {"experiment", "--n", "30", "--seeds", "0:3", "--starts", "4", "--json"},
  };
  for (const auto& cmd : commands) {
    auto one = cmd;
    one.insert(one.end(), {"--threads", "1"});
    auto four = cmd;
    four.insert(four.end(), {"--threads", "4"});
    const Run a = run(one), b = run(one), c = run(four);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    CHECK(a.code == c.code);
    CHECK_FALSE(a.out.empty());
  }
  // The graph dump is deterministic too.
  run({"process", "--n", "1000", "--seed", "7", "--at", "tau", "--graph-out", t.file("a.txt")});
  run({"process", "--n", "1000", "--seed", "7", "--at", "tau", "--graph-out", t.file("b.txt")});
  CHECK(slurp(t.file("a.txt")) == slurp(t.file("b.txt")));
}

TEST_CASE("thread defaults and seed lists") {
  ::setenv("SYNCLAB_THREADS", "3", 1);
  CHECK(cli::default_threads() == 3);
  ::setenv("SYNCLAB_THREADS", "zero", 1);
  CHECK(run({"process", "--n", "5"}).code == 0);  // process never asks for threads
  CHECK(run({"experiment", "--n", "10", "--seeds", "0"}).code == 2);
  CHECK(run({"experiment", "--n", "10", "--seeds", "0", "--threads", "2"}).code == 0);
  ::unsetenv("SYNCLAB_THREADS");
  CHECK(cli::default_threads() >= 1);

  CHECK(cli::parse_seed_list("") == std::vector<unsigned long long>{});
  CHECK(cli::parse_seed_list("0:3") == std::vector<unsigned long long>{0, 1, 2});
  CHECK(cli::parse_seed_list("5, 1:3,9") == std::vector<unsigned long long>{5, 1, 2, 9});
  CHECK(cli::parse_seed_list("4:4").empty());
}
