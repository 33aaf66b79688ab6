#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "synclab/errors.hpp"
#include "synclab/experiment.hpp"
#include "synclab/process.hpp"

using namespace synclab;
using namespace synclab::experiment;

TEST_CASE("wilson interval against hand values") {
  // 0 of 20: upper end z^2 / (n + z^2).
  const double z2 = kWilsonZ * kWilsonZ;
  auto w = wilson_interval(0, 20);
  CHECK(w.lo == 0.0);
  CHECK(w.hi == doctest::Approx(z2 / (20 + z2)).epsilon(1e-12));
  w = wilson_interval(20, 20);
  CHECK(w.lo == doctest::Approx(20 / (20 + z2)).epsilon(1e-12));
  CHECK(w.hi == 1.0);
  // 50 of 100, symmetric about 1/2: half width z sqrt(1/4/n + z^2/4/n^2) / (1 + z^2/n).
  w = wilson_interval(50, 100);
  const double half = kWilsonZ * std::sqrt(0.25 / 100 + z2 / 40000.0) / (1 + z2 / 100);
  CHECK(w.lo == doctest::Approx(0.5 - half));
  CHECK(w.hi == doctest::Approx(0.5 + half));
  w = wilson_interval(0, 0);
  CHECK(w.lo == 0.0);
  CHECK(w.hi == 1.0);
}

TEST_CASE("m grid values are clamped to [tau, pairs]") {
  CHECK(m_value(MPoint::tau, 100, 250) == 250);
  CHECK(m_value(MPoint::tau_plus, 100, 250) == 260);
  CHECK(m_value(MPoint::tau_plus, 101, 250) == 261);
  CHECK(m_value(MPoint::cap, 100, 250) == static_cast<std::uint64_t>(std::ceil(250 * std::log(100.0))));
  CHECK(m_value(MPoint::tau_plus, 5, 10) == 10);
  CHECK(m_value(MPoint::cap, 5, 8) == 10);
  CHECK(parse_m_point("tau_plus") == MPoint::tau_plus);
  CHECK_THROWS_AS(parse_m_point("bogus"), InputError);
}

TEST_CASE("start seeds depend on every key") {
  const auto base = start_seed(1, 100, 2, 300, 4);
  CHECK(base == start_seed(1, 100, 2, 300, 4));
  CHECK(base != start_seed(0, 100, 2, 300, 4));
  CHECK(base != start_seed(1, 101, 2, 300, 4));
  CHECK(base != start_seed(1, 100, 3, 300, 4));
  CHECK(base != start_seed(1, 100, 2, 301, 4));
  CHECK(base != start_seed(1, 100, 2, 300, 5));
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  c.n_list = {10};
  c.seed_list = {0};
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.starts = 0;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = c;
  bad.flow.rel_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = c;
  bad.n_list = {10, 10};
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = c;
  bad.n_list = {1};
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = c;
  bad.eps = 1.0;
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("hitting-sync experiment: layout, tau, summary recomputation, thread invariance") {
  ExperimentConfig c;
  c.n_list = {12, 30};
  c.seed_list = {3, 4, 5};
  c.starts = 4;
  c.experiment_seed = 11;
  const auto r = run_hitting_sync(c);
  REQUIRE(r.records.size() == 2 * 3 * 3 * 4);
  std::size_t i = 0;
  for (std::size_t n : c.n_list) {
    for (std::uint64_t seed : c.seed_list) {
      const auto h = process::hitting_times(process::ProcessTrace::sample(n, seed));
      for (auto p : c.m_grid) {
        for (std::size_t s = 0; s < c.starts; ++s, ++i) {
          const auto& row = r.records[i];
          REQUIRE(row.n == n);
          REQUIRE(*row.seed == seed);
          REQUIRE(*row.tau == h.tau_edges);
          REQUIRE(row.m == m_value(p, n, h.tau_edges));
          REQUIRE(row.start == s);
          REQUIRE(row.point == to_string(p));
          REQUIRE(row.wall_ms == 0.0);
        }
      }
    }
  }
  // Cells equal a recount of the rows.
  std::map<std::pair<std::size_t, std::string>, std::pair<std::size_t, std::size_t>> count;
  for (const auto& row : r.records) {
    auto& e = count[{row.n, row.point}];
    ++e.first;
    e.second += row.final_energy < 1e-8 ? 1 : 0;
  }
  REQUIRE(r.cells.size() == count.size());
  for (const auto& cell : r.cells) {
    const auto& e = count.at({cell.n, cell.point});
    CHECK(cell.runs == e.first);
    CHECK(cell.synced == e.second);
    CHECK(cell.fraction == static_cast<double>(e.second) / static_cast<double>(e.first));
  }

  auto c3 = c;
  c3.threads = 3;
  const auto r3 = run_hitting_sync(c3);
  std::ostringstream a, b;
  write_csv(a, r.records);
  write_csv(b, r3.records);
  CHECK(a.str() == b.str());
  CHECK(summary_json(c, r) == summary_json(c3, r3));
}

TEST_CASE("trees only: every run synchronizes") {
  ExperimentConfig c;
  c.n_list = {20};
  for (std::uint64_t s = 0; s < 10; ++s) c.seed_list.push_back(s);
  c.starts = 10;
  c.trees = true;
  const auto r = run_hitting_sync(c);
  REQUIRE(r.cells.size() == 1);
  CHECK(r.cells[0].point == "tree");
  CHECK(r.cells[0].runs == 100);
  CHECK(r.cells[0].fraction == 1.0);
  for (const auto& row : r.records) CHECK(row.m == 19);
}

TEST_CASE("empty seed list gives a header-only CSV") {
  ExperimentConfig c;
  c.n_list = {50};
  const auto r = run_hitting_sync(c);
  CHECK(r.records.empty());
  std::ostringstream s;
  write_csv(s, r.records);
  CHECK(s.str() == std::string(kCsvHeader) + "\n");
}

TEST_CASE("same_up_to_rotation") {
  const auto t = kuramoto::twisted_state(8, 1);
  CHECK(same_up_to_rotation(t, kuramoto::rotate(t, 2.5), 1e-9));
  CHECK_FALSE(same_up_to_rotation(t, kuramoto::twisted_state(8, -1), 1e-5));
  CHECK_FALSE(same_up_to_rotation(t, PhaseState::constant(8, 0.0), 1e-5));
  CHECK_FALSE(same_up_to_rotation(t, PhaseState::constant(7, 0.0), 1e-5));
}

TEST_CASE("stable search on cycles and trees") {
  StableSearchOptions o;
  o.starts = 2000;
  o.seed = 3;
  const auto c6 = stable_search(generators::cycle(6), o);
  CHECK(c6.unconverged == 0);
  bool sync = false, plus = false, minus = false;
  std::size_t hits = 0;
  for (const auto& e : c6.entries) {
    hits += e.hits;
    const auto cls = kuramoto::classify(generators::cycle(6), e.state).classification;
    CHECK(cls == e.report.classification);
    sync = sync || cls == kuramoto::Classification::fully_synchronized;
    plus = plus || same_up_to_rotation(e.state, kuramoto::twisted_state(6, 1), 1e-5);
    minus = minus || same_up_to_rotation(e.state, kuramoto::twisted_state(6, -1), 1e-5);
    CHECK(e.betas.size() == 100);
    CHECK(e.betas.back() == doctest::Approx(std::numbers::pi / 2));
  }
  CHECK(hits == 2000);
  CHECK(sync);
  CHECK(plus);
  CHECK(minus);

  o.starts = 300;
  const auto tree = stable_search(generators::random_tree(25, 4), o);
  REQUIRE(tree.entries.size() == 1);
  CHECK(tree.entries[0].report.classification == kuramoto::Classification::fully_synchronized);

  // The C_4 twisted state is not an attractor, so it is seeded explicitly.
  o.starts = 200;
  o.extra_starts = {kuramoto::twisted_state(4, 1)};
  const auto c4 = stable_search(generators::cycle(4), o);
  bool degenerate = false;
  for (const auto& e : c4.entries) {
    if (same_up_to_rotation(e.state, kuramoto::twisted_state(4, 1), 1e-5)) {
      degenerate = e.report.classification == kuramoto::Classification::nontrivial_stable && e.report.degenerate;
      CHECK(e.first_start == 200);
    }
  }
  CHECK(degenerate);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) REQUIRE(h == 1);
  CHECK_THROWS_AS(parallel_for(100, 4,
                               [](std::size_t i) {
                                 if (i == 37) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}
