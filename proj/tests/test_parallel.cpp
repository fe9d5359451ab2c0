#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "lcl/parallel.hpp"
#include "test_support.hpp"

using namespace lcl;
using Catch::Approx;

namespace {

SolveConfig with_tol(double tol, std::uint64_t seed = 0) {
  SolveConfig cfg;
  cfg.tolerance = tol;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("select_round", "[parallel]") {
  const Graph g = grid_graph({{4, 4}});
  const auto faces = facial_cycles(g, {{4, 4}}, 0);
  const Sampler sampler(faces);
  EdgeClaims claims(g.num_edges());

  SECTION("one thread always succeeds") {
    Rng rng(1);
    for (int round = 0; round < 50; ++round) {
      const auto sel = select_round(sampler, faces, 1, rng, claims);
      CHECK(sel.idle == 0);
      CHECK(sel.accepted().size() == 1);
    }
  }
  SECTION("a single cycle conflicts with itself") {
    CycleSet one;
    one.add(faces.cycles[0], 4.0);
    const Sampler s(one);
    Rng rng(2);
    for (int round = 0; round < 10; ++round) {
      const auto sel = select_round(s, one, 2, rng, claims);
      CHECK(sel.accepted().size() == 1);
      CHECK(sel.idle == 1);
      CHECK(sel.assignment[0].has_value());
      CHECK_FALSE(sel.assignment[1].has_value());
    }
  }
  SECTION("third draw shares an edge with the first") {
    // faces 0 and 1 share an edge; 0, 2 and 8 are pairwise disjoint
    const std::vector<std::size_t> draws{0, 2, 1, 8};
    const auto sel = resolve_conflicts(faces, draws);
    CHECK(sel.accepted() == std::vector<std::size_t>{0, 2, 8});
    CHECK(sel.idle == 1);
    CHECK_FALSE(sel.assignment[2].has_value());
  }
  SECTION("accepted cycles are pairwise edge-disjoint") {
    const auto cs = extend_cycle_set(fundamental_cycles(g, degree_sum_tree(g)), local_greedy_cycles(g));
    const Sampler s(cs);
    Rng rng(7);
    for (int round = 0; round < 500; ++round) {
      const auto sel = select_round(s, cs, 6, rng, claims);
      std::set<EdgeId> used;
      for (std::size_t pick : sel.accepted()) {
        for (const SignedEdge& e : cs.cycles[pick].edges) CHECK(used.insert(e.edge).second);
      }
      CHECK(sel.accepted().size() + sel.idle == 6);
    }
  }
  Rng unused(0);
  CHECK_THROWS_AS(select_round(sampler, faces, 0, unused, claims), std::invalid_argument);
}

TEST_CASE("one simulated thread is sequential DRK", "[parallel]") {
  Rng rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t side = 4 + rng.below(8);
    const Graph g = grid_graph({{side, side}});
    const auto t = degree_sum_tree(g);
    const auto cs = extend_cycle_set(fundamental_cycles(g, t), local_greedy_cycles(g));
    const auto b = test::random_demand(g.num_vertices(), rng);
    const auto cfg = with_tol(1e-5, 100 + static_cast<std::uint64_t>(trial));
    const auto seq = drk_solve(g, t, cs, b, cfg);
    const auto sim = parallel_drk_simulate(g, t, cs, b, 1, cfg);
    CHECK(sim.solve.iterations == seq.iterations);
    CHECK(sim.solve.solution == seq.solution);
    CHECK(sim.solve.work.total == seq.work.total);
    CHECK(sim.solve.work.parallel_steps == seq.work.parallel_steps);
    CHECK(sim.solve.final_residual == seq.final_residual);
    CHECK(sim.solve.work.idle_events == 0);
  }
}

TEST_CASE("parallel ledger identities", "[parallel][property]") {
  const Graph g = grid_graph({{12, 12}});
  const auto t = degree_sum_tree(g);
  const auto cs = extend_cycle_set(fundamental_cycles(g, t), local_greedy_cycles(g));
  Rng rng(9);
  const auto b = test::random_demand(g.num_vertices(), rng);
  for (std::size_t threads : {2u, 4u, 8u, 16u}) {
    const auto sim = parallel_drk_simulate(g, t, cs, b, threads, with_tol(1e-4, threads));
    const WorkLedger& w = sim.solve.work;
    CHECK(sim.solve.converged);
    CHECK(w.threads() == threads);
    for (std::size_t k = 0; k < kNumMetrics; ++k) {
      std::uint64_t sum = 0;
      for (const auto& per : w.per_thread) {
        CHECK(per[k] <= w.total[k]);
        sum += per[k];
      }
      CHECK(sum == w.total[k]);
      CHECK(w.parallel_steps[k] <= w.total[k]);
    }
    CHECK(w.total[index(CostMetric::Unit)] + w.idle_events == threads * w.iterations);
    CHECK(sim.span(CostMetric::Unit) == w.iterations);
    // flows stay feasible, so the final residual is a true residual
    CHECK(std::abs(relative_residual(g, sim.solve.solution, b) - sim.solve.final_residual) <= 1e-12);

    const auto again = parallel_drk_simulate(g, t, cs, b, threads, with_tol(1e-4, threads));
    CHECK(again.solve.solution == sim.solve.solution);
    CHECK(again.solve.work.total == w.total);
    CHECK(again.solve.work.idle_events == w.idle_events);
  }
}

TEST_CASE("no gain from threads on a single-cycle set", "[parallel]") {
  const Graph g = test::cycle_graph(4);
  const auto t = degree_sum_tree(g);
  const auto cs = fundamental_cycles(g, t);
  const std::vector<double> b{1, 0, -1, 0};
  const auto one = parallel_drk_simulate(g, t, cs, b, 1, with_tol(1e-6));
  const auto two = parallel_drk_simulate(g, t, cs, b, 2, with_tol(1e-6));
  CHECK(two.solve.work.parallel_steps == one.solve.work.parallel_steps);
  const std::vector<SimReport> reports{two, one};
  for (const auto& row : speedup_table(reports)) {
    for (double s : row.speedup) CHECK(s == Approx(1.0));
  }
}

TEST_CASE("speedup_table", "[parallel]") {
  const Graph g = grid_graph({{8, 8}});
  const auto t = degree_sum_tree(g);
  const auto cs = fundamental_cycles(g, t);
  Rng rng(0);
  const auto b = test::random_demand(64, rng);
  std::vector<SimReport> reports;
  for (std::size_t p : {4u, 1u, 2u}) reports.push_back(parallel_drk_simulate(g, t, cs, b, p, with_tol(1e-3, 0)));
  const auto table = speedup_table(reports);
  REQUIRE(table.size() == 3);
  CHECK(table[0].threads == 1);
  for (double s : table[0].speedup) CHECK(s == 1.0);
  CHECK(table[2].threads == 4);
  CHECK(table[2].speedup[index(CostMetric::Unit)] > 1.0);

  const std::vector<SimReport> missing{reports[0]};
  CHECK_THROWS_AS(speedup_table(missing), std::invalid_argument);
}

TEST_CASE("idle threads inflate total work", "[parallel][property]") {
  Rng rng(404);
  const Graph g = test::random_connected_graph(300, 450, rng);
  const auto core = prune_two_core(g).graph;
  const auto t = degree_sum_tree(core);
  const auto cs = extend_cycle_set(fundamental_cycles(core, t), local_greedy_cycles(core));
  const auto b = test::random_demand(core.num_vertices(), rng);
  std::vector<double> one, eight;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    one.push_back(static_cast<double>(
        parallel_drk_simulate(core, t, cs, b, 1, with_tol(1e-3, seed)).solve.work.work(CostMetric::Unit)));
    eight.push_back(static_cast<double>(
        parallel_drk_simulate(core, t, cs, b, 8, with_tol(1e-3, seed)).solve.work.work(CostMetric::Unit)));
  }
  std::sort(one.begin(), one.end());
  std::sort(eight.begin(), eight.end());
  CHECK(0.5 * (eight[9] + eight[10]) >= 0.5 * (one[9] + one[10]));
}
