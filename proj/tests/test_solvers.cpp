#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lcl/drk.hpp"
#include "lcl/pcg.hpp"
#include "lcl/prk.hpp"
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

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t k = xs.size() / 2;
  return xs.size() % 2 ? xs[k] : 0.5 * (xs[k - 1] + xs[k]);
}

}  // namespace

TEST_CASE("cost metrics", "[work]") {
  const Graph g = grid_graph({{2, 2}});
  const Cycle four = facial_cycles(g, {{2, 2}}).cycles[0];
  CHECK(cycle_costs(four, 2500) == MetricArray{4, 12, 2, 1});
  const Cycle three = fundamental_cycles(test::triangle(), degree_sum_tree(test::triangle())).cycles[0];
  CHECK(cycle_costs(three, 8) == MetricArray{3, 3, 2, 1});

  Graph c5 = test::cycle_graph(5);
  const auto greedy = local_greedy_cycles(c5);
  REQUIRE(greedy.size() == 1);
  CHECK(cycle_cost(greedy.cycles[0], 1024, CostMetric::LogN) == 5);
  CHECK(cycle_cost(greedy.cycles[0], 1024, CostMetric::LogCycleLength) == 3);

  CHECK(ceil_log2(1) == 0);
  CHECK(ceil_log2(2) == 1);
  CHECK(ceil_log2(3) == 2);
  CHECK(ceil_log2(1024) == 10);
  CHECK(ceil_log2(1025) == 11);
  CHECK(metric_from_number(1) == CostMetric::EdgesTouched);
  CHECK(metric_from_number(4) == CostMetric::Unit);
  CHECK_THROWS_AS(metric_from_number(5), std::invalid_argument);
}

TEST_CASE("solve configuration checks", "[solve]") {
  SolveConfig cfg;
  CHECK_NOTHROW(cfg.validate(3));
  cfg.tolerance = 0.0;
  CHECK_THROWS_AS(cfg.validate(3), std::invalid_argument);
  cfg.tolerance = 1e-3;
  cfg.mode = ConvergenceMode::ActualError;
  CHECK_THROWS_AS(cfg.validate(3), std::invalid_argument);
  cfg.reference = {0, 0, 0};
  CHECK_NOTHROW(cfg.validate(3));
  CHECK_THROWS_AS(cfg.validate(4), std::invalid_argument);
  cfg.mode = ConvergenceMode::Residual;
  CHECK_THROWS_AS(cfg.validate(3), std::invalid_argument);
}

TEST_CASE("drk_solve", "[solvers][drk]") {
  SECTION("triangle is exact after one update") {
    const Graph g = test::triangle();
    const auto t = degree_sum_tree(g);
    const std::vector<double> b{1, -1, 0};
    const auto r = drk_solve(g, t, fundamental_cycles(g, t), b, with_tol(1e-3));
    CHECK(r.converged);
    CHECK(r.status == SolveStatus::Converged);
    CHECK(r.iterations == 1);
    CHECK(r.final_residual <= 1e-12);
    CHECK(r.solution[0] == Approx(1.0 / 3).margin(1e-12));
    CHECK(r.solution[1] == Approx(-1.0 / 3).margin(1e-12));
    CHECK(r.solution[2] == Approx(0.0).margin(1e-12));
    CHECK(r.work.work(CostMetric::EdgesTouched) == 3);
    CHECK(r.rng == "mt19937_64");
  }
  SECTION("4-cycle converges quickly") {
    const Graph g = test::cycle_graph(4);
    const auto t = degree_sum_tree(g);
    const auto r = drk_solve(g, t, fundamental_cycles(g, t), std::vector<double>{1, 0, -1, 0}, with_tol(1e-3));
    CHECK(r.converged);
    CHECK(r.iterations <= 100);
  }
  SECTION("zero demand converges at once") {
    const Graph g = grid_graph({{5, 5}});
    const auto t = degree_sum_tree(g);
    const auto r = drk_solve(g, t, fundamental_cycles(g, t), std::vector<double>(25, 0.0), with_tol(1e-3));
    CHECK(r.converged);
    CHECK(r.iterations == 0);
  }
  SECTION("ledger identities and reported residual") {
    const Graph g = grid_graph({{8, 8}});
    const auto t = degree_sum_tree(g);
    const auto cs = extend_cycle_set(fundamental_cycles(g, t), local_greedy_cycles(g));
    Rng rng(3);
    const auto b = test::random_demand(64, rng);
    const auto r = drk_solve(g, t, cs, b, with_tol(1e-6, 17));
    REQUIRE(r.converged);
    CHECK(r.work.work(CostMetric::Unit) == r.iterations);
    for (std::size_t k = 0; k < kNumMetrics; ++k) {
      CHECK(r.work.parallel_steps[k] == r.work.total[k]);
      CHECK(r.work.per_thread[0][k] == r.work.total[k]);
    }
    CHECK(r.final_residual <= 1e-6);
    CHECK(std::abs(relative_residual(g, r.solution, b) - r.final_residual) <= 1e-12);
    CHECK(r.seed == 17);
    // same seed, same run
    const auto again = drk_solve(g, t, cs, b, with_tol(1e-6, 17));
    CHECK(again.iterations == r.iterations);
    CHECK(again.solution == r.solution);
  }
  SECTION("iteration cap reports non-convergence") {
    const Graph g = grid_graph({{10, 10}});
    const auto t = degree_sum_tree(g);
    Rng rng(6);
    SolveConfig cfg = with_tol(1e-12);
    cfg.max_iterations = 50;
    const auto r = drk_solve(g, t, fundamental_cycles(g, t), test::random_demand(100, rng), cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.status == SolveStatus::MaxIterations);
    CHECK(r.iterations == 50);
  }
  SECTION("a non-spanning set raises the warning flag") {
    const Graph g = grid_graph({{4, 4}});
    const auto t = degree_sum_tree(g);
    CycleSet partial;
    partial.add(local_greedy_cycles(g).cycles.front(), 4.0);
    SolveConfig cfg = with_tol(1e-3);
    cfg.max_iterations = 20;
    Rng rng(2);
    const auto r = drk_solve(g, t, partial, test::random_demand(16, rng), cfg);
    CHECK(r.spanning_warning);
  }
  SECTION("actual-error mode") {
    const Graph g = grid_graph({{6, 6}});
    const auto t = degree_sum_tree(g);
    Rng rng(12);
    const auto b = test::random_demand(36, rng);
    SolveConfig cfg = with_tol(1e-4);
    cfg.mode = ConvergenceMode::ActualError;
    cfg.reference = test::dense_solve(g, b);
    const auto r = drk_solve(g, t, fundamental_cycles(g, t), b, cfg);
    REQUIRE(r.converged);
    REQUIRE(r.final_error.has_value());
    CHECK(*r.final_error <= 1e-4);
    CHECK(actual_error(r.solution, cfg.reference) == Approx(*r.final_error));
  }
  SECTION("median residual does not grow with more updates") {
    const Graph g = grid_graph({{8, 8}});
    const auto t = degree_sum_tree(g);
    const auto cs = fundamental_cycles(g, t);
    Rng rng(99);
    const auto b = test::random_demand(64, rng);
    constexpr std::uint64_t k = 200;
    std::vector<double> at_k, at_2k;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      SolveConfig cfg = with_tol(1e-14, seed);
      cfg.max_iterations = k;
      at_k.push_back(drk_solve(g, t, cs, b, cfg).final_residual);
      cfg.max_iterations = 2 * k;
      at_2k.push_back(drk_solve(g, t, cs, b, cfg).final_residual);
    }
    CHECK(median(at_2k) <= median(at_k));
  }
}

TEST_CASE("facial_sweep_solve", "[solvers][facial]") {
  SECTION("a single face is one projection") {
    const Graph g = grid_graph({{2, 2}});
    const auto cs = facial_cycles(g, {{2, 2}}, 0);
    const std::vector<double> b{1, 0, 0, -1};
    const auto r = facial_sweep_solve(g, cs, b, with_tol(1e-9));
    const auto t = bfs_tree(g);
    auto s = init_tree_flow(g, t, b);
    cycle_project(s, cs.cycles[0]);
    const auto v = recover_potentials(s);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    for (std::size_t i = 0; i < 4; ++i) CHECK(r.solution[i] == Approx(v[i]).margin(1e-14));
    CHECK(r.work.work(CostMetric::EdgesTouched) == 4);
  }
  SECTION("span charges one cycle per half-sweep") {
    const Graph g = grid_graph({{6, 6}});
    const auto cs = facial_cycles(g, {{6, 6}}, 1);
    Rng rng(8);
    SolveConfig cfg = with_tol(1e-14);
    cfg.max_iterations = 3;
    const auto r = facial_sweep_solve(g, cs, test::random_demand(36, rng), cfg);
    CHECK(r.iterations == 3);
    CHECK(r.work.work(CostMetric::Unit) == 3 * cs.size());
    // two level-0 groups of length 4, two level-1 groups of length 8
    CHECK(r.work.steps(CostMetric::EdgesTouched) == 3 * (4 + 4 + 8 + 8));
    CHECK(r.work.steps(CostMetric::Unit) == 3 * 4);
  }
  SECTION("converges on a grid") {
    const Graph g = grid_graph({{9, 9}});
    Rng rng(10);
    const auto b = test::random_demand(81, rng);
    const auto r = facial_sweep_solve(g, facial_cycles(g, {{9, 9}}, 2), b, with_tol(1e-8));
    CHECK(r.converged);
    CHECK(test::distance2(r.solution, test::dense_solve(g, b)) <= 1e-5 * norm2(r.solution));
  }
  SECTION("rejects other cycle kinds") {
    const Graph g = grid_graph({{3, 3}});
    const auto fund = fundamental_cycles(g, degree_sum_tree(g));
    CHECK_THROWS_AS(facial_sweep_solve(g, fund, std::vector<double>(9, 0.0), with_tol(1e-3)), std::invalid_argument);
  }
}

TEST_CASE("kaczmarz_row_project", "[solvers][prk]") {
  const auto rows = laplacian_rows(test::triangle());
  REQUIRE(rows[0].squared_norm() == 6.0);
  std::vector<double> x(3, 0.0);
  kaczmarz_row_project(rows[0], 1.0, x);
  CHECK(x[0] == Approx(1.0 / 3));
  CHECK(x[1] == Approx(-1.0 / 6));
  CHECK(x[2] == Approx(-1.0 / 6));
  const auto once = x;
  kaczmarz_row_project(rows[0], 1.0, x);
  for (std::size_t i = 0; i < 3; ++i) CHECK(x[i] == Approx(once[i]).margin(1e-15));

  std::vector<double> fixed{1.0, 0.5, 0.5};  // row 0 already gives 2 - 0.5 - 0.5 = 1
  kaczmarz_row_project(rows[0], 1.0, fixed);
  CHECK(fixed == std::vector<double>{1.0, 0.5, 0.5});

  const SparseRow empty{};
  CHECK_THROWS_AS(kaczmarz_row_project(empty, 1.0, x), std::invalid_argument);
}

TEST_CASE("prk_solve", "[solvers][prk]") {
  const Graph g = test::triangle();
  const std::vector<double> b{1, -1, 0};
  const auto r = prk_solve(g, b, with_tol(1e-3));
  CHECK(r.converged);
  CHECK(r.solution[0] == Approx(1.0 / 3).margin(1e-3));
  CHECK(r.solution[1] == Approx(-1.0 / 3).margin(1e-3));
  CHECK(r.solution[2] == Approx(0.0).margin(1e-3));

  const auto zero = prk_solve(g, std::vector<double>(3, 0.0), with_tol(1e-3));
  CHECK(zero.converged);
  CHECK(zero.iterations == 0);

  SolveConfig capped = with_tol(1e-15);
  capped.max_iterations = 7;
  const Graph grid = grid_graph({{5, 5}});
  Rng rng(1);
  const auto k = prk_solve(grid, test::random_demand(25, rng), capped);
  CHECK(k.iterations == 7);
  for (std::size_t m = 0; m < kNumMetrics; ++m) CHECK(k.work.total[m] == 7 * grid.laplacian_nnz());
  CHECK(grid.laplacian_nnz() == 25 + 2 * 40);
}

TEST_CASE("pcg_solve", "[solvers][pcg]") {
  SECTION("triangle") {
    const Graph g = test::triangle();
    const auto r = pcg_solve(g, std::vector<double>{1, -1, 0}, with_tol(1e-12));
    CHECK(r.converged);
    CHECK(r.iterations <= 2);
    CHECK(r.solution[0] == Approx(1.0 / 3).margin(1e-12));
    CHECK(r.solution[1] == Approx(-1.0 / 3).margin(1e-12));
    CHECK(r.work.work(CostMetric::EdgesTouched) == r.iterations * (9 + 3));
  }
  SECTION("zero demand") {
    const auto r = pcg_solve(test::triangle(), std::vector<double>(3, 0.0), with_tol(1e-3));
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    for (double x : r.solution) CHECK(x == 0.0);
  }
  SECTION("10x10 grid against the dense oracle") {
    const Graph g = grid_graph({{10, 10}});
    Rng rng(77);
    const auto b = test::random_demand(100, rng);
    const auto r = pcg_solve(g, b, with_tol(1e-10));
    CHECK(r.converged);
    CHECK(test::distance2(r.solution, test::dense_solve(g, b)) <= 1e-8);
  }
  SECTION("random weighted graphs up to 50 vertices") {
    Rng rng(13);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = 2 + rng.below(49);
      std::vector<Edge> edges;
      const Graph base = test::random_connected_graph(n, rng.below(2 * n), rng);
      for (const Edge& e : base.edges()) {
        edges.push_back({e.u, e.v, 0.5 + rng.uniform()});
      }
      const Graph g(n, edges);
      const auto b = test::random_demand(n, rng);
      const auto r = pcg_solve(g, b, with_tol(1e-12));
      CHECK(r.status != SolveStatus::Breakdown);
      CHECK(test::distance2(r.solution, test::dense_solve(g, b)) <= 1e-8);
    }
  }
}

TEST_CASE("solvers agree with each other", "[solvers][property]") {
  Rng rng(31);
  constexpr double tol = 1e-5;
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 3 + rng.below(48);
    const Graph g = test::random_connected_graph(n, 1 + rng.below(n), rng);
    const auto b = test::random_demand(n, rng);
    SolveConfig cfg = with_tol(tol, static_cast<std::uint64_t>(trial));
    cfg.mode = ConvergenceMode::ActualError;
    cfg.reference = test::dense_solve(g, b);
    const auto t = degree_sum_tree(g);
    const auto d = drk_solve(g, t, fundamental_cycles(g, t), b, cfg);
    const auto p = prk_solve(g, b, cfg);
    const auto c = pcg_solve(g, b, cfg);
    REQUIRE(d.converged);
    REQUIRE(p.converged);
    REQUIRE(c.converged);
    const double bound = 2 * tol * norm2(cfg.reference);
    CHECK(test::distance2(d.solution, p.solution) <= bound);
    CHECK(test::distance2(d.solution, c.solution) <= bound);
    CHECK(test::distance2(p.solution, c.solution) <= bound);
  }
}
