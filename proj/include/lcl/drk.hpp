#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "lcl/cycles.hpp"
#include "lcl/flow.hpp"
#include "lcl/random.hpp"
#include "lcl/solve.hpp"
#include "lcl/tree.hpp"
#include "lcl/work.hpp"

namespace lcl {

namespace detail {

// Sum of stretch weights of the fundamental prefix.
inline double fundamental_mass(const CycleSet& cs) {
  double tau = 0.0;
  for (std::size_t i = 0; i < cs.fundamental_count; ++i) tau += cs.weights[i];
  return tau;
}

inline std::uint64_t default_drk_cap(const CycleSet& cs) {
  const double tau = std::max(1.0, cs.fundamental_count > 0 ? fundamental_mass(cs) : cs.total_weight());
  return static_cast<std::uint64_t>(std::ceil(1e4 * tau));
}

}  // namespace detail

// Dual randomized Kaczmarz: repeatedly project onto a cycle drawn with
// probability proportional to its weight, starting from the tree flow.
// Convergence is tested every check_interval updates (default: one pass worth
// of updates, |cycle set|) on the tree-induced potentials.
inline SolveReport drk_solve(const Graph& g, const SpanningTree& t, const CycleSet& cs, std::span<const double> b,
                             const SolveConfig& cfg) {
  cfg.validate(g.num_vertices());
  SolveReport report;
  report.spanning_warning = !cs.spans;

  FlowState state = init_tree_flow(g, t, b);
  auto converged = [&] {
    const auto v = recover_potentials(state);
    return detail::criterion(g, v, b, cfg) <= cfg.tolerance;
  };

  report.converged = converged();
  if (!report.converged && !cs.empty()) {
    const Sampler sampler(cs);
    Rng rng(cfg.seed);
    const std::size_t interval = cfg.check_interval ? cfg.check_interval : cs.size();
    const std::uint64_t cap = cfg.max_iterations ? cfg.max_iterations : detail::default_drk_cap(cs);
    std::vector<MetricArray> costs;
    costs.reserve(cs.size());
    for (const Cycle& c : cs.cycles) costs.push_back(cycle_costs(c, g.num_vertices()));

    while (report.work.iterations < cap) {
      const std::size_t pick = sampler.draw(rng.uniform());
      cycle_project(state, cs.cycles[pick]);
      report.work.charge_step(costs[pick]);
      if (report.work.iterations % interval == 0 && converged()) {
        report.converged = true;
        break;
      }
    }
  }
  report.iterations = report.work.iterations;
  detail::finalize(report, g, recover_potentials(state), b, cfg);
  return report;
}

// Deterministic sweeps over a facial cycle set. Each sweep visits levels from
// finest to coarsest, and within a level all color-0 cycles before all
// color-1 cycles. Same-level same-color cycles are edge-disjoint, so each such
// half-sweep adds only its costliest cycle to the parallel-step tally.
// Iterations count sweeps; convergence is checked every check_interval sweeps
// (default 1).
inline SolveReport facial_sweep_solve(const Graph& g, const CycleSet& cs, std::span<const double> b,
                                      const SolveConfig& cfg) {
  cfg.validate(g.num_vertices());
  if (cs.empty()) throw std::invalid_argument("facial sweep needs a nonempty cycle set");
  for (const Cycle& c : cs.cycles) {
    if (c.kind != CycleKind::Facial) throw std::invalid_argument("facial sweep needs a facial cycle set");
  }

  // (level, color) groups in sweep order
  int max_level = 0;
  for (const Cycle& c : cs.cycles) max_level = std::max(max_level, c.level);
  std::vector<std::vector<std::size_t>> groups(2 * static_cast<std::size_t>(max_level + 1));
  for (std::size_t i = 0; i < cs.size(); ++i) {
    groups[2 * static_cast<std::size_t>(cs.cycles[i].level) + static_cast<std::size_t>(cs.cycles[i].color)]
        .push_back(i);
  }
  std::erase_if(groups, [](const auto& group) { return group.empty(); });

  const SpanningTree tree = bfs_tree(g);
  FlowState state = init_tree_flow(g, tree, b);
  SolveReport report;
  report.spanning_warning = !cs.spans;
  auto converged = [&] {
    const auto v = recover_potentials(state);
    return detail::criterion(g, v, b, cfg) <= cfg.tolerance;
  };

  const std::size_t interval = cfg.check_interval ? cfg.check_interval : 1;
  const std::uint64_t cap = cfg.max_iterations ? cfg.max_iterations : 10'000;
  report.converged = converged();
  while (!report.converged && report.work.iterations < cap) {
    for (const auto& group : groups) {
      MetricArray widest{};
      for (std::size_t i : group) {
        cycle_project(state, cs.cycles[i]);
        const MetricArray cost = cycle_costs(cs.cycles[i], g.num_vertices());
        report.work.charge(0, cost);
        for (std::size_t k = 0; k < kNumMetrics; ++k) widest[k] = std::max(widest[k], cost[k]);
      }
      for (std::size_t k = 0; k < kNumMetrics; ++k) report.work.parallel_steps[k] += widest[k];
    }
    ++report.work.iterations;
    if (report.work.iterations % interval == 0) report.converged = converged();
  }
  report.iterations = report.work.iterations;
  detail::finalize(report, g, recover_potentials(state), b, cfg);
  return report;
}

}  // namespace lcl
