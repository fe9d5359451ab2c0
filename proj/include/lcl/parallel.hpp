#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lcl/cycles.hpp"
#include "lcl/drk.hpp"
#include "lcl/flow.hpp"
#include "lcl/random.hpp"
#include "lcl/solve.hpp"
#include "lcl/work.hpp"

namespace lcl {

// Outcome of one simulated round: the cycle each thread updates, or nothing
// for a thread that went idle.
struct RoundSelection {
  std::vector<std::optional<std::size_t>> assignment;
  std::size_t idle = 0;

  std::vector<std::size_t> accepted() const {
    std::vector<std::size_t> out;
    for (const auto& a : assignment) {
      if (a) out.push_back(*a);
    }
    return out;
  }
};

// Marks edges claimed in the current round. Reused across rounds so conflict
// checks cost only the drawn cycles' lengths.
class EdgeClaims {
 public:
  explicit EdgeClaims(std::size_t num_edges) : stamp_(num_edges, 0) {}

  void next_round() { ++round_; }

  bool available(const Cycle& c) const {
    return std::none_of(c.edges.begin(), c.edges.end(),
                        [&](const SignedEdge& e) { return stamp_[e.edge] == round_; });
  }

  void claim(const Cycle& c) {
    for (const SignedEdge& e : c.edges) stamp_[e.edge] = round_;
  }

 private:
  std::vector<std::uint64_t> stamp_;
  std::uint64_t round_ = 1;
};

// Given each thread's draw in thread order, lower thread indices win: a draw
// sharing an edge with an earlier accepted draw leaves its thread idle.
inline RoundSelection resolve_conflicts(const CycleSet& cs, std::span<const std::size_t> draws, EdgeClaims& claims) {
  claims.next_round();
  RoundSelection out;
  out.assignment.reserve(draws.size());
  for (std::size_t pick : draws) {
    const Cycle& c = cs.cycles[pick];
    if (claims.available(c)) {
      claims.claim(c);
      out.assignment.emplace_back(pick);
    } else {
      out.assignment.emplace_back(std::nullopt);
      ++out.idle;
    }
  }
  return out;
}

inline RoundSelection resolve_conflicts(const CycleSet& cs, std::span<const std::size_t> draws) {
  std::size_t edges = 0;
  for (const Cycle& c : cs.cycles) {
    for (const SignedEdge& e : c.edges) edges = std::max<std::size_t>(edges, e.edge + 1);
  }
  EdgeClaims claims(edges);
  return resolve_conflicts(cs, draws, claims);
}

// Every thread draws from the unconditioned distribution, in thread order,
// from the one shared stream.
inline RoundSelection select_round(const Sampler& sampler, const CycleSet& cs, std::size_t threads, Rng& rng,
                                   EdgeClaims& claims) {
  if (threads == 0) throw std::invalid_argument("need at least one thread");
  std::vector<std::size_t> draws(threads);
  for (std::size_t& d : draws) d = sampler.draw(rng.uniform());
  return resolve_conflicts(cs, draws, claims);
}

struct SimReport {
  SolveReport solve;
  std::size_t threads = 1;

  // Parallel steps under one metric.
  std::uint64_t span(CostMetric m) const { return solve.work.steps(m); }
};

// Simulated parallel DRK. Each iteration is one synchronized round: accepted
// cycles are edge-disjoint, so their projections commute and are applied in
// thread order. The owner of each accepted cycle is charged its cost; idle
// threads are charged nothing. Convergence is checked every check_interval
// rounds (default |cycle set| / threads). The ledger counts rounds; the
// report's iterations count accepted cycle updates.
inline SimReport parallel_drk_simulate(const Graph& g, const SpanningTree& t, const CycleSet& cs,
                                       std::span<const double> b, std::size_t threads, const SolveConfig& cfg) {
  if (threads == 0) throw std::invalid_argument("need at least one thread");
  cfg.validate(g.num_vertices());
  SimReport sim;
  sim.threads = threads;
  SolveReport& report = sim.solve;
  report.work = WorkLedger(threads);
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
    EdgeClaims claims(g.num_edges());
    const std::size_t interval = cfg.check_interval ? cfg.check_interval : std::max<std::size_t>(1, cs.size() / threads);
    const std::uint64_t cap = cfg.max_iterations ? cfg.max_iterations : detail::default_drk_cap(cs);
    std::vector<MetricArray> costs;
    costs.reserve(cs.size());
    for (const Cycle& c : cs.cycles) costs.push_back(cycle_costs(c, g.num_vertices()));

    WorkLedger& ledger = report.work;
    while (ledger.iterations < cap) {
      const RoundSelection round = select_round(sampler, cs, threads, rng, claims);
      MetricArray widest{};
      for (std::size_t thread = 0; thread < threads; ++thread) {
        const auto& pick = round.assignment[thread];
        if (!pick) continue;
        cycle_project(state, cs.cycles[*pick]);
        ledger.charge(thread, costs[*pick]);
        for (std::size_t k = 0; k < kNumMetrics; ++k) widest[k] = std::max(widest[k], costs[*pick][k]);
      }
      for (std::size_t k = 0; k < kNumMetrics; ++k) ledger.parallel_steps[k] += widest[k];
      ledger.idle_events += round.idle;
      ++ledger.iterations;
      if (ledger.iterations % interval == 0 && converged()) {
        report.converged = true;
        break;
      }
    }
  }
  // cycle updates, as for sequential DRK; rounds stay in the ledger
  report.iterations = report.work.work(CostMetric::Unit);
  detail::finalize(report, g, recover_potentials(state), b, cfg);
  return sim;
}

struct SpeedupRow {
  std::size_t threads = 1;
  std::array<double, kNumMetrics> speedup{};
};

// Sequential (one-thread) total work over parallel steps at p threads, per
// metric.
inline std::vector<SpeedupRow> speedup_table(std::span<const SimReport> reports) {
  const auto baseline = std::find_if(reports.begin(), reports.end(), [](const SimReport& r) { return r.threads == 1; });
  if (baseline == reports.end()) throw std::invalid_argument("speedup needs a one-thread baseline");
  std::vector<SpeedupRow> rows;
  for (const SimReport& r : reports) {
    SpeedupRow row{r.threads, {}};
    for (std::size_t k = 0; k < kNumMetrics; ++k) {
      const auto steps = static_cast<double>(r.solve.work.parallel_steps[k]);
      const auto sequential = static_cast<double>(baseline->solve.work.total[k]);
      row.speedup[k] = steps == 0.0 ? 1.0 : sequential / steps;
    }
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const SpeedupRow& a, const SpeedupRow& b) { return a.threads < b.threads; });
  return rows;
}

}  // namespace lcl
