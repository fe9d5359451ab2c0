#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "lcl/cycles.hpp"

namespace lcl {

// Cost models for one cycle update.
enum class CostMetric : std::size_t {
  EdgesTouched = 0,    // cycle length
  LogN = 1,            // ceil(log2 n), fast update structure
  LogCycleLength = 2,  // ceil(log2 length)
  Unit = 3,            // lower bound
};

inline constexpr std::size_t kNumMetrics = 4;
inline constexpr std::array<CostMetric, kNumMetrics> kAllMetrics{
    CostMetric::EdgesTouched, CostMetric::LogN, CostMetric::LogCycleLength, CostMetric::Unit};

using MetricArray = std::array<std::uint64_t, kNumMetrics>;

inline constexpr std::size_t index(CostMetric m) { return static_cast<std::size_t>(m); }

// Metric number as printed in reports, 1..4.
inline CostMetric metric_from_number(int number) {
  if (number < 1 || number > 4) throw std::invalid_argument("metric must be 1..4");
  return kAllMetrics[static_cast<std::size_t>(number - 1)];
}

inline std::uint64_t ceil_log2(std::uint64_t x) { return x <= 1 ? 0 : std::bit_width(x - 1); }

// Greedy cycles have no logarithmic update structure and are always charged
// their length under LogN.
inline std::uint64_t cycle_cost(const Cycle& c, std::size_t num_vertices, CostMetric metric) {
  const auto length = static_cast<std::uint64_t>(c.length());
  switch (metric) {
    case CostMetric::EdgesTouched: return length;
    case CostMetric::LogN: return c.kind == CycleKind::Greedy ? length : ceil_log2(num_vertices);
    case CostMetric::LogCycleLength: return ceil_log2(length);
    case CostMetric::Unit: return 1;
  }
  return 0;
}

inline MetricArray cycle_costs(const Cycle& c, std::size_t num_vertices) {
  MetricArray out{};
  for (CostMetric m : kAllMetrics) out[index(m)] = cycle_cost(c, num_vertices, m);
  return out;
}

// Cumulative work under every metric at once. `parallel_steps` sums, per
// iteration, the largest charge any single thread received.
struct WorkLedger {
  MetricArray total{};
  MetricArray parallel_steps{};
  std::vector<MetricArray> per_thread;
  std::uint64_t iterations = 0;
  std::uint64_t idle_events = 0;

  explicit WorkLedger(std::size_t threads = 1) : per_thread(threads, MetricArray{}) {}

  std::size_t threads() const { return per_thread.size(); }

  void charge(std::size_t thread, const MetricArray& cost) {
    for (std::size_t k = 0; k < kNumMetrics; ++k) {
      total[k] += cost[k];
      per_thread[thread][k] += cost[k];
    }
  }

  // One sequential step: a single thread does all of the iteration's work.
  void charge_step(const MetricArray& cost) {
    charge(0, cost);
    for (std::size_t k = 0; k < kNumMetrics; ++k) parallel_steps[k] += cost[k];
    ++iterations;
  }

  // Work that does not depend on the cycle cost model (matrix sweeps, CG
  // iterations) lands identically in every metric.
  void charge_flat(std::uint64_t units) { charge_step({units, units, units, units}); }

  std::uint64_t work(CostMetric m) const { return total[index(m)]; }
  std::uint64_t steps(CostMetric m) const { return parallel_steps[index(m)]; }
};

}  // namespace lcl
