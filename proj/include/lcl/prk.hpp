#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "lcl/graph.hpp"
#include "lcl/random.hpp"
#include "lcl/solve.hpp"

namespace lcl {

struct SparseRow {
  std::vector<VertexId> index;
  std::vector<double> value;

  double squared_norm() const {
    double s = 0.0;
    for (double a : value) s += a * a;
    return s;
  }
};

// Row v of L: the weighted degree on the diagonal, -w for each neighbor.
inline std::vector<SparseRow> laplacian_rows(const Graph& g) {
  std::vector<SparseRow> rows(g.num_vertices());
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    SparseRow& row = rows[v];
    row.index.push_back(v);
    row.value.push_back(g.weighted_degree(v));
    for (EdgeId e : g.incident(v)) {
      row.index.push_back(g.opposite(e, v));
      row.value.push_back(-g.edge(e).weight);
    }
  }
  return rows;
}

// x <- x + (b_i - <row, x>) / ||row||^2 * row
inline void kaczmarz_row_project(const SparseRow& row, double rhs, std::span<double> x) {
  const double norm = row.squared_norm();
  if (norm == 0.0) throw std::invalid_argument("cannot project onto a zero row");
  double dot = 0.0;
  for (std::size_t k = 0; k < row.index.size(); ++k) dot += row.value[k] * x[row.index[k]];
  const double scale = (rhs - dot) / norm;
  for (std::size_t k = 0; k < row.index.size(); ++k) x[row.index[k]] += scale * row.value[k];
}

// Primal randomized Kaczmarz. One sweep projects against every row of L in a
// fresh random order and costs nnz(L). Iterations count sweeps; convergence is
// checked every check_interval sweeps (default 1), capped at 10^4 sweeps.
inline SolveReport prk_solve(const Graph& g, std::span<const double> b, const SolveConfig& cfg) {
  cfg.validate(g.num_vertices());
  if (b.size() != g.num_vertices()) throw std::invalid_argument("demand length does not match vertex count");
  const auto rows = laplacian_rows(g);
  std::vector<double> x(g.num_vertices(), 0.0);
  std::vector<VertexId> order(g.num_vertices());
  Rng rng(cfg.seed);

  SolveReport report;
  auto converged = [&] { return detail::criterion(g, mean_centered(x), b, cfg) <= cfg.tolerance; };
  const std::size_t interval = cfg.check_interval ? cfg.check_interval : 1;
  const std::uint64_t cap = cfg.max_iterations ? cfg.max_iterations : 10'000;

  report.converged = converged();
  while (!report.converged && report.work.iterations < cap) {
    std::iota(order.begin(), order.end(), VertexId{0});
    rng.shuffle(std::span<VertexId>(order));
    for (VertexId i : order) kaczmarz_row_project(rows[i], b[i], x);
    report.work.charge_flat(g.laplacian_nnz());
    if (report.work.iterations % interval == 0) report.converged = converged();
  }
  report.iterations = report.work.iterations;
  detail::finalize(report, g, x, b, cfg);
  return report;
}

}  // namespace lcl
