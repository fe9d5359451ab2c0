#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "lcl/graph.hpp"
#include "lcl/solve.hpp"

namespace lcl {

// Jacobi-preconditioned CG on L with the last vertex grounded: its row and
// column are removed and its potential fixed at zero. Each iteration costs
// nnz(L) for the product plus n for the preconditioner. Convergence is judged
// on the embedded full-system solution every check_interval iterations
// (default 1), capped at 10 n iterations.
inline SolveReport pcg_solve(const Graph& g, std::span<const double> b, const SolveConfig& cfg) {
  cfg.validate(g.num_vertices());
  if (b.size() != g.num_vertices()) throw std::invalid_argument("demand length does not match vertex count");
  require_balanced(b);
  const std::size_t n = g.num_vertices();

  SolveReport report;
  std::vector<double> x(n, 0.0);  // x[n-1] stays 0
  auto converged = [&] { return detail::criterion(g, x, b, cfg) <= cfg.tolerance; };
  report.converged = converged();
  if (report.converged || n < 2) {
    report.converged = report.converged || n < 2;
    detail::finalize(report, g, x, b, cfg);
    return report;
  }

  const std::size_t reduced = n - 1;
  std::vector<double> inv_diag(reduced);
  for (VertexId v = 0; v < reduced; ++v) inv_diag[v] = 1.0 / g.weighted_degree(v);

  std::vector<double> r(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(reduced));
  std::vector<double> z(reduced), p(n, 0.0), ap(n);
  for (std::size_t i = 0; i < reduced; ++i) z[i] = inv_diag[i] * r[i];
  std::copy(z.begin(), z.end(), p.begin());
  double rz = 0.0;
  for (std::size_t i = 0; i < reduced; ++i) rz += r[i] * z[i];

  const std::size_t interval = cfg.check_interval ? cfg.check_interval : 1;
  const std::uint64_t cap = cfg.max_iterations ? cfg.max_iterations : 10 * static_cast<std::uint64_t>(n);
  while (report.work.iterations < cap) {
    laplacian_apply(g, p, ap);  // p[n-1] == 0, so rows 0..n-2 are the reduced product
    double pap = 0.0;
    for (std::size_t i = 0; i < reduced; ++i) pap += p[i] * ap[i];
    if (!(pap > 0.0) || !std::isfinite(pap) || rz == 0.0) {
      report.status = SolveStatus::Breakdown;
      break;
    }
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < reduced; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    report.work.charge_flat(g.laplacian_nnz() + n);
    if (report.work.iterations % interval == 0 && converged()) {
      report.converged = true;
      break;
    }
    double rz_next = 0.0;
    for (std::size_t i = 0; i < reduced; ++i) {
      z[i] = inv_diag[i] * r[i];
      rz_next += r[i] * z[i];
    }
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < reduced; ++i) p[i] = z[i] + beta * p[i];
  }
  report.iterations = report.work.iterations;
  detail::finalize(report, g, x, b, cfg);
  return report;
}

}  // namespace lcl
