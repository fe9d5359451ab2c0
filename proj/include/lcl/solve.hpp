#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lcl/graph.hpp"
#include "lcl/random.hpp"
#include "lcl/work.hpp"

namespace lcl {

enum class ConvergenceMode { Residual, ActualError };

inline std::string_view to_string(ConvergenceMode mode) {
  return mode == ConvergenceMode::Residual ? "residual" : "actual";
}

struct SolveConfig {
  double tolerance = 1e-3;
  ConvergenceMode mode = ConvergenceMode::Residual;
  // Between convergence checks, in the solver's own iteration unit; 0 picks
  // the solver default.
  std::size_t check_interval = 0;
  // 0 picks the solver default cap.
  std::uint64_t max_iterations = 0;
  std::uint64_t seed = 0;
  // Known solution, required in ActualError mode.
  std::vector<double> reference;

  void validate(std::size_t num_vertices) const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const bool has_reference = !reference.empty();
    if (has_reference != (mode == ConvergenceMode::ActualError)) {
      throw std::invalid_argument("a reference solution is required exactly in actual-error mode");
    }
    if (has_reference && reference.size() != num_vertices) {
      throw std::invalid_argument("reference solution length does not match vertex count");
    }
  }
};

enum class SolveStatus { Converged, MaxIterations, Breakdown };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::Breakdown: return "breakdown";
  }
  return "unknown";
}

struct SolveReport {
  bool converged = false;
  SolveStatus status = SolveStatus::MaxIterations;
  // cycle updates (DRK), sweeps (PRK, facial sweeps) or CG iterations
  std::uint64_t iterations = 0;
  double final_residual = 0.0;
  std::optional<double> final_error;
  WorkLedger work;
  // mean-centered potentials
  std::vector<double> solution;
  // the cycle set was not known to span the cycle space
  bool spanning_warning = false;
  std::string rng{Rng::kName};
  std::uint64_t seed = 0;
};

// Relative 2-norm distance between mean-centered v and mean-centered reference.
inline double actual_error(std::span<const double> v, std::span<const double> reference) {
  const auto cv = mean_centered(v);
  const auto cr = mean_centered(reference);
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < cv.size(); ++i) {
    diff += (cv[i] - cr[i]) * (cv[i] - cr[i]);
    ref += cr[i] * cr[i];
  }
  return ref == 0.0 ? std::sqrt(diff) : std::sqrt(diff / ref);
}

namespace detail {

// The quantity compared against the tolerance.
inline double criterion(const Graph& g, std::span<const double> v, std::span<const double> b,
                        const SolveConfig& cfg) {
  return cfg.mode == ConvergenceMode::Residual ? relative_residual(g, v, b) : actual_error(v, cfg.reference);
}

inline void finalize(SolveReport& report, const Graph& g, std::span<const double> v, std::span<const double> b,
                     const SolveConfig& cfg) {
  report.solution = mean_centered(v);
  report.final_residual = relative_residual(g, report.solution, b);
  if (!cfg.reference.empty()) report.final_error = actual_error(report.solution, cfg.reference);
  report.seed = cfg.seed;
  if (report.converged) report.status = SolveStatus::Converged;
}

}  // namespace detail
}  // namespace lcl
