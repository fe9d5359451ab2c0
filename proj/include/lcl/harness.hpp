#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lcl/cycles.hpp"
#include "lcl/drk.hpp"
#include "lcl/graph.hpp"
#include "lcl/parallel.hpp"
#include "lcl/pcg.hpp"
#include "lcl/prk.hpp"
#include "lcl/random.hpp"
#include "lcl/solve.hpp"
#include "lcl/tree.hpp"
#include "lcl/work.hpp"

namespace lcl {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  if (!(in >> value) || !(in >> std::ws).eof()) {
    throw config_error("invalid value '" + text + "' for " + key);
  }
  return value;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw config_error("invalid boolean '" + text + "' for " + key);
}

inline std::string format_float(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct CycleChoice {
  enum class Kind { Fundamental, FundamentalGreedy, Facial } kind = Kind::Fundamental;
  int levels = 0;  // facial: coarsest level

  static CycleChoice parse(const std::string& text) {
    if (text == "fundamental") return {Kind::Fundamental, 0};
    if (text == "fundamental+greedy") return {Kind::FundamentalGreedy, 0};
    if (text == "facial") return {Kind::Facial, 0};
    if (text.rfind("facial:", 0) == 0) {
      const int levels = detail::parse_number<int>("cycles", text.substr(7));
      if (levels < 0) throw config_error("facial level must be non-negative");
      return {Kind::Facial, levels};
    }
    throw config_error("unknown cycle set '" + text + "'");
  }

  std::string name() const {
    switch (kind) {
      case Kind::Fundamental: return "fundamental";
      case Kind::FundamentalGreedy: return "fundamental+greedy";
      case Kind::Facial: return "facial:" + std::to_string(levels);
    }
    return "unknown";
  }
};

inline const std::vector<std::string>& known_solvers() {
  static const std::vector<std::string> names{"drk", "prk", "pcg", "facial-sweep"};
  return names;
}

struct ExperimentConfig {
  std::string graph;  // .mtx path, grid2d:WxH or grid3d:WxHxD
  bool unweighted = false;
  std::string tree = "degree-sum";  // degree-sum | h-tree | bfs
  DegreeOrder tree_order = DegreeOrder::Descending;
  std::vector<CycleChoice> cycles{CycleChoice{}};
  std::size_t greedy_budget = 20;
  std::vector<std::string> solvers{"drk"};
  std::vector<std::size_t> threads{1};
  std::vector<std::uint64_t> seeds{0};
  double tolerance = 1e-3;
  ConvergenceMode mode = ConvergenceMode::Residual;
  std::size_t check_interval = 0;
  std::uint64_t max_iterations = 0;
  std::string output;  // empty: standard output

  void set(const std::string& key, const std::string& value) {
    if (key == "graph") {
      graph = value;
    } else if (key == "unweighted") {
      unweighted = detail::parse_bool(key, value);
    } else if (key == "tree") {
      if (value != "degree-sum" && value != "h-tree" && value != "bfs") throw config_error("unknown tree '" + value + "'");
      tree = value;
    } else if (key == "tree_order") {
      if (value == "descending") tree_order = DegreeOrder::Descending;
      else if (value == "ascending") tree_order = DegreeOrder::Ascending;
      else throw config_error("tree_order must be descending or ascending");
    } else if (key == "cycles") {
      cycles.clear();
      for (const auto& item : detail::split(value, ',')) cycles.push_back(CycleChoice::parse(item));
    } else if (key == "greedy_budget") {
      greedy_budget = detail::parse_number<std::size_t>(key, value);
    } else if (key == "solvers" || key == "solver") {
      solvers = detail::split(value, ',');
      for (const auto& s : solvers) {
        if (std::find(known_solvers().begin(), known_solvers().end(), s) == known_solvers().end()) {
          throw config_error("unknown solver '" + s + "'");
        }
      }
    } else if (key == "threads") {
      threads.clear();
      for (const auto& item : detail::split(value, ',')) threads.push_back(detail::parse_number<std::size_t>(key, item));
    } else if (key == "seeds" || key == "seed") {
      seeds.clear();
      for (const auto& item : detail::split(value, ',')) seeds.push_back(detail::parse_number<std::uint64_t>(key, item));
    } else if (key == "tol" || key == "tolerance") {
      tolerance = detail::parse_number<double>(key, value);
    } else if (key == "mode") {
      if (value == "residual") mode = ConvergenceMode::Residual;
      else if (value == "actual") mode = ConvergenceMode::ActualError;
      else throw config_error("mode must be residual or actual");
    } else if (key == "check_interval") {
      check_interval = detail::parse_number<std::size_t>(key, value);
    } else if (key == "max_iter" || key == "max_iterations") {
      max_iterations = detail::parse_number<std::uint64_t>(key, value);
    } else if (key == "output") {
      output = value;
    } else {
      throw config_error("unknown config key '" + key + "'");
    }
  }

  void validate() const {
    if (graph.empty()) throw config_error("no graph given");
    if (solvers.empty()) throw config_error("at least one solver is required");
    if (seeds.empty()) throw config_error("at least one seed is required");
    if (threads.empty() || std::find(threads.begin(), threads.end(), 0) != threads.end()) {
      throw config_error("thread counts must be positive");
    }
    if (cycles.empty()) throw config_error("at least one cycle set is required");
    if (!(tolerance > 0.0)) throw config_error("tolerance must be positive");
    if (greedy_budget == 0) throw config_error("greedy budget must be positive");
  }
};

// Flat key=value lines; '#' starts a comment.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = detail::trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw config_error("line " + std::to_string(lineno) + ": expected key=value");
    cfg.set(detail::trim(text.substr(0, eq)), detail::trim(text.substr(eq + 1)));
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config '" + path + "'");
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// Graph sources
// ---------------------------------------------------------------------------

struct LoadedGraph {
  std::string name;
  Graph original;
  Graph core;  // largest connected component of the 2-core
  std::optional<GridDims> dims;  // when core is a generated grid
};

inline std::optional<GridDims> parse_grid_source(const std::string& source) {
  std::size_t axes = 0;
  if (source.rfind("grid2d:", 0) == 0) axes = 2;
  else if (source.rfind("grid3d:", 0) == 0) axes = 3;
  else return std::nullopt;
  GridDims dims;
  for (const auto& side : detail::split(source.substr(7), 'x')) {
    dims.sides.push_back(detail::parse_number<std::size_t>("graph", side));
  }
  if (dims.size() != axes) throw config_error("grid source '" + source + "' has the wrong number of sides");
  for (std::size_t s : dims.sides) {
    if (s < 2) throw config_error("grid sides must be at least 2");
  }
  return dims;
}

inline LoadedGraph load_graph(const std::string& source, bool unweighted = false) {
  LoadedGraph out;
  if (auto dims = parse_grid_source(source)) {
    out.name = source;
    out.original = grid_graph(*dims);
    out.dims = dims;
  } else {
    std::ifstream in(source);
    if (!in) throw io_error("cannot open graph '" + source + "'");
    try {
      out.original = parse_matrix_market(in, unweighted);
    } catch (const parse_error& e) {
      throw io_error(source + ": " + e.what());
    }
    out.name = std::filesystem::path(source).stem().string();
    std::replace(out.name.begin(), out.name.end(), ',', '_');
  }
  auto pruned = prune_two_core(out.original);
  if (out.dims && pruned.graph.num_vertices() != out.original.num_vertices()) out.dims.reset();
  out.core = std::move(pruned.graph);
  return out;
}

struct TreeChoice {
  SpanningTree tree;
  std::string name;
};

// h-tree falls back to the degree-sum heuristic off square power-of-two grids.
inline TreeChoice build_tree(const LoadedGraph& lg, const std::string& kind, DegreeOrder order) {
  if (kind == "bfs") return {bfs_tree(lg.core), "bfs"};
  if (kind == "h-tree" && lg.dims) {
    try {
      return {h_tree(lg.core, *lg.dims), "h-tree"};
    } catch (const unsupported_dimension&) {
    }
  }
  return {degree_sum_tree(lg.core, order), kind == "h-tree" ? "degree-sum(fallback)" : "degree-sum"};
}

inline CycleSet build_cycles(const LoadedGraph& lg, const SpanningTree& t, const CycleChoice& choice,
                             std::size_t greedy_budget) {
  switch (choice.kind) {
    case CycleChoice::Kind::Fundamental: return fundamental_cycles(lg.core, t);
    case CycleChoice::Kind::FundamentalGreedy:
      return extend_cycle_set(fundamental_cycles(lg.core, t), local_greedy_cycles(lg.core, greedy_budget));
    case CycleChoice::Kind::Facial:
      if (!lg.dims || lg.dims->size() != 2) throw config_error("facial cycles need a grid2d graph");
      return facial_cycles(lg.core, *lg.dims, choice.levels);
  }
  return {};
}

struct Demand {
  std::vector<double> b;
  std::vector<double> reference;  // set in actual-error mode
};

// Residual mode: uniform entries on [-1, 1), mean removed. Actual-error mode:
// a centered uniform reference solution v* and b = L v*.
inline Demand make_demand(const Graph& g, std::uint64_t seed, ConvergenceMode mode) {
  Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<double> x(g.num_vertices());
  for (double& xi : x) xi = 2.0 * rng.uniform() - 1.0;
  x = mean_centered(x);
  if (mode == ConvergenceMode::Residual) return {std::move(x), {}};
  auto b = laplacian_apply(g, x);
  b = mean_centered(b);
  return {std::move(b), std::move(x)};
}

// ---------------------------------------------------------------------------
// Result rows
// ---------------------------------------------------------------------------

struct ResultRow {
  std::string graph;
  std::size_t n = 0;
  std::size_t m = 0;
  std::string solver;
  std::string tree;
  std::string cycles;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  std::string mode;
  double tol = 0.0;
  bool converged = false;
  std::uint64_t iterations = 0;
  MetricArray work{};
  MetricArray psteps{};
  double final_residual = 0.0;
  std::optional<double> final_error;
  std::uint64_t idle_events = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr std::string_view kResultHeader =
    "graph,n,m,solver,tree,cycles,threads,seed,mode,tol,converged,iterations,work_m1,work_m2,work_m3,work_m4,"
    "psteps_m1,psteps_m2,psteps_m3,psteps_m4,final_residual,final_error,idle_events";

inline std::string to_csv_line(const ResultRow& r) {
  std::ostringstream out;
  out << r.graph << ',' << r.n << ',' << r.m << ',' << r.solver << ',' << r.tree << ',' << r.cycles << ','
      << r.threads << ',' << r.seed << ',' << r.mode << ',' << detail::format_float(r.tol) << ','
      << (r.converged ? "true" : "false") << ',' << r.iterations;
  for (auto w : r.work) out << ',' << w;
  for (auto p : r.psteps) out << ',' << p;
  out << ',' << detail::format_float(r.final_residual) << ','
      << (r.final_error ? detail::format_float(*r.final_error) : "") << ',' << r.idle_events;
  return out.str();
}

inline std::string emit_csv(std::span<const ResultRow> rows) {
  std::string out(kResultHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += to_csv_line(r);
    out += '\n';
  }
  return out;
}

inline std::vector<ResultRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kResultHeader) {
    throw config_error("result CSV header does not match the expected schema");
  }
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 23) throw config_error("line " + std::to_string(lineno) + ": expected 23 fields");
    ResultRow r;
    r.graph = f[0];
    r.n = detail::parse_number<std::size_t>("n", f[1]);
    r.m = detail::parse_number<std::size_t>("m", f[2]);
    r.solver = f[3];
    r.tree = f[4];
    r.cycles = f[5];
    r.threads = detail::parse_number<std::size_t>("threads", f[6]);
    r.seed = detail::parse_number<std::uint64_t>("seed", f[7]);
    r.mode = f[8];
    r.tol = detail::parse_number<double>("tol", f[9]);
    r.converged = detail::parse_bool("converged", f[10]);
    r.iterations = detail::parse_number<std::uint64_t>("iterations", f[11]);
    for (std::size_t k = 0; k < kNumMetrics; ++k) {
      r.work[k] = detail::parse_number<std::uint64_t>("work", f[12 + k]);
      r.psteps[k] = detail::parse_number<std::uint64_t>("psteps", f[16 + k]);
    }
    r.final_residual = f[20] == "inf" ? std::numeric_limits<double>::infinity()
                                      : detail::parse_number<double>("final_residual", f[20]);
    if (!f[21].empty()) r.final_error = detail::parse_number<double>("final_error", f[21]);
    r.idle_events = detail::parse_number<std::uint64_t>("idle_events", f[22]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

inline ResultRow make_row(const LoadedGraph& lg, const std::string& solver, const std::string& tree,
                          const std::string& cycles, std::size_t threads, const ExperimentConfig& cfg,
                          std::uint64_t seed, const SolveReport& report) {
  ResultRow r;
  r.graph = lg.name;
  r.n = lg.core.num_vertices();
  r.m = lg.core.num_edges();
  r.solver = solver;
  r.tree = tree;
  r.cycles = cycles;
  r.threads = threads;
  r.seed = seed;
  r.mode = std::string(to_string(cfg.mode));
  r.tol = cfg.tolerance;
  r.converged = report.converged;
  r.iterations = report.iterations;
  r.work = report.work.total;
  r.psteps = report.work.parallel_steps;
  r.final_residual = report.final_residual;
  r.final_error = report.final_error;
  r.idle_events = report.work.idle_events;
  // what the CSV will hold, so emitted rows and parsed rows agree
  return parse_csv(emit_csv(std::span<const ResultRow>(&r, 1))).front();
}

// One row per (solver, cycle set, thread count, seed) for DRK; the facial
// sweep takes one row per facial cycle set and seed; PRK and PCG one row per
// seed. Rows come out in that canonical order; non-converged runs are
// reported, not fatal.
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const LoadedGraph lg = load_graph(cfg.graph, cfg.unweighted);
  if (lg.core.num_vertices() == 0) throw config_error("graph '" + cfg.graph + "' has an empty 2-core");

  std::vector<ResultRow> rows;
  std::optional<TreeChoice> tree;
  auto tree_for_drk = [&]() -> const TreeChoice& {
    if (!tree) tree = build_tree(lg, cfg.tree, cfg.tree_order);
    return *tree;
  };
  auto solve_config = [&](std::uint64_t seed, const Demand& d) {
    SolveConfig sc;
    sc.tolerance = cfg.tolerance;
    sc.mode = cfg.mode;
    sc.check_interval = cfg.check_interval;
    sc.max_iterations = cfg.max_iterations;
    sc.seed = seed;
    sc.reference = d.reference;
    return sc;
  };

  for (const std::string& solver : cfg.solvers) {
    if (solver == "drk") {
      const TreeChoice& tc = tree_for_drk();
      for (const CycleChoice& choice : cfg.cycles) {
        const CycleSet cs = build_cycles(lg, tc.tree, choice, cfg.greedy_budget);
        for (std::size_t threads : cfg.threads) {
          for (std::uint64_t seed : cfg.seeds) {
            const Demand d = make_demand(lg.core, seed, cfg.mode);
            const SolveConfig sc = solve_config(seed, d);
            const SolveReport report = threads == 1
                                           ? drk_solve(lg.core, tc.tree, cs, d.b, sc)
                                           : parallel_drk_simulate(lg.core, tc.tree, cs, d.b, threads, sc).solve;
            rows.push_back(make_row(lg, solver, tc.name, choice.name(), threads, cfg, seed, report));
          }
        }
      }
    } else if (solver == "facial-sweep") {
      std::vector<CycleChoice> facial;
      std::copy_if(cfg.cycles.begin(), cfg.cycles.end(), std::back_inserter(facial),
                   [](const CycleChoice& c) { return c.kind == CycleChoice::Kind::Facial; });
      if (facial.empty()) facial.push_back({CycleChoice::Kind::Facial, 0});
      for (const CycleChoice& choice : facial) {
        const CycleSet cs = build_cycles(lg, SpanningTree{}, choice, cfg.greedy_budget);
        for (std::uint64_t seed : cfg.seeds) {
          const Demand d = make_demand(lg.core, seed, cfg.mode);
          const SolveReport report = facial_sweep_solve(lg.core, cs, d.b, solve_config(seed, d));
          rows.push_back(make_row(lg, solver, "bfs", choice.name(), 1, cfg, seed, report));
        }
      }
    } else {
      for (std::uint64_t seed : cfg.seeds) {
        const Demand d = make_demand(lg.core, seed, cfg.mode);
        const SolveConfig sc = solve_config(seed, d);
        const SolveReport report = solver == "prk" ? prk_solve(lg.core, d.b, sc) : pcg_solve(lg.core, d.b, sc);
        rows.push_back(make_row(lg, solver, "-", "-", 1, cfg, seed, report));
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Work ratios
// ---------------------------------------------------------------------------

struct RatioRow {
  std::string graph;
  std::uint64_t seed = 0;
  std::string mode;
  std::string cycles;
  std::size_t threads = 1;
  int metric = 1;
  std::uint64_t drk_work = 0;
  std::uint64_t baseline_work = 0;
  double ratio = 0.0;
};

inline constexpr std::string_view kRatioHeader = "graph,seed,mode,cycles,threads,metric,drk_work,baseline_work,ratio";

// DRK work over baseline work per metric, pairing every DRK row with the
// baseline row of the same graph, seed, mode and tolerance.
inline std::vector<RatioRow> work_ratio_report(std::span<const ResultRow> rows, const std::string& baseline) {
  std::vector<RatioRow> out;
  for (const ResultRow& r : rows) {
    if (r.solver != "drk") continue;
    const auto match = std::find_if(rows.begin(), rows.end(), [&](const ResultRow& b) {
      return b.solver == baseline && b.graph == r.graph && b.seed == r.seed && b.mode == r.mode && b.tol == r.tol;
    });
    if (match == rows.end()) {
      throw config_error("no " + baseline + " row for graph " + r.graph + " seed " + std::to_string(r.seed));
    }
    for (std::size_t k = 0; k < kNumMetrics; ++k) {
      RatioRow q{r.graph, r.seed, r.mode, r.cycles, r.threads, static_cast<int>(k + 1), r.work[k], match->work[k], 0.0};
      q.ratio = q.baseline_work == 0 ? std::numeric_limits<double>::infinity()
                                     : static_cast<double>(q.drk_work) / static_cast<double>(q.baseline_work);
      out.push_back(std::move(q));
    }
  }
  return out;
}

inline std::string emit_ratio_csv(std::span<const RatioRow> rows) {
  std::ostringstream out;
  out << kRatioHeader << '\n';
  for (const auto& q : rows) {
    out << q.graph << ',' << q.seed << ',' << q.mode << ',' << q.cycles << ',' << q.threads << ',' << q.metric << ','
        << q.drk_work << ',' << q.baseline_work << ',' << detail::format_float(q.ratio) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Graph statistics
// ---------------------------------------------------------------------------

struct StatsRow {
  std::string graph;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t core_n = 0;
  std::size_t core_m = 0;
  std::size_t greedy_cycles = 0;
  double greedy_fraction = 0.0;
  std::size_t largest_cycle = 0;
};

inline constexpr std::string_view kStatsHeader =
    "graph,n,m,core_n,core_m,greedy_cycles,greedy_fraction,largest_cycle";

// `t` and `greedy` are built on `core`. The greedy fraction is the greedy
// share of sampling mass once the greedy cycles join the fundamental set.
inline StatsRow graph_stats(const std::string& name, const Graph& original, const Graph& core, const SpanningTree& t,
                            const CycleSet& greedy) {
  StatsRow s;
  s.graph = name;
  s.n = original.num_vertices();
  s.m = original.num_edges();
  s.core_n = core.num_vertices();
  s.core_m = core.num_edges();
  s.greedy_cycles = greedy.size();
  const CycleSet fundamental = fundamental_cycles(core, t);
  s.greedy_fraction = extend_cycle_set(fundamental, greedy).extra_weight_fraction();
  for (const Cycle& c : fundamental.cycles) s.largest_cycle = std::max(s.largest_cycle, c.length());
  return s;
}

inline StatsRow graph_stats(const LoadedGraph& lg, const std::string& tree, DegreeOrder order,
                            std::size_t greedy_budget) {
  if (lg.core.num_vertices() == 0) return graph_stats(lg.name, lg.original, lg.core, SpanningTree{}, CycleSet{});
  const TreeChoice tc = build_tree(lg, tree, order);
  return graph_stats(lg.name, lg.original, lg.core, tc.tree, local_greedy_cycles(lg.core, greedy_budget));
}

inline std::string to_csv_line(const StatsRow& s) {
  std::ostringstream out;
  out << s.graph << ',' << s.n << ',' << s.m << ',' << s.core_n << ',' << s.core_m << ',' << s.greedy_cycles << ','
      << detail::format_float(s.greedy_fraction) << ',' << s.largest_cycle;
  return out.str();
}

}  // namespace lcl
