// lcl: experiment driver for the Laplacian solver lab.
//
//   lcl run --config exp.cfg [overrides...]
//   lcl stats --graph grid2d:50x50
//   lcl ratio --baseline pcg --in results.csv
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "lcl/harness.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kIoError = 3;

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw lcl::io_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw lcl::io_error("failed writing '" + path + "'");
}

void print_summary(const std::vector<lcl::ResultRow>& rows, const std::string& metric) {
  std::vector<int> metrics;
  if (metric == "all") metrics = {1, 2, 3, 4};
  else metrics = {std::stoi(metric)};
  for (const auto& r : rows) {
    std::cerr << r.solver << ' ' << r.cycles << " p=" << r.threads << " seed=" << r.seed
              << (r.converged ? " converged" : " NOT converged") << " iterations=" << r.iterations;
    for (int k : metrics) {
      std::cerr << " work_m" << k << '=' << r.work[static_cast<std::size_t>(k - 1)] << " psteps_m" << k << '='
                << r.psteps[static_cast<std::size_t>(k - 1)];
    }
    std::cerr << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laplacian solver lab: dual/primal randomized Kaczmarz, Jacobi-PCG, simulated parallel cycle updates"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run an experiment grid and emit CSV rows");
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string metric = "all";
  bool quiet = false;
  run->add_option("--config", config_path, "flat key=value experiment file");
  auto override_option = [&](const std::string& flag, const std::string& key, const std::string& help) {
    run->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& value) { overrides.emplace_back(key, value); }, help);
  };
  override_option("--graph", "graph", "graph source: file.mtx, grid2d:WxH or grid3d:WxHxD");
  override_option("--tree", "tree", "degree-sum | h-tree | bfs");
  override_option("--tree-order", "tree_order", "descending | ascending degree-sum ranking");
  override_option("--cycles", "cycles", "comma list of fundamental | fundamental+greedy | facial[:levels]");
  override_option("--greedy-budget", "greedy_budget", "truncated BFS edge budget (default 20)");
  override_option("--solver", "solvers", "comma list of drk | prk | pcg | facial-sweep");
  override_option("--threads", "threads", "thread count or comma list, e.g. 1,2,4,8,16,32");
  override_option("--seed", "seeds", "seed or comma list of seeds");
  override_option("--tol", "tol", "convergence tolerance (default 1e-3)");
  override_option("--mode", "mode", "residual | actual");
  override_option("--max-iter", "max_iter", "iteration cap (0: solver default)");
  override_option("--check-interval", "check_interval", "iterations between convergence checks (0: default)");
  override_option("--out", "output", "CSV output path (default stdout)");
  run->add_flag_function(
      "--unweighted", [&overrides](std::int64_t) { overrides.emplace_back("unweighted", "true"); },
      "force all edge weights to 1");
  run->add_option("--metric", metric, "metric to summarize on stderr: 1|2|3|4|all")
      ->check(CLI::IsMember({"1", "2", "3", "4", "all"}));
  run->add_flag("--quiet", quiet, "no stderr summary");

  // stats
  auto* stats = app.add_subcommand("stats", "print graph statistics as CSV");
  std::string stats_graph;
  std::string stats_tree = "degree-sum";
  std::string stats_order = "descending";
  std::size_t stats_budget = 20;
  bool stats_unweighted = false;
  stats->add_option("--graph", stats_graph, "graph source")->required();
  stats->add_option("--tree", stats_tree, "degree-sum | h-tree | bfs")
      ->check(CLI::IsMember({"degree-sum", "h-tree", "bfs"}));
  stats->add_option("--tree-order", stats_order, "descending | ascending")
      ->check(CLI::IsMember({"descending", "ascending"}));
  stats->add_option("--greedy-budget", stats_budget, "truncated BFS edge budget")->check(CLI::PositiveNumber);
  stats->add_flag("--unweighted", stats_unweighted, "force all edge weights to 1");

  // ratio
  auto* ratio = app.add_subcommand("ratio", "DRK work relative to a baseline solver, per metric");
  std::string baseline = "pcg";
  std::string ratio_in;
  std::string ratio_out;
  ratio->add_option("--baseline", baseline, "baseline solver")->check(CLI::IsMember({"pcg", "prk"}));
  ratio->add_option("--in", ratio_in, "result CSV from lcl run")->required();
  ratio->add_option("--out", ratio_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) {
      lcl::ExperimentConfig cfg = config_path.empty() ? lcl::ExperimentConfig{} : lcl::load_config(config_path);
      for (const auto& [key, value] : overrides) cfg.set(key, value);
      const auto rows = lcl::run_experiment(cfg);
      write_output(cfg.output, lcl::emit_csv(rows));
      if (!quiet) print_summary(rows, metric);
    } else if (*stats) {
      const auto lg = lcl::load_graph(stats_graph, stats_unweighted);
      const auto order = stats_order == "ascending" ? lcl::DegreeOrder::Ascending : lcl::DegreeOrder::Descending;
      const auto row = lcl::graph_stats(lg, stats_tree, order, stats_budget);
      std::cout << lcl::kStatsHeader << '\n' << lcl::to_csv_line(row) << '\n';
    } else if (*ratio) {
      std::ifstream in(ratio_in);
      if (!in) throw lcl::io_error("cannot open '" + ratio_in + "'");
      const auto rows = lcl::parse_csv(in);
      write_output(ratio_out, lcl::emit_ratio_csv(lcl::work_ratio_report(rows, baseline)));
    }
  } catch (const lcl::config_error& e) {
    std::cerr << "lcl: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const lcl::io_error& e) {
    std::cerr << "lcl: I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "lcl: invalid input: " << e.what() << '\n';
    return kConfigError;
  }
  return 0;
}
