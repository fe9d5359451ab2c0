#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "lcl/graph.hpp"
#include "lcl/tree.hpp"

namespace lcl {

enum class CycleKind { Fundamental, Facial, Greedy };

inline std::string_view to_string(CycleKind kind) {
  switch (kind) {
    case CycleKind::Fundamental: return "fundamental";
    case CycleKind::Facial: return "facial";
    case CycleKind::Greedy: return "greedy";
  }
  return "unknown";
}

struct Cycle {
  std::vector<SignedEdge> edges;
  double resistance = 0.0;
  CycleKind kind = CycleKind::Fundamental;
  int level = 0;
  int color = 0;

  std::size_t length() const { return edges.size(); }
};

inline Cycle make_cycle(const Graph& g, std::vector<SignedEdge> edges, CycleKind kind, int level = 0,
                        int color = 0) {
  Cycle c{std::move(edges), 0.0, kind, level, color};
  for (const SignedEdge& s : c.edges) c.resistance += g.resistance(s.edge);
  return c;
}

// Net signed incidence of every vertex; identically zero for a closed cycle.
inline std::vector<int> signed_incidence(const Graph& g, const Cycle& c) {
  std::vector<int> net(g.num_vertices(), 0);
  for (const SignedEdge& s : c.edges) {
    const Edge& e = g.edge(s.edge);
    net[e.u] += s.sign;
    net[e.v] -= s.sign;
  }
  return net;
}

struct CycleSet {
  std::vector<Cycle> cycles;
  std::vector<double> weights;
  // Set when the cycles provably span the cycle space.
  bool spans = false;
  // The first `fundamental_count` cycles came from a spanning tree.
  std::size_t fundamental_count = 0;

  std::size_t size() const { return cycles.size(); }
  bool empty() const { return cycles.empty(); }

  double total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

  // Share of sampling mass held by cycles beyond the fundamental prefix.
  double extra_weight_fraction() const {
    const double total = total_weight();
    if (total == 0.0) return 0.0;
    const double fundamental =
        std::accumulate(weights.begin(), weights.begin() + static_cast<std::ptrdiff_t>(fundamental_count), 0.0);
    return (total - fundamental) / total;
  }

  void add(Cycle c, double weight) {
    cycles.push_back(std::move(c));
    weights.push_back(weight);
  }
};

// One cycle per off-tree edge e: e forward, then the tree path closing it.
// Weighted by stretch R_e / r_e, so the weights sum to the tree condition
// number.
inline CycleSet fundamental_cycles(const Graph& g, const SpanningTree& t) {
  CycleSet cs;
  cs.spans = true;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (t.in_tree(e)) continue;
    std::vector<SignedEdge> edges{{e, 1}};
    const auto path = tree_path(t, g.edge(e).v, g.edge(e).u);
    edges.insert(edges.end(), path.begin(), path.end());
    Cycle c = make_cycle(g, std::move(edges), CycleKind::Fundamental);
    const double weight = c.resistance / g.resistance(e);
    cs.add(std::move(c), weight);
  }
  cs.fundamental_count = cs.size();
  return cs;
}

// Face-block boundaries of a 2D grid from grid_graph. Level l holds the
// boundaries of aligned 2^l x 2^l blocks of unit faces lying fully inside the
// grid, walked counterclockwise and colored like a checkerboard by block
// coordinates. Weighted by length.
inline CycleSet facial_cycles(const Graph& g, const GridDims& dims, int max_level = 0) {
  if (dims.size() != 2) throw std::invalid_argument("facial cycles need a 2D grid");
  if (g.num_vertices() != dims.num_vertices()) {
    throw std::invalid_argument("graph does not match grid dimensions");
  }
  const std::size_t width = dims[0];
  const std::size_t height = dims[1];
  auto id = [&](std::size_t x, std::size_t y) { return static_cast<VertexId>(x + width * y); };
  auto step = [&](std::size_t x0, std::size_t y0, std::size_t x1, std::size_t y1) {
    const VertexId a = id(x0, y0);
    const VertexId b = id(x1, y1);
    const auto e = g.find_edge(a, b);
    if (!e) throw std::invalid_argument("graph is not the expected grid");
    return SignedEdge{*e, g.edge(*e).u == a ? 1 : -1};
  };

  CycleSet cs;
  cs.spans = max_level >= 0;
  for (int level = 0; level <= max_level; ++level) {
    const std::size_t block = std::size_t{1} << level;
    const std::size_t blocks_x = (width - 1) / block;
    const std::size_t blocks_y = (height - 1) / block;
    for (std::size_t by = 0; by < blocks_y; ++by) {
      for (std::size_t bx = 0; bx < blocks_x; ++bx) {
        const std::size_t x0 = bx * block, y0 = by * block;
        const std::size_t x1 = x0 + block, y1 = y0 + block;
        std::vector<SignedEdge> edges;
        edges.reserve(4 * block);
        for (std::size_t x = x0; x < x1; ++x) edges.push_back(step(x, y0, x + 1, y0));
        for (std::size_t y = y0; y < y1; ++y) edges.push_back(step(x1, y, x1, y + 1));
        for (std::size_t x = x1; x > x0; --x) edges.push_back(step(x, y1, x - 1, y1));
        for (std::size_t y = y1; y > y0; --y) edges.push_back(step(x0, y, x0, y - 1));
        Cycle c = make_cycle(g, std::move(edges), CycleKind::Facial, level,
                             static_cast<int>((bx + by) % 2));
        const auto len = static_cast<double>(c.length());
        cs.add(std::move(c), len);
      }
    }
  }
  return cs;
}

// Breadth-first search from `from` to `to` in g without `excluded`, visiting
// incident edges in adjacency order. Every edge that discovers a new vertex
// (including the one reaching `to`) counts against the budget; the search
// gives up rather than explore more than `max_edges` of them. Returns the
// path from `from` to `to` as signed edges.
inline std::optional<std::vector<SignedEdge>> truncated_bfs(const Graph& g, EdgeId excluded, VertexId from,
                                                            VertexId to, std::size_t max_edges) {
  struct Visit {
    VertexId vertex;
    std::size_t via;  // index into `visits` of the predecessor
    EdgeId edge;
  };
  std::vector<Visit> visits{{from, 0, 0}};
  std::vector<VertexId> touched{from};
  // small searches: a linear scan of `touched` beats a per-call O(n) mark array
  auto seen = [&](VertexId v) { return std::find(touched.begin(), touched.end(), v) != touched.end(); };

  std::size_t explored = 0;
  for (std::size_t head = 0; head < visits.size(); ++head) {
    const VertexId v = visits[head].vertex;
    for (EdgeId e : g.incident(v)) {
      if (e == excluded) continue;
      const VertexId w = g.opposite(e, v);
      if (seen(w)) continue;
      if (explored == max_edges) return std::nullopt;
      ++explored;
      visits.push_back({w, head, e});
      touched.push_back(w);
      if (w == to) {
        std::vector<SignedEdge> path;
        for (std::size_t i = visits.size() - 1; i != 0; i = visits[i].via) {
          const Visit& step = visits[i];
          const VertexId prev = visits[step.via].vertex;
          path.push_back({step.edge, g.edge(step.edge).u == prev ? 1 : -1});
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
    }
  }
  return std::nullopt;
}

inline std::optional<std::vector<SignedEdge>> truncated_bfs(const Graph& g, EdgeId e, std::size_t max_edges) {
  return truncated_bfs(g, e, g.edge(e).u, g.edge(e).v, max_edges);
}

// Local greedy finder: every still-unmarked edge, in ascending id order, seeds
// a truncated BFS for a short cycle through it; a found cycle marks all of its
// edges. Searches run on the whole graph minus the seed edge, so cycles may
// share edges, but each one contains an edge no earlier cycle covers.
inline CycleSet local_greedy_cycles(const Graph& g, std::size_t max_edges = 20) {
  CycleSet cs;
  std::vector<bool> marked(g.num_edges(), false);
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (marked[e]) continue;
    const Edge& edge = g.edge(e);
    auto path = truncated_bfs(g, e, edge.v, edge.u, max_edges);
    if (!path) continue;
    std::vector<SignedEdge> edges{{e, 1}};
    edges.insert(edges.end(), path->begin(), path->end());
    for (const SignedEdge& s : edges) marked[s.edge] = true;
    Cycle c = make_cycle(g, std::move(edges), CycleKind::Greedy);
    const auto len = static_cast<double>(c.length());
    cs.add(std::move(c), len);
  }
  return cs;
}

// Fundamental cycles keep their stretch weights; extra cycles are weighted by
// length.
inline CycleSet extend_cycle_set(const CycleSet& fundamental, const CycleSet& extra) {
  CycleSet out = fundamental;
  out.fundamental_count = fundamental.size();
  out.spans = fundamental.spans;
  for (const Cycle& c : extra.cycles) out.add(c, static_cast<double>(c.length()));
  return out;
}

// Draws cycle i with probability weights[i] / total via a prefix-sum table.
class Sampler {
 public:
  explicit Sampler(std::span<const double> weights) : cumulative_(weights.size()) {
    if (weights.empty()) throw std::invalid_argument("cannot sample from an empty cycle set");
    double running = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!(weights[i] > 0.0)) throw std::invalid_argument("cycle weights must be positive");
      running += weights[i];
      cumulative_[i] = running;
    }
  }

  explicit Sampler(const CycleSet& cs) : Sampler(std::span<const double>(cs.weights)) {}

  // u in [0, 1)
  std::size_t draw(double u) const {
    const double target = u * total();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

  double total() const { return cumulative_.back(); }
  std::size_t size() const { return cumulative_.size(); }

  double probability(std::size_t i) const {
    const double lo = i == 0 ? 0.0 : cumulative_[i - 1];
    return (cumulative_[i] - lo) / total();
  }

 private:
  std::vector<double> cumulative_;
};

inline Sampler build_sampler(const CycleSet& cs) { return Sampler(cs); }

}  // namespace lcl
