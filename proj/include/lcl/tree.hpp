#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <numeric>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "lcl/graph.hpp"

namespace lcl {

// An edge traversed in (+1) or against (-1) its stored u -> v orientation.
struct SignedEdge {
  EdgeId edge;
  int sign;

  friend bool operator==(const SignedEdge&, const SignedEdge&) = default;
};

class SpanningTree {
 public:
  SpanningTree() = default;

  // Roots the tree formed by `tree_edges` at `root`. Throws unless the edges
  // form a spanning tree of g.
  static SpanningTree from_edges(const Graph& g, std::span<const EdgeId> tree_edges, VertexId root = 0) {
    const std::size_t n = g.num_vertices();
    if (n == 0) return {};
    if (tree_edges.size() + 1 != n) {
      throw std::invalid_argument("a spanning tree needs exactly n-1 edges");
    }
    if (root >= n) throw std::invalid_argument("tree root out of range");

    SpanningTree t;
    t.root_ = root;
    t.in_tree_.assign(g.num_edges(), false);
    for (EdgeId e : tree_edges) {
      if (e >= g.num_edges() || t.in_tree_[e]) throw std::invalid_argument("invalid tree edge list");
      t.in_tree_[e] = true;
    }
    t.parent_.assign(n, kNoVertex);
    t.parent_edge_.assign(n, 0);
    t.parent_sign_.assign(n, 0);
    t.depth_.assign(n, 0);
    t.order_.reserve(n);

    t.parent_[root] = root;
    t.order_.push_back(root);
    for (std::size_t head = 0; head < t.order_.size(); ++head) {
      const VertexId v = t.order_[head];
      for (EdgeId e : g.incident(v)) {
        if (!t.in_tree_[e]) continue;
        const VertexId w = g.opposite(e, v);
        if (t.parent_[w] != kNoVertex) continue;
        t.parent_[w] = v;
        t.parent_edge_[w] = e;
        t.parent_sign_[w] = g.edge(e).u == w ? 1 : -1;
        t.depth_[w] = t.depth_[v] + 1;
        t.order_.push_back(w);
      }
    }
    if (t.order_.size() != n) throw std::invalid_argument("tree edges do not span the graph");
    return t;
  }

  std::size_t num_vertices() const { return parent_.size(); }
  VertexId root() const { return root_; }
  VertexId parent(VertexId v) const { return parent_[v]; }
  EdgeId parent_edge(VertexId v) const { return parent_edge_[v]; }
  // Orientation of parent_edge(v) when walked from v up to its parent.
  int parent_sign(VertexId v) const { return parent_sign_[v]; }
  std::size_t depth(VertexId v) const { return depth_[v]; }
  bool in_tree(EdgeId e) const { return in_tree_[e]; }
  // Vertices in breadth-first order from the root (non-decreasing depth).
  std::span<const VertexId> order() const { return order_; }

  std::vector<EdgeId> tree_edges() const {
    std::vector<EdgeId> out;
    for (std::size_t e = 0; e < in_tree_.size(); ++e) {
      if (in_tree_[e]) out.push_back(static_cast<EdgeId>(e));
    }
    return out;
  }

 private:
  VertexId root_ = 0;
  std::vector<VertexId> parent_;
  std::vector<EdgeId> parent_edge_;
  std::vector<int> parent_sign_;
  std::vector<std::size_t> depth_;
  std::vector<bool> in_tree_;
  std::vector<VertexId> order_;
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

}  // namespace detail

enum class DegreeOrder { Descending, Ascending };

// Kruskal over edges ranked by deg(u) + deg(v), ties by ascending edge id.
inline SpanningTree degree_sum_tree(const Graph& g, DegreeOrder order = DegreeOrder::Descending) {
  std::vector<EdgeId> ranked(g.num_edges());
  std::iota(ranked.begin(), ranked.end(), EdgeId{0});
  auto key = [&](EdgeId e) { return g.degree(g.edge(e).u) + g.degree(g.edge(e).v); };
  std::stable_sort(ranked.begin(), ranked.end(), [&](EdgeId a, EdgeId b) {
    return order == DegreeOrder::Descending ? key(a) > key(b) : key(a) < key(b);
  });

  detail::DisjointSets sets(g.num_vertices());
  std::vector<EdgeId> chosen;
  for (EdgeId e : ranked) {
    if (sets.unite(g.edge(e).u, g.edge(e).v)) chosen.push_back(e);
  }
  if (g.num_vertices() > 0 && chosen.size() + 1 != g.num_vertices()) {
    throw std::invalid_argument("graph is disconnected");
  }
  std::sort(chosen.begin(), chosen.end());
  return SpanningTree::from_edges(g, chosen, 0);
}

inline SpanningTree bfs_tree(const Graph& g, VertexId root = 0) {
  if (g.num_vertices() == 0) return {};
  std::vector<bool> seen(g.num_vertices(), false);
  std::vector<EdgeId> chosen;
  std::queue<VertexId> frontier;
  frontier.push(root);
  seen[root] = true;
  while (!frontier.empty()) {
    const VertexId v = frontier.front();
    frontier.pop();
    for (EdgeId e : g.incident(v)) {
      const VertexId w = g.opposite(e, v);
      if (seen[w]) continue;
      seen[w] = true;
      chosen.push_back(e);
      frontier.push(w);
    }
  }
  if (chosen.size() + 1 != g.num_vertices()) throw std::invalid_argument("graph is disconnected");
  return SpanningTree::from_edges(g, chosen, root);
}

class unsupported_dimension : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Recursive H-tree over a square power-of-two grid from grid_graph: each
// block's four quadrant trees are joined by three edges around the block
// center.
inline SpanningTree h_tree(const Graph& g, const GridDims& dims) {
  if (dims.size() != 2 || dims[0] != dims[1] || !std::has_single_bit(dims[0]) || dims[0] < 2) {
    throw unsupported_dimension("h-tree needs a square grid with power-of-two side");
  }
  if (g.num_vertices() != dims.num_vertices()) {
    throw std::invalid_argument("graph does not match grid dimensions");
  }
  const std::size_t width = dims[0];
  auto id = [&](std::size_t x, std::size_t y) { return static_cast<VertexId>(x + width * y); };
  std::vector<EdgeId> chosen;
  auto link = [&](VertexId a, VertexId b) {
    const auto e = g.find_edge(a, b);
    if (!e) throw std::invalid_argument("graph is not the expected grid");
    chosen.push_back(*e);
  };
  auto build = [&](auto&& self, std::size_t x0, std::size_t y0, std::size_t side) -> void {
    if (side == 1) return;
    const std::size_t half = side / 2;
    self(self, x0, y0, half);
    self(self, x0 + half, y0, half);
    self(self, x0, y0 + half, half);
    self(self, x0 + half, y0 + half, half);
    const std::size_t cx = x0 + half - 1;
    const std::size_t cy = y0 + half - 1;
    link(id(cx, cy), id(cx, cy + 1));
    link(id(cx + 1, cy), id(cx + 1, cy + 1));
    link(id(cx, cy), id(cx + 1, cy));
  };
  build(build, 0, 0, width);
  std::sort(chosen.begin(), chosen.end());
  return SpanningTree::from_edges(g, chosen, 0);
}

// Unique tree path from u to v, found by walking both ends to their lowest
// common ancestor.
inline std::vector<SignedEdge> tree_path(const SpanningTree& t, VertexId u, VertexId v) {
  std::vector<SignedEdge> up, down;
  while (t.depth(u) > t.depth(v)) {
    up.push_back({t.parent_edge(u), t.parent_sign(u)});
    u = t.parent(u);
  }
  while (t.depth(v) > t.depth(u)) {
    down.push_back({t.parent_edge(v), -t.parent_sign(v)});
    v = t.parent(v);
  }
  while (u != v) {
    up.push_back({t.parent_edge(u), t.parent_sign(u)});
    u = t.parent(u);
    down.push_back({t.parent_edge(v), -t.parent_sign(v)});
    v = t.parent(v);
  }
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

struct Stretch {
  double cycle_resistance;
  double stretch;
};

inline Stretch edge_stretch(const Graph& g, const SpanningTree& t, EdgeId e) {
  if (t.in_tree(e)) throw std::invalid_argument("edge is a tree edge");
  double total = g.resistance(e);
  for (const SignedEdge& s : tree_path(t, g.edge(e).u, g.edge(e).v)) total += g.resistance(s.edge);
  return {total, total / g.resistance(e)};
}

inline double tree_condition_number(const Graph& g, const SpanningTree& t) {
  double tau = 0.0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (!t.in_tree(e)) tau += edge_stretch(g, t, e).stretch;
  }
  return tau;
}

}  // namespace lcl
