#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "lcl/cycles.hpp"
#include "lcl/graph.hpp"
#include "lcl/tree.hpp"

namespace lcl {

// Dual iterate: a current on every edge (positive along the stored u -> v
// orientation) that always routes the demand b exactly.
struct FlowState {
  const Graph* graph = nullptr;
  const SpanningTree* tree = nullptr;
  std::vector<double> current;
  std::vector<double> demand;
};

// The unique feasible flow supported on the tree: every vertex, deepest
// first, pushes its accumulated demand to its parent.
inline FlowState init_tree_flow(const Graph& g, const SpanningTree& t, std::span<const double> b) {
  if (b.size() != g.num_vertices()) throw std::invalid_argument("demand length does not match vertex count");
  require_balanced(b);
  FlowState s{&g, &t, std::vector<double>(g.num_edges(), 0.0), std::vector<double>(b.begin(), b.end())};
  std::vector<double> pending(b.begin(), b.end());
  const auto order = t.order();
  for (std::size_t i = order.size(); i-- > 1;) {
    const VertexId v = order[i];
    s.current[t.parent_edge(v)] = t.parent_sign(v) * pending[v];
    pending[t.parent(v)] += pending[v];
  }
  return s;
}

// Signed r * f sum around the cycle.
inline double cycle_voltage(const FlowState& s, const Cycle& c) {
  double delta = 0.0;
  for (const SignedEdge& e : c.edges) delta += e.sign * s.graph->resistance(e.edge) * s.current[e.edge];
  return delta;
}

// Kaczmarz projection onto "zero voltage around c". Returns the voltage the
// cycle carried before the update.
inline double cycle_project(FlowState& s, const Cycle& c) {
  const double delta = cycle_voltage(s, c);
  const double correction = delta / c.resistance;
  for (const SignedEdge& e : c.edges) s.current[e.edge] -= e.sign * correction;
  return delta;
}

// Net outflow minus demand at every vertex; zero for a feasible flow.
inline std::vector<double> flow_imbalance(const FlowState& s) {
  std::vector<double> out(s.demand.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -s.demand[i];
  for (std::size_t e = 0; e < s.current.size(); ++e) {
    const Edge& edge = s.graph->edge(static_cast<EdgeId>(e));
    out[edge.u] += s.current[e];
    out[edge.v] -= s.current[e];
  }
  return out;
}

// Potentials induced along tree edges (root at 0, current flowing downhill),
// mean-centered.
inline std::vector<double> recover_potentials(const FlowState& s) {
  const SpanningTree& t = *s.tree;
  std::vector<double> v(t.num_vertices(), 0.0);
  for (VertexId x : t.order().subspan(t.order().empty() ? 0 : 1)) {
    const EdgeId e = t.parent_edge(x);
    v[x] = v[t.parent(x)] + t.parent_sign(x) * s.graph->resistance(e) * s.current[e];
  }
  return mean_centered(v);
}

}  // namespace lcl
