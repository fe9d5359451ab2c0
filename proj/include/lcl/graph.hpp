#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lcl {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

struct Edge {
  VertexId u;
  VertexId v;
  double weight = 1.0;

  double resistance() const { return 1.0 / weight; }

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected graph with positive weights. Edges are stored with u < v and
// keep the id order they were supplied in; every per-vertex incidence list is
// sorted by ascending edge id.
class Graph {
 public:
  Graph() = default;

  Graph(std::size_t num_vertices, std::vector<Edge> edges)
      : n_(num_vertices), edges_(std::move(edges)) {
    std::map<std::pair<VertexId, VertexId>, EdgeId> seen;
    for (std::size_t id = 0; id < edges_.size(); ++id) {
      Edge& e = edges_[id];
      if (e.u >= n_ || e.v >= n_) {
        throw std::invalid_argument("edge " + std::to_string(id) +
                                    " references a vertex out of range");
      }
      if (e.u == e.v) {
        throw std::invalid_argument("edge " + std::to_string(id) + " is a self-loop");
      }
      if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
        throw std::invalid_argument("edge " + std::to_string(id) +
                                    " has a non-positive weight");
      }
      if (e.u > e.v) std::swap(e.u, e.v);
      if (!seen.emplace(std::pair{e.u, e.v}, static_cast<EdgeId>(id)).second) {
        throw std::invalid_argument("duplicate edge {" + std::to_string(e.u) + "," +
                                    std::to_string(e.v) + "}");
      }
    }
    build_adjacency();
  }

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  bool empty() const { return n_ == 0; }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }
  double resistance(EdgeId e) const { return edges_[e].resistance(); }

  std::span<const EdgeId> incident(VertexId v) const {
    return std::span<const EdgeId>(incidence_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
  }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  double weighted_degree(VertexId v) const {
    double d = 0.0;
    for (EdgeId e : incident(v)) d += edges_[e].weight;
    return d;
  }

  VertexId opposite(EdgeId e, VertexId v) const {
    return edges_[e].u == v ? edges_[e].v : edges_[e].u;
  }

  std::optional<EdgeId> find_edge(VertexId a, VertexId b) const {
    if (a >= n_ || b >= n_) return std::nullopt;
    if (degree(a) > degree(b)) std::swap(a, b);
    for (EdgeId e : incident(a)) {
      if (opposite(e, a) == b) return e;
    }
    return std::nullopt;
  }

  // Structural nonzeros of L = D - A: one diagonal entry per vertex plus both
  // off-diagonal entries per edge.
  std::size_t laplacian_nnz() const { return n_ + 2 * edges_.size(); }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  void build_adjacency() {
    offsets_.assign(n_ + 1, 0);
    for (const Edge& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    incidence_.resize(2 * edges_.size());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t id = 0; id < edges_.size(); ++id) {
      incidence_[cursor[edges_[id].u]++] = static_cast<EdgeId>(id);
      incidence_[cursor[edges_[id].v]++] = static_cast<EdgeId>(id);
    }
  }

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<EdgeId> incidence_;
};

// ---------------------------------------------------------------------------
// Demand vectors
// ---------------------------------------------------------------------------

inline double norm1(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += std::abs(xi);
  return s;
}

inline double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += xi * xi;
  return std::sqrt(s);
}

inline double norm_inf(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s = std::max(s, std::abs(xi));
  return s;
}

inline bool is_balanced(std::span<const double> b) {
  const double sum = std::accumulate(b.begin(), b.end(), 0.0);
  return std::abs(sum) <= 1e-12 * norm1(b);
}

inline void require_balanced(std::span<const double> b) {
  if (!is_balanced(b)) {
    throw std::invalid_argument("demand vector does not sum to zero");
  }
}

inline std::vector<double> mean_centered(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  if (out.empty()) return out;
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  for (double& xi : out) xi -= mean;
  return out;
}

// ---------------------------------------------------------------------------
// Construction from directed input
// ---------------------------------------------------------------------------

struct Arc {
  VertexId from;
  VertexId to;
  double weight = 1.0;
};

// Undirected graph of A + A^T for the arc list A. Self-loops and zero weights
// are dropped; edge ids follow the first appearance of each unordered pair.
inline Graph symmetrize(std::size_t num_vertices, std::span<const Arc> arcs, bool unweighted = false) {
  std::map<std::pair<VertexId, VertexId>, std::size_t> index;
  std::vector<Edge> edges;
  for (const Arc& a : arcs) {
    if (a.from == a.to || a.weight == 0.0) continue;
    const auto key = std::minmax(a.from, a.to);
    auto [it, inserted] = index.emplace(std::pair{key.first, key.second}, edges.size());
    if (inserted) {
      edges.push_back({key.first, key.second, std::abs(a.weight)});
    } else {
      edges[it->second].weight += std::abs(a.weight);
    }
  }
  if (unweighted) {
    for (Edge& e : edges) e.weight = 1.0;
  }
  return Graph(num_vertices, std::move(edges));
}

// ---------------------------------------------------------------------------
// Matrix Market
// ---------------------------------------------------------------------------

class parse_error : public std::runtime_error {
 public:
  parse_error(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline bool blank_line(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace detail

// Reads a square coordinate matrix as an undirected graph. The graph is that
// of A + A^T for the full matrix A the file represents (symmetric storage is
// expanded first). Diagonal entries are dropped and off-diagonal values are
// taken by magnitude.
inline Graph parse_matrix_market(std::istream& in, bool unweighted = false) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw parse_error(1, "empty input");
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || detail::lowercase(object) != "matrix") {
    throw parse_error(lineno, "missing %%MatrixMarket matrix header");
  }
  if (detail::lowercase(format) != "coordinate") {
    throw parse_error(lineno, "only coordinate format is supported");
  }
  field = detail::lowercase(field);
  symmetry = detail::lowercase(symmetry);
  if (field != "real" && field != "integer" && field != "pattern") {
    throw parse_error(lineno, "unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw parse_error(lineno, "unsupported symmetry '" + symmetry + "'");
  }
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric";

  // size line, skipping comments
  std::size_t rows = 0, cols = 0, entries = 0;
  for (;;) {
    if (!std::getline(in, line)) throw parse_error(lineno + 1, "missing size line");
    ++lineno;
    if (line.empty() || line[0] == '%' || detail::blank_line(line)) continue;
    std::istringstream size(line);
    if (!(size >> rows >> cols >> entries)) throw parse_error(lineno, "malformed size line");
    break;
  }
  if (rows != cols) {
    throw parse_error(lineno, "matrix is not square (" + std::to_string(rows) + "x" +
                                  std::to_string(cols) + ")");
  }

  std::vector<Arc> arcs;
  arcs.reserve(symmetric ? 2 * entries : entries);
  std::size_t read = 0;
  while (read < entries) {
    if (!std::getline(in, line)) {
      throw parse_error(lineno + 1, "expected " + std::to_string(entries) + " entries, found " +
                                        std::to_string(read));
    }
    ++lineno;
    if (line.empty() || line[0] == '%' || detail::blank_line(line)) continue;
    std::istringstream entry(line);
    long long i = 0, j = 0;
    double value = 1.0;
    if (!(entry >> i >> j) || (!pattern && !(entry >> value))) {
      throw parse_error(lineno, "malformed entry");
    }
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > rows || static_cast<std::size_t>(j) > cols) {
      throw parse_error(lineno, "index out of range");
    }
    const auto from = static_cast<VertexId>(i - 1);
    const auto to = static_cast<VertexId>(j - 1);
    arcs.push_back({from, to, value});
    if (symmetric && from != to) arcs.push_back({to, from, value});
    ++read;
  }
  return symmetrize(rows, arcs, unweighted);
}

inline Graph parse_matrix_market(const std::string& text, bool unweighted = false) {
  std::istringstream in(text);
  return parse_matrix_market(in, unweighted);
}

// One general-storage entry per edge; parse_matrix_market reads it back to the
// same graph.
inline void write_matrix_market(std::ostream& out, const Graph& g) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << g.num_vertices() << ' ' << g.num_vertices() << ' ' << g.num_edges() << '\n';
  const auto old_precision = out.precision(17);
  for (const Edge& e : g.edges()) {
    out << e.u + 1 << ' ' << e.v + 1 << ' ' << e.weight << '\n';
  }
  out.precision(old_precision);
}

// ---------------------------------------------------------------------------
// Pruning
// ---------------------------------------------------------------------------

struct PrunedGraph {
  Graph graph;
  // kNoVertex for removed vertices
  std::vector<VertexId> old_to_new;
};

inline PrunedGraph induced_subgraph(const Graph& g, const std::vector<bool>& keep) {
  PrunedGraph out;
  out.old_to_new.assign(g.num_vertices(), kNoVertex);
  VertexId next = 0;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (keep[v]) out.old_to_new[v] = next++;
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (keep[e.u] && keep[e.v]) edges.push_back({out.old_to_new[e.u], out.old_to_new[e.v], e.weight});
  }
  out.graph = Graph(next, std::move(edges));
  return out;
}

// Largest connected component (by vertex count, ties to the component holding
// the smallest vertex id) of the 2-core.
inline PrunedGraph prune_two_core(const Graph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<std::size_t> degree(n);
  std::vector<bool> alive(n, true);
  std::queue<VertexId> leaves;
  for (VertexId v = 0; v < n; ++v) {
    degree[v] = g.degree(v);
    if (degree[v] < 2) leaves.push(v);
  }
  while (!leaves.empty()) {
    const VertexId v = leaves.front();
    leaves.pop();
    if (!alive[v]) continue;
    alive[v] = false;
    for (EdgeId e : g.incident(v)) {
      const VertexId w = g.opposite(e, v);
      if (alive[w] && --degree[w] == 1) leaves.push(w);
    }
  }

  std::vector<std::size_t> component(n, std::numeric_limits<std::size_t>::max());
  std::size_t best = 0, best_size = 0, count = 0;
  for (VertexId s = 0; s < n; ++s) {
    if (!alive[s] || component[s] != std::numeric_limits<std::size_t>::max()) continue;
    std::size_t size = 0;
    std::queue<VertexId> frontier;
    frontier.push(s);
    component[s] = count;
    while (!frontier.empty()) {
      const VertexId v = frontier.front();
      frontier.pop();
      ++size;
      for (EdgeId e : g.incident(v)) {
        const VertexId w = g.opposite(e, v);
        if (alive[w] && component[w] == std::numeric_limits<std::size_t>::max()) {
          component[w] = count;
          frontier.push(w);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best = count;
    }
    ++count;
  }

  std::vector<bool> keep(n, false);
  for (VertexId v = 0; v < n; ++v) keep[v] = alive[v] && component[v] == best;
  return induced_subgraph(g, keep);
}

inline bool is_connected(const Graph& g) {
  if (g.num_vertices() == 0) return true;
  std::vector<bool> seen(g.num_vertices(), false);
  std::vector<VertexId> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    for (EdgeId e : g.incident(v)) {
      const VertexId w = g.opposite(e, v);
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == g.num_vertices();
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

// Side lengths of an axis-aligned lattice, fastest-varying axis first.
// Vertex (x, y, z) has id x + W * (y + H * z).
struct GridDims {
  std::vector<std::size_t> sides;

  std::size_t size() const { return sides.size(); }
  std::size_t operator[](std::size_t axis) const { return sides[axis]; }
  std::size_t num_vertices() const {
    return std::accumulate(sides.begin(), sides.end(), std::size_t{1}, std::multiplies<>{});
  }
  friend bool operator==(const GridDims&, const GridDims&) = default;
};

inline Graph grid_graph(const GridDims& dims) {
  if (dims.size() != 2 && dims.size() != 3) {
    throw std::invalid_argument("grid must have 2 or 3 axes");
  }
  for (std::size_t s : dims.sides) {
    if (s < 2) throw std::invalid_argument("grid side must be at least 2");
  }
  const std::size_t n = dims.num_vertices();
  std::vector<std::size_t> stride(dims.size(), 1);
  for (std::size_t a = 1; a < dims.size(); ++a) stride[a] = stride[a - 1] * dims[a - 1];

  std::vector<Edge> edges;
  for (std::size_t id = 0; id < n; ++id) {
    for (std::size_t a = 0; a < dims.size(); ++a) {
      const std::size_t coord = (id / stride[a]) % dims[a];
      if (coord + 1 < dims[a]) {
        edges.push_back({static_cast<VertexId>(id), static_cast<VertexId>(id + stride[a]), 1.0});
      }
    }
  }
  return Graph(n, std::move(edges));
}

// ---------------------------------------------------------------------------
// Laplacian operations
// ---------------------------------------------------------------------------

inline void laplacian_apply(const Graph& g, std::span<const double> x, std::span<double> y) {
  if (x.size() != g.num_vertices() || y.size() != g.num_vertices()) {
    throw std::invalid_argument("vector length does not match vertex count");
  }
  std::fill(y.begin(), y.end(), 0.0);
  for (const Edge& e : g.edges()) {
    const double flow = e.weight * (x[e.u] - x[e.v]);
    y[e.u] += flow;
    y[e.v] -= flow;
  }
}

inline std::vector<double> laplacian_apply(const Graph& g, std::span<const double> x) {
  std::vector<double> y(g.num_vertices());
  laplacian_apply(g, x, y);
  return y;
}

// ||Lv - b|| / ||b||
inline double relative_residual(const Graph& g, std::span<const double> v, std::span<const double> b) {
  if (b.size() != g.num_vertices()) {
    throw std::invalid_argument("vector length does not match vertex count");
  }
  std::vector<double> r = laplacian_apply(g, v);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  const double bnorm = norm2(b);
  const double rnorm = norm2(r);
  if (bnorm == 0.0) return rnorm == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return rnorm / bnorm;
}

}  // namespace lcl
