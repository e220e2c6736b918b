#pragma once

// Immutable undirected graphs and the families used by the simulator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "episim/error.hpp"
#include "episim/rng.hpp"

namespace episim {

enum class Family { ring, line, grid, rgg, custom };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::ring: return "ring";
    case Family::line: return "line";
    case Family::grid: return "grid";
    case Family::rgg: return "rgg";
    case Family::custom: return "custom";
  }
  return "custom";
}

using Edge = std::pair<NodeId, NodeId>;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

// Largest integer r with r^k <= x (up to a relative slack of 1e-9), and
// whether r^k == x within that slack.
struct IntegerRoot {
  std::size_t value;
  bool exact;
};

inline IntegerRoot integer_root(double x, int k) {
  if (!(x >= 1.0)) return {0, false};
  auto power = [k](double r) { return std::pow(r, k); };
  const double slack = 1e-9 * x;
  auto r = static_cast<std::size_t>(std::floor(std::pow(x, 1.0 / k)));
  while (power(static_cast<double>(r + 1)) <= x + slack) ++r;
  while (r > 0 && power(static_cast<double>(r)) > x + slack) --r;
  return {r, std::abs(power(static_cast<double>(r)) - x) <= slack};
}

class Graph {
 public:
  Graph() = default;

  // Builds a graph from an undirected edge list.  Self-loops and duplicate
  // edges are rejected.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges,
                          Family family = Family::custom) {
    if (n == 0) throw InvalidParameter("graph needs at least one node");
    Graph g;
    g.family_ = family;
    std::vector<std::size_t> degree(n, 0);
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw InvalidParameter("edge references a node out of range");
      if (u == v) throw InvalidParameter("self-loop at node " + std::to_string(u));
      ++degree[u];
      ++degree[v];
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + degree[v];
    g.adjacency_.resize(g.offsets_[n]);
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (auto [u, v] : edges) {
      g.adjacency_[fill[u]++] = v;
      g.adjacency_[fill[v]++] = u;
    }
    for (std::size_t v = 0; v < n; ++v) {
      auto first = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
      auto last = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
      std::sort(first, last);
      if (std::adjacent_find(first, last) != last)
        throw InvalidParameter("duplicate edge at node " + std::to_string(v));
    }
    return g;
  }

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return adjacency_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const noexcept {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  // Directed edge slots: neighbors(v)[i] has slot slot_begin(v) + i.
  std::size_t slot_begin(NodeId v) const noexcept { return offsets_[v]; }
  std::size_t slot_count() const noexcept { return adjacency_.size(); }

  bool has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  // Undirected edges with u < v, sorted.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < node_count(); ++u)
      for (NodeId v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  Family family() const noexcept { return family_; }
  // Grid dimension (grid), 2 (rgg), otherwise 0.
  int dimension() const noexcept { return dimension_; }
  // Lattice side length for grids.
  std::size_t side() const noexcept { return side_; }
  // Connection radius for rgg.
  double radius() const noexcept { return radius_; }

  bool has_coords() const noexcept { return !coords_.empty(); }
  // Lattice point (1-based, row-major) for grids, unit-square point for rgg.
  std::span<const double> coord(NodeId v) const noexcept {
    const auto dim = static_cast<std::size_t>(dimension_);
    return {coords_.data() + dim * v, dim};
  }

  bool operator==(const Graph&) const = default;

 private:
  friend Graph gen_grid(std::size_t, int, bool);
  friend Graph gen_rgg(std::size_t, double, std::uint64_t);
  friend Graph make_rgg_from_points(std::vector<double>, double);
  friend Graph with_family(Graph, Family);

  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<double> coords_;
  Family family_ = Family::custom;
  int dimension_ = 0;
  std::size_t side_ = 0;
  double radius_ = 0.0;
};

inline Graph with_family(Graph g, Family f) {
  g.family_ = f;
  return g;
}

inline Graph gen_ring(std::size_t n) {
  if (n < 3) throw InvalidParameter("ring needs n >= 3");
  std::vector<Edge> edges;
  edges.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n));
  return Graph::from_edges(n, edges, Family::ring);
}

// Path v_0 - v_1 - ... - v_{n-1}.
inline Graph gen_line(std::size_t n) {
  if (n < 1) throw InvalidParameter("line needs n >= 1");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i)
    edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(i + 1));
  return Graph::from_edges(n, edges, Family::line);
}

// d-dimensional grid {1..side}^d with side = floor(n^{1/d}).  In strict mode
// n must be an exact d-th power; otherwise side^d <= n nodes are built.
inline Graph gen_grid(std::size_t n, int d, bool strict = false) {
  if (d < 1) throw InvalidParameter("grid dimension must be >= 1");
  if (n < 1) throw InvalidParameter("grid needs n >= 1");
  const auto root = integer_root(static_cast<double>(n), d);
  if (strict && !root.exact)
    throw InvalidParameter("n=" + std::to_string(n) + " is not a perfect " + std::to_string(d) +
                           "-th power");
  const std::size_t side = root.value;
  std::size_t count = 1;
  for (int k = 0; k < d; ++k) count *= side;

  std::vector<std::size_t> stride(static_cast<std::size_t>(d));
  std::size_t s = 1;
  for (int k = d - 1; k >= 0; --k) {
    stride[static_cast<std::size_t>(k)] = s;
    s *= side;
  }
  std::vector<Edge> edges;
  edges.reserve(count * static_cast<std::size_t>(d));
  std::vector<double> coords(count * static_cast<std::size_t>(d));
  for (std::size_t v = 0; v < count; ++v) {
    for (int k = 0; k < d; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const std::size_t x = (v / stride[ku]) % side;
      coords[v * static_cast<std::size_t>(d) + ku] = static_cast<double>(x + 1);
      if (x + 1 < side) edges.emplace_back(static_cast<NodeId>(v), static_cast<NodeId>(v + stride[ku]));
    }
  }
  Graph g = Graph::from_edges(count, edges, Family::grid);
  g.coords_ = std::move(coords);
  g.dimension_ = d;
  g.side_ = side;
  return g;
}

// Unit-square random geometric graph over given points (x0, y0, x1, y1, ...).
inline Graph make_rgg_from_points(std::vector<double> points, double r) {
  const std::size_t n = points.size() / 2;
  if (n == 0) throw InvalidParameter("rgg needs n >= 1");
  // Bucket points into cells of side >= r so neighbors lie in adjacent cells.
  const auto cap = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  const std::size_t cells =
      r > 0.0 ? std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(1.0 / r)), 1, cap)
              : cap;
  auto cell_of = [cells](double x) {
    return std::min(cells - 1, static_cast<std::size_t>(x * static_cast<double>(cells)));
  };
  std::vector<std::vector<NodeId>> buckets(cells * cells);
  for (std::size_t v = 0; v < n; ++v)
    buckets[cell_of(points[2 * v]) * cells + cell_of(points[2 * v + 1])].push_back(static_cast<NodeId>(v));
  const double r2 = r * r;
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t cx = cell_of(points[2 * v]);
    const std::size_t cy = cell_of(points[2 * v + 1]);
    for (std::size_t ax = cx > 0 ? cx - 1 : 0; ax <= std::min(cells - 1, cx + 1); ++ax)
      for (std::size_t ay = cy > 0 ? cy - 1 : 0; ay <= std::min(cells - 1, cy + 1); ++ay)
        for (NodeId u : buckets[ax * cells + ay]) {
          if (u <= v) continue;
          const double dx = points[2 * v] - points[2 * u];
          const double dy = points[2 * v + 1] - points[2 * u + 1];
          if (dx * dx + dy * dy <= r2) edges.emplace_back(static_cast<NodeId>(v), u);
        }
  }
  Graph g = Graph::from_edges(n, edges, Family::rgg);
  g.coords_ = std::move(points);
  g.dimension_ = 2;
  g.radius_ = r;
  return g;
}

// n i.i.d. uniform points in [0,1)^2, edge iff Euclidean distance <= r.
inline Graph gen_rgg(std::size_t n, double r, std::uint64_t seed) {
  if (n < 1) throw InvalidParameter("rgg needs n >= 1");
  if (!(r >= 0.0) || r > std::sqrt(2.0) + 1e-12) throw InvalidParameter("rgg radius must lie in [0, sqrt(2)]");
  Rng rng(seed, 0, Domain::graph);
  std::vector<double> points(2 * n);
  for (auto& p : points) p = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return make_rgg_from_points(std::move(points), r);
}

// Hop distances from `sources` restricted to nodes with mask[v] != 0 (all
// nodes when mask is empty).  Unreached nodes get kUnreached.
inline constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

inline std::vector<std::uint32_t> bfs_distances(const Graph& g, std::span<const NodeId> sources,
                                                std::span<const char> mask = {}) {
  std::vector<std::uint32_t> dist(g.node_count(), kUnreached);
  std::vector<NodeId> queue;
  queue.reserve(g.node_count());
  for (NodeId s : sources) {
    if (dist[s] == 0) continue;
    dist[s] = 0;
    queue.push_back(s);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    for (NodeId v : g.neighbors(u)) {
      if (dist[v] != kUnreached || (!mask.empty() && !mask[v])) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  return dist;
}

inline bool is_connected(const Graph& g) {
  if (g.node_count() <= 1) return true;
  const NodeId src = 0;
  const auto dist = bfs_distances(g, std::span<const NodeId>(&src, 1));
  return std::none_of(dist.begin(), dist.end(), [](auto d) { return d == kUnreached; });
}

}  // namespace episim
