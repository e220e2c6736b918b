#pragma once

// Partitions of a graph into connected pieces, plus the BFS machinery the
// partitions are measured with.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "episim/error.hpp"
#include "episim/graph.hpp"

namespace episim {

struct SpanningTree {
  NodeId root = kNoNode;
  // Per-node parent (kNoNode for the root and for nodes outside the piece).
  std::vector<NodeId> parent;
  // Per-node hop distance from root (kUnreached outside the piece).
  std::vector<std::uint32_t> depth;
  // Piece nodes in BFS order, root first.
  std::vector<NodeId> order;

  std::uint32_t height() const {
    std::uint32_t h = 0;
    for (NodeId v : order) h = std::max(h, depth[v]);
    return h;
  }
};

struct Partition {
  std::vector<std::vector<NodeId>> pieces;
  std::vector<std::uint32_t> piece_diameters;
  std::vector<std::size_t> piece_sizes;
  // piece_of[v] = index of the piece containing v.
  std::vector<std::size_t> piece_of;
  // Set when the nominal construction did not divide evenly and the
  // lenient rule (floor, ragged last piece per axis) was applied.
  bool ragged = false;

  std::size_t g() const noexcept { return pieces.size(); }
  std::size_t max_diameter() const {
    return piece_diameters.empty() ? 0 : *std::max_element(piece_diameters.begin(), piece_diameters.end());
  }
  double mean_size() const {
    return pieces.empty() ? 0.0 : static_cast<double>(piece_of.size()) / static_cast<double>(pieces.size());
  }
};

namespace detail {

inline std::vector<char> membership(std::size_t n, std::span<const NodeId> piece) {
  std::vector<char> mask(n, 0);
  for (NodeId v : piece) mask[v] = 1;
  return mask;
}

}  // namespace detail

// Shortest-path spanning tree of the subgraph induced by `piece`.
inline SpanningTree bfs_tree(const Graph& g, std::span<const NodeId> piece, NodeId root) {
  const std::size_t n = g.node_count();
  if (root >= n) throw InvalidParameter("root out of range");
  const auto mask = detail::membership(n, piece);
  if (!mask[root]) throw InvalidParameter("root is not in the piece");
  SpanningTree tree;
  tree.root = root;
  tree.parent.assign(n, kNoNode);
  tree.depth.assign(n, kUnreached);
  tree.order.reserve(piece.size());
  tree.depth[root] = 0;
  tree.order.push_back(root);
  for (std::size_t head = 0; head < tree.order.size(); ++head) {
    const NodeId u = tree.order[head];
    for (NodeId v : g.neighbors(u)) {
      if (!mask[v] || tree.depth[v] != kUnreached) continue;
      tree.depth[v] = tree.depth[u] + 1;
      tree.parent[v] = u;
      tree.order.push_back(v);
    }
  }
  if (tree.order.size() != piece.size()) {
    for (NodeId v : piece)
      if (tree.depth[v] == kUnreached) throw ConnectivityError("piece is not connected", v);
  }
  return tree;
}

// Exact hop diameter of the subgraph induced by `piece` (all-sources BFS).
inline std::uint32_t diameter(const Graph& g, std::span<const NodeId> piece) {
  if (piece.empty()) return 0;
  const auto mask = detail::membership(g.node_count(), piece);
  std::vector<std::uint32_t> dist(g.node_count(), kUnreached);
  std::vector<NodeId> queue;
  queue.reserve(piece.size());
  std::uint32_t best = 0;
  for (NodeId s : piece) {
    for (NodeId v : queue) dist[v] = kUnreached;
    queue.clear();
    dist[s] = 0;
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId u = queue[head];
      for (NodeId v : g.neighbors(u)) {
        if (!mask[v] || dist[v] != kUnreached) continue;
        dist[v] = dist[u] + 1;
        best = std::max(best, dist[v]);
        queue.push_back(v);
      }
    }
    if (queue.size() != piece.size()) {
      for (NodeId v : piece)
        if (dist[v] == kUnreached) throw ConnectivityError("piece is not connected", v);
    }
  }
  return best;
}

inline std::uint32_t diameter(const Graph& g) {
  std::vector<NodeId> all(g.node_count());
  for (std::size_t v = 0; v < all.size(); ++v) all[v] = static_cast<NodeId>(v);
  return diameter(g, all);
}

// Fills sizes, diameters and piece_of from `pieces`; validates the cover.
inline Partition finalize_partition(const Graph& g, std::vector<std::vector<NodeId>> pieces,
                                    bool ragged = false) {
  Partition p;
  p.ragged = ragged;
  p.piece_of.assign(g.node_count(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].empty()) throw InvalidParameter("partition has an empty piece");
    std::sort(pieces[i].begin(), pieces[i].end());
    for (NodeId v : pieces[i]) {
      if (v >= g.node_count()) throw InvalidParameter("partition references an unknown node");
      if (p.piece_of[v] != static_cast<std::size_t>(-1))
        throw InvalidParameter("pieces overlap at node " + std::to_string(v));
      p.piece_of[v] = i;
    }
  }
  for (std::size_t v = 0; v < g.node_count(); ++v)
    if (p.piece_of[v] == static_cast<std::size_t>(-1))
      throw InvalidParameter("node " + std::to_string(v) + " is not covered by the partition");
  p.piece_sizes.reserve(pieces.size());
  p.piece_diameters.reserve(pieces.size());
  for (const auto& piece : pieces) {
    p.piece_sizes.push_back(piece.size());
    p.piece_diameters.push_back(diameter(g, piece));
  }
  p.pieces = std::move(pieces);
  return p;
}

namespace detail {

// Splits [0, length) into blocks of `block`; the remainder joins the last
// block so every block has between `block` and 2*block - 1 elements.
inline std::vector<std::size_t> block_of_axis(std::size_t length, std::size_t block) {
  const std::size_t count = std::max<std::size_t>(1, length / block);
  std::vector<std::size_t> out(length);
  for (std::size_t x = 0; x < length; ++x) out[x] = std::min(count - 1, x / block);
  return out;
}

}  // namespace detail

// Ring/line: sqrt(n) successive segments of sqrt(n) nodes.  Lenient mode
// floors sqrt(n) and folds the remainder into the last segment.
inline Partition partition_ring(const Graph& g, bool strict = false) {
  if (g.family() != Family::ring && g.family() != Family::line)
    throw InvalidFamily(std::string("partition_ring needs a ring or line, got ") + family_name(g.family()));
  const std::size_t n = g.node_count();
  const auto root = integer_root(static_cast<double>(n), 2);
  if (strict && !root.exact) throw InvalidParameter("n=" + std::to_string(n) + " is not a perfect square");
  const std::size_t seg = std::max<std::size_t>(1, root.value);
  const auto block = detail::block_of_axis(n, seg);
  std::vector<std::vector<NodeId>> pieces(block.back() + 1);
  for (std::size_t v = 0; v < n; ++v) pieces[block[v]].push_back(static_cast<NodeId>(v));
  return finalize_partition(g, std::move(pieces), n % seg != 0);
}

// Side of the sub-grids used by partition_grid: (n/L_min)^{1/(d+1)}.
inline IntegerRoot grid_piece_side(std::size_t n, int d, double l_min) {
  return integer_root(static_cast<double>(n) / l_min, d + 1);
}

// d-grid: contiguous axis-aligned sub-grids of side (n/L_min)^{1/(d+1)}.
inline Partition partition_grid(const Graph& g, double l_min, bool strict = false) {
  if (g.family() != Family::grid)
    throw InvalidFamily(std::string("partition_grid needs a grid, got ") + family_name(g.family()));
  if (!(l_min > 0.0)) throw InvalidParameter("L_min must be positive");
  const int d = g.dimension();
  const std::size_t side = g.side();
  const std::size_t n = g.node_count();
  const auto root = grid_piece_side(n, d, l_min);
  if (strict && (!root.exact || root.value == 0 || side % root.value != 0))
    throw InvalidParameter("sub-grid side (n/L_min)^{1/(d+1)} must be an integer dividing the grid side");
  const std::size_t block = std::clamp<std::size_t>(root.value, 1, side);
  const auto axis_block = detail::block_of_axis(side, block);
  const std::size_t per_axis = axis_block.back() + 1;

  std::size_t count = 1;
  for (int k = 0; k < d; ++k) count *= per_axis;
  std::vector<std::vector<NodeId>> pieces(count);
  for (std::size_t v = 0; v < n; ++v) {
    const auto c = g.coord(static_cast<NodeId>(v));
    std::size_t index = 0;
    for (int k = 0; k < d; ++k)
      index = index * per_axis + axis_block[static_cast<std::size_t>(c[static_cast<std::size_t>(k)]) - 1];
    pieces[index].push_back(static_cast<NodeId>(v));
  }
  return finalize_partition(g, std::move(pieces), !root.exact || side % block != 0);
}

// Tile and chunk counts per axis used by partition_rgg.
struct RggTiling {
  std::size_t tiles_per_axis;
  std::size_t chunks_per_axis;
};

inline RggTiling rgg_tiling(std::size_t n, double r, double l_min) {
  if (!(r > 0.0)) throw InvalidParameter("rgg partition needs r > 0");
  if (!(l_min > 0.0)) throw InvalidParameter("L_min must be positive");
  const auto tiles = static_cast<std::size_t>(std::ceil(std::sqrt(5.0) / r - 1e-12));
  // Chunk side 1/(n L_min^2)^{1/6}; rounded up to whole tiles.
  const double nominal = std::pow(static_cast<double>(n) * l_min * l_min, 1.0 / 6.0);
  auto chunks = static_cast<std::size_t>(std::ceil(nominal - 1e-9));
  chunks = std::clamp<std::size_t>(chunks, 1, std::max<std::size_t>(1, tiles));
  return {std::max<std::size_t>(1, tiles), chunks};
}

// RGG: the unit square is cut into tiles of side <= r/sqrt(5) (nodes in
// edge-adjacent tiles are always linked) and the tiles are grouped into
// square chunks; each chunk's nodes form one piece.  An empty tile raises
// PartitionDegenerate.  When r >= sqrt(2) the graph is complete and the
// tile test is skipped.
inline Partition partition_rgg(const Graph& g, double l_min = 1.0) {
  if (g.family() != Family::rgg)
    throw InvalidFamily(std::string("partition_rgg needs an rgg, got ") + family_name(g.family()));
  const std::size_t n = g.node_count();
  const auto tiling = rgg_tiling(n, g.radius(), l_min);
  const std::size_t k = tiling.tiles_per_axis;
  const std::size_t m = tiling.chunks_per_axis;
  auto tile_of = [k](double x) {
    return std::min(k - 1, static_cast<std::size_t>(x * static_cast<double>(k)));
  };
  const bool complete = g.radius() >= std::sqrt(2.0);
  std::vector<std::size_t> occupancy(k * k, 0);
  std::vector<std::vector<NodeId>> pieces(m * m);
  for (std::size_t v = 0; v < n; ++v) {
    const auto c = g.coord(static_cast<NodeId>(v));
    const std::size_t tx = tile_of(c[0]);
    const std::size_t ty = tile_of(c[1]);
    ++occupancy[tx * k + ty];
    pieces[(tx * m / k) * m + (ty * m / k)].push_back(static_cast<NodeId>(v));
  }
  if (!complete) {
    for (std::size_t t = 0; t < occupancy.size(); ++t)
      if (occupancy[t] == 0) throw PartitionDegenerate(t);
  }
  std::erase_if(pieces, [](const auto& p) { return p.empty(); });
  return finalize_partition(g, std::move(pieces), false);
}

// One shortest-path tree per piece, rooted at roots[i].  Entries for all
// pieces share the per-node arrays of the returned tree.
inline SpanningTree bfs_forest(const Graph& g, const Partition& p, std::span<const NodeId> roots) {
  if (roots.size() != p.g()) throw InvalidParameter("need one root per piece");
  const std::size_t n = g.node_count();
  SpanningTree forest;
  forest.parent.assign(n, kNoNode);
  forest.depth.assign(n, kUnreached);
  forest.order.reserve(n);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const NodeId r = roots[i];
    if (p.piece_of[r] != i) throw InvalidParameter("root is not in its piece");
    forest.depth[r] = 0;
    const std::size_t start = forest.order.size();
    forest.order.push_back(r);
    for (std::size_t head = start; head < forest.order.size(); ++head) {
      const NodeId u = forest.order[head];
      for (NodeId v : g.neighbors(u)) {
        if (p.piece_of[v] != i || forest.depth[v] != kUnreached) continue;
        forest.depth[v] = forest.depth[u] + 1;
        forest.parent[v] = u;
        forest.order.push_back(v);
      }
    }
    if (forest.order.size() - start != p.piece_sizes[i]) {
      for (NodeId v : p.pieces[i])
        if (forest.depth[v] == kUnreached) throw ConnectivityError("piece is not connected", v);
    }
  }
  return forest;
}

}  // namespace episim
