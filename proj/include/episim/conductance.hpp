#pragma once

// Conductance (isoperimetric constant)
//   Psi(G) = min over S with 1 <= |S| <= |V|/2 of E(S, V\S) / |S|.

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "episim/error.hpp"
#include "episim/graph.hpp"

namespace episim {

enum class ConductanceMode { exact, analytic };

struct ConductanceResult {
  // value = cut / size, kept as a rational.
  std::uint64_t cut = 0;
  std::uint64_t size = 1;
  std::vector<NodeId> witness_set;  // exact mode only
  ConductanceMode mode = ConductanceMode::exact;

  double value() const noexcept { return static_cast<double>(cut) / static_cast<double>(size); }
};

inline constexpr std::size_t kConductanceExactLimit = 24;

// Brute force over all subsets in Gray-code order; cut sizes are updated
// incrementally with bitmask adjacency.
inline ConductanceResult conductance_exact(const Graph& g) {
  const std::size_t n = g.node_count();
  if (n > kConductanceExactLimit)
    throw SizeLimit("conductance_exact supports n <= " + std::to_string(kConductanceExactLimit) +
                    " (got " + std::to_string(n) + "); use conductance_analytic");
  if (n < 2) throw InvalidParameter("conductance needs at least two nodes");
  std::vector<std::uint32_t> adj(n, 0);
  for (NodeId v = 0; v < n; ++v)
    for (NodeId u : g.neighbors(v)) adj[v] |= 1u << u;

  const std::uint64_t half = n / 2;
  std::uint32_t set = 0;
  std::int64_t cut = 0;
  std::uint64_t best_cut = 0, best_size = 0;
  std::uint32_t best_set = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const auto v = static_cast<unsigned>(std::countr_zero(i));
    const std::uint32_t bit = 1u << v;
    const auto inside = static_cast<std::int64_t>(std::popcount(adj[v] & set));
    const auto deg = static_cast<std::int64_t>(std::popcount(adj[v]));
    if (set & bit) {
      set &= ~bit;
      cut -= deg - 2 * inside;
    } else {
      set |= bit;
      cut += deg - 2 * inside;
    }
    const auto size = static_cast<std::uint64_t>(std::popcount(set));
    if (size == 0 || size > half) continue;
    const auto c = static_cast<std::uint64_t>(cut);
    if (best_size == 0 || c * best_size < best_cut * size) {
      best_cut = c;
      best_size = size;
      best_set = set;
    }
  }
  ConductanceResult result;
  result.cut = best_cut;
  result.size = best_size;
  result.mode = ConductanceMode::exact;
  for (NodeId v = 0; v < n; ++v)
    if (best_set & (1u << v)) result.witness_set.push_back(v);
  return result;
}

// Closed forms for structured families: ring 2/floor(n/2), line 1/floor(n/2),
// 1-d grid as line, 2-d grid of side k: 1/floor(k/2) (a half-split).
inline ConductanceResult conductance_analytic(const Graph& g) {
  const std::size_t n = g.node_count();
  ConductanceResult r;
  r.mode = ConductanceMode::analytic;
  if (n < 2) throw InvalidParameter("conductance needs at least two nodes");
  switch (g.family()) {
    case Family::ring:
      r.cut = 2;
      r.size = n / 2;
      return r;
    case Family::line:
      r.cut = 1;
      r.size = n / 2;
      return r;
    case Family::grid:
      if (g.dimension() == 1) {
        r.cut = 1;
        r.size = n / 2;
        return r;
      }
      if (g.dimension() == 2) {
        r.cut = 1;
        r.size = g.side() / 2;
        return r;
      }
      break;
    default:
      break;
  }
  throw InvalidFamily(std::string("no closed-form conductance for family ") + family_name(g.family()) +
                      (g.family() == Family::grid ? " of dimension " + std::to_string(g.dimension()) : ""));
}

}  // namespace episim
