#pragma once

// Comparison processes used to sandwich the epidemic: the two-phase process
// (slower than the real process), the conductance birth chain, and the
// non-interfering cluster processes (faster than any policy).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <unordered_set>
#include <vector>

#include "episim/engine.hpp"
#include "episim/error.hpp"
#include "episim/graph.hpp"
#include "episim/parallel.hpp"
#include "episim/partition.hpp"
#include "episim/policies.hpp"
#include "episim/rng.hpp"
#include "episim/stats.hpp"

namespace episim {

// ---------------------------------------------------------------------------
// Two-phase process

enum class PhaseOneMode { homogeneous, sequential };

struct TwoPhaseResult {
  double t1 = 0.0;  // every piece holds an infected node
  double t2 = 0.0;  // slowest piece finishes along its BFS tree
  double total = 0.0;
  std::vector<NodeId> seeds;  // first infected node of each piece
};

// Phase 1 seeds one node per piece (the initially infected node gets no
// head start).  Homogeneous: piece i is hit at rate L s_i / n, at a uniform
// node of the piece, independently; T1 is the maximum.  Sequential: the
// pieces are seeded one after another at rate L, each at its lowest-id node;
// T1 is the sum.  Phase 2 starts at T1 in every piece and spreads only
// along the piece's BFS tree from its seed with Exp(beta) edge delays.
inline TwoPhaseResult two_phase_process(const Graph& g, const Partition& p, double L, PhaseOneMode mode,
                                        std::uint64_t seed, std::uint64_t stream, double beta = 1.0) {
  if (!(L > 0.0)) throw InvalidParameter("two_phase_process needs L > 0");
  if (!(beta > 0.0)) throw InvalidParameter("beta must be positive");
  if (p.piece_of.size() != g.node_count()) throw InvalidParameter("partition does not match graph");
  Rng rng(seed, stream, Domain::general);
  const auto n = static_cast<double>(g.node_count());

  TwoPhaseResult out;
  out.seeds.reserve(p.g());
  for (std::size_t i = 0; i < p.g(); ++i) {
    const auto& piece = p.pieces[i];
    if (mode == PhaseOneMode::homogeneous) {
      out.t1 = std::max(out.t1, rng.exponential(L * static_cast<double>(piece.size()) / n));
      out.seeds.push_back(piece[rng.below(piece.size())]);
    } else {
      out.t1 += rng.exponential(L);
      out.seeds.push_back(*std::min_element(piece.begin(), piece.end()));
    }
  }

  std::vector<double> arrival(g.node_count(), 0.0);
  for (std::size_t i = 0; i < p.g(); ++i) {
    const SpanningTree tree = bfs_tree(g, p.pieces[i], out.seeds[i]);
    for (NodeId v : tree.order) {
      if (v == tree.root) continue;
      arrival[v] = arrival[tree.parent[v]] + rng.exponential(beta);
      out.t2 = std::max(out.t2, arrival[v]);
    }
  }
  out.total = out.t1 + out.t2;
  return out;
}

struct DominanceCheckReport {
  PhaseOneMode mode = PhaseOneMode::homogeneous;
  std::vector<double> real;       // finish times of the simulated policy
  std::vector<double> two_phase;  // finish times of the two-phase process
  DominanceVerdict verdict;       // tests real <=_st two_phase
};

// Random policy pairs with homogeneous phase 1, GSI with sequential phase 1.
inline DominanceCheckReport dominance_check(const Graph& g, const Partition& p, PolicySpec spec,
                                            std::size_t replicates, std::uint64_t seed, double beta = 1.0,
                                            unsigned threads = default_threads()) {
  DominanceCheckReport rep;
  if (spec.kind == PolicyKind::random_homogeneous) {
    rep.mode = PhaseOneMode::homogeneous;
  } else if (spec.kind == PolicyKind::gsi) {
    rep.mode = PhaseOneMode::sequential;
    if (!spec.partition) spec.partition = std::make_shared<const Partition>(p);
  } else {
    throw InvalidParameter(std::string("dominance_check supports random_homogeneous or gsi, not ") +
                           policy_kind_name(spec.kind));
  }
  EngineConfig cfg;
  cfg.beta = beta;
  cfg.seed = seed;
  const auto batch = simulate_batch(
      g, [&](std::uint64_t s) { return make_policy(spec, g, s); }, cfg, replicates, threads);
  rep.real.reserve(replicates);
  for (const auto& r : batch) rep.real.push_back(*r.finish_time);
  rep.two_phase.resize(replicates);
  parallel_for(replicates, threads, [&](std::size_t k) {
    rep.two_phase[k] = two_phase_process(g, p, spec.L, rep.mode, derive_seed(seed, 0x2F), k, beta).total;
  });
  rep.verdict = dominance_report(rep.real, rep.two_phase, {.seed = derive_seed(seed, 0xB0)});
  return rep;
}

// ---------------------------------------------------------------------------
// Conductance birth chain

// Rate out of state j (1 <= j < size): j psi up to half the piece, (size - j) psi beyond.
inline double conductance_chain_rate(std::size_t size, std::size_t j, double psi) {
  return static_cast<double>(2 * j <= size ? j : size - j) * psi;
}

inline void check_chain_args(std::size_t size, double psi) {
  if (size < 2) throw InvalidParameter("conductance_chain needs piece_size >= 2");
  if (!(psi > 0.0)) throw InvalidParameter("conductance_chain needs psi > 0");
}

// Absorption time from state 1 to state `size`.
inline double conductance_chain(std::size_t size, double psi, std::uint64_t seed, std::uint64_t stream = 0) {
  check_chain_args(size, psi);
  Rng rng(seed, stream, Domain::general);
  double t = 0.0;
  for (std::size_t j = 1; j < size; ++j) t += rng.exponential(conductance_chain_rate(size, j, psi));
  return t;
}

inline double conductance_chain_mean(std::size_t size, double psi) {
  check_chain_args(size, psi);
  double m = 0.0;
  for (std::size_t j = 1; j < size; ++j) m += 1.0 / conductance_chain_rate(size, j, psi);
  return m;
}

// ---------------------------------------------------------------------------
// Cluster processes

enum class GrowthKind { line, fpp, diagonal };

struct ClusterProcessConfig {
  double seeding_rate = 1.0;
  GrowthKind growth = GrowthKind::line;
  double beta = 1.0;         // line and fpp per-edge rate
  int dimension = 2;         // fpp lattice dimension, 1..3
  double mu_eff = 1.0;       // diagonal per-edge rate
  std::size_t occupancy = 1; // points per lattice site (diagonal)
  std::size_t target_count = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  // Stop here even if the target was not reached.
  std::optional<double> horizon;
};

struct ClusterPathPoint {
  double t;
  std::size_t total;  // points including cluster seeds
  std::size_t grown;  // points added by growth only
};

struct ClusterTrace {
  std::vector<double> cluster_birth_times;  // first entry 0
  std::vector<ClusterPathPoint> path;       // one entry per change, starting at t = 0
  std::optional<double> hitting_time;

  // Counts in force at time t (right-continuous).
  const ClusterPathPoint& at(double t) const {
    auto it = std::upper_bound(path.begin(), path.end(), t,
                               [](double x, const ClusterPathPoint& p) { return x < p.t; });
    return *(it == path.begin() ? it : std::prev(it));
  }
  std::size_t total_at(double t) const { return at(t).total; }
  std::size_t grown_at(double t) const { return at(t).grown; }
};

inline void validate(const ClusterProcessConfig& cfg) {
  if (!(cfg.seeding_rate > 0.0)) throw InvalidParameter("seeding_rate must be positive");
  if (cfg.target_count < 1) throw InvalidParameter("target_count must be >= 1");
  if (cfg.growth != GrowthKind::diagonal && !(cfg.beta > 0.0)) throw InvalidParameter("beta must be positive");
  if (cfg.growth == GrowthKind::fpp && (cfg.dimension < 1 || cfg.dimension > 3))
    throw InvalidParameter("fpp dimension must be 1, 2 or 3");
  if (cfg.growth == GrowthKind::diagonal && !(cfg.mu_eff > 0.0)) throw InvalidParameter("mu_eff must be positive");
  if (cfg.occupancy < 1) throw InvalidParameter("occupancy must be >= 1");
}

// The initial cluster exists at t = 0, further clusters arrive as a Poisson
// process of rate seeding_rate, every cluster adds a point at rate 2 beta.
inline ClusterTrace line_clusters(ClusterProcessConfig cfg) {
  cfg.growth = GrowthKind::line;
  validate(cfg);
  Rng rng(cfg.seed, cfg.stream, Domain::general);
  ClusterTrace tr;
  tr.cluster_birth_times.push_back(0.0);
  std::size_t clusters = 1, grown = 0;
  double t = 0.0;
  tr.path.push_back({0.0, 1, 0});
  if (cfg.target_count <= 1) tr.hitting_time = 0.0;
  while (!tr.hitting_time) {
    const double growth = 2.0 * cfg.beta * static_cast<double>(clusters);
    const double total = cfg.seeding_rate + growth;
    t += rng.exponential(total);
    if (cfg.horizon && t > *cfg.horizon) break;
    if (rng.uniform() * total <= cfg.seeding_rate) {
      ++clusters;
      tr.cluster_birth_times.push_back(t);
    } else {
      ++grown;
    }
    tr.path.push_back({t, clusters + grown, grown});
    if (clusters + grown >= cfg.target_count) tr.hitting_time = t;
  }
  return tr;
}

namespace detail {

struct Site {
  std::uint32_t cluster;
  std::array<std::int32_t, 3> x;
  bool operator==(const Site&) const = default;
};

struct SiteHash {
  std::size_t operator()(const Site& s) const noexcept {
    std::uint64_t h = s.cluster * 0x9E3779B97F4A7C15ULL;
    for (auto c : s.x) h = (h ^ static_cast<std::uint32_t>(c)) * 0xBF58476D1CE4E5B9ULL;
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

inline std::vector<std::array<std::int32_t, 3>> lattice_offsets(GrowthKind kind, int d) {
  std::vector<std::array<std::int32_t, 3>> off;
  if (kind == GrowthKind::diagonal) {
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        if (a || b) off.push_back({a, b, 0});
  } else {
    for (int k = 0; k < d; ++k)
      for (int s : {-1, 1}) {
        std::array<std::int32_t, 3> o{0, 0, 0};
        o[static_cast<std::size_t>(k)] = s;
        off.push_back(o);
      }
  }
  return off;
}

// Exact simulation by thinning: every (occupied site, direction) pair fires
// at the edge rate, and a firing whose target is already occupied is void.
// Sites live in a hash set keyed by (cluster, coordinates), so the lattice
// is unbounded.  `observe` is called after each accepted growth step with
// the new site.
template <typename Observe>
ClusterTrace lattice_clusters(const ClusterProcessConfig& cfg, Observe&& observe) {
  validate(cfg);
  const int d = cfg.growth == GrowthKind::diagonal ? 2 : cfg.dimension;
  const auto offsets = lattice_offsets(cfg.growth, d);
  const double edge_rate = cfg.growth == GrowthKind::diagonal ? cfg.mu_eff : cfg.beta;
  const std::size_t occ = cfg.growth == GrowthKind::diagonal ? cfg.occupancy : 1;
  const double per_site = edge_rate * static_cast<double>(offsets.size());

  Rng rng(cfg.seed, cfg.stream, Domain::general);
  std::unordered_set<Site, SiteHash> occupied;
  std::vector<Site> sites;
  ClusterTrace tr;
  std::size_t grown = 0;

  auto add = [&](const Site& s) {
    occupied.insert(s);
    sites.push_back(s);
  };
  add({0, {0, 0, 0}});
  tr.cluster_birth_times.push_back(0.0);
  tr.path.push_back({0.0, occ, 0});
  if (occ >= cfg.target_count) tr.hitting_time = 0.0;

  double t = 0.0;
  while (!tr.hitting_time) {
    const double total = cfg.seeding_rate + per_site * static_cast<double>(sites.size());
    t += rng.exponential(total);
    if (cfg.horizon && t > *cfg.horizon) break;
    if (rng.uniform() * total <= cfg.seeding_rate) {
      add({static_cast<std::uint32_t>(tr.cluster_birth_times.size()), {0, 0, 0}});
      tr.cluster_birth_times.push_back(t);
    } else {
      Site s = sites[rng.below(sites.size())];
      const auto& o = offsets[rng.below(offsets.size())];
      for (std::size_t k = 0; k < 3; ++k) s.x[k] += o[k];
      if (occupied.contains(s)) continue;
      add(s);
      ++grown;
      observe(t, s);
    }
    const std::size_t points = sites.size() * occ;
    tr.path.push_back({t, points, grown * occ});
    if (points >= cfg.target_count) tr.hitting_time = t;
  }
  return tr;
}

}  // namespace detail

inline ClusterTrace fpp_clusters(ClusterProcessConfig cfg) {
  cfg.growth = GrowthKind::fpp;
  return detail::lattice_clusters(cfg, [](double, const detail::Site&) {});
}

inline std::size_t default_occupancy(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n)))));
}

inline ClusterTrace diagonal_grid_clusters(ClusterProcessConfig cfg) {
  cfg.growth = GrowthKind::diagonal;
  return detail::lattice_clusters(cfg, [](double, const detail::Site&) {});
}

// Hitting times of `replicates` independent runs, replicate k on stream k.
inline std::vector<double> cluster_hitting_times(const ClusterProcessConfig& cfg, std::size_t replicates,
                                                 unsigned threads = default_threads()) {
  if (cfg.horizon) throw InvalidParameter("cluster_hitting_times needs an unbounded horizon");
  std::vector<double> out(replicates);
  parallel_for(replicates, threads, [&](std::size_t k) {
    ClusterProcessConfig local = cfg;
    local.stream = k;
    const ClusterTrace tr = cfg.growth == GrowthKind::line  ? line_clusters(local)
                            : cfg.growth == GrowthKind::fpp ? fpp_clusters(local)
                                                            : diagonal_grid_clusters(local);
    out[k] = *tr.hitting_time;
  });
  return out;
}

struct ShapeEstimate {
  std::vector<double> times;
  std::vector<double> max_radius_linf;      // mean over replicates
  double fitted_rate = 0.0;                 // least squares through the origin
  double envelope_rate = 0.0;               // candidate l
  std::vector<std::size_t> exceed_count;    // replicates with radius > l t
  std::size_t replicates = 0;
};

// Single-cluster growth (no seeding) on the fpp or diagonal lattice,
// observed at increasing `times`.  The envelope rate is envelope_factor
// times the fitted rate.
inline ShapeEstimate shape_estimate(GrowthKind kind, int dimension, double edge_rate, std::vector<double> times,
                                    std::size_t replicates, std::uint64_t seed, double envelope_factor = 1.25,
                                    unsigned threads = default_threads()) {
  if (kind == GrowthKind::line) throw InvalidParameter("shape_estimate needs a lattice growth kind");
  if (times.empty() || !std::is_sorted(times.begin(), times.end()) || !(times.front() > 0.0))
    throw InvalidParameter("shape_estimate needs increasing positive times");
  if (replicates < 1) throw InvalidParameter("replicates must be >= 1");
  std::vector<std::vector<double>> radius(replicates, std::vector<double>(times.size(), 0.0));
  parallel_for(replicates, threads, [&](std::size_t k) {
    ClusterProcessConfig cfg;
    cfg.growth = kind;
    cfg.dimension = dimension;
    cfg.beta = edge_rate;
    cfg.mu_eff = edge_rate;
    cfg.seeding_rate = std::numeric_limits<double>::min();  // effectively no new clusters
    cfg.target_count = std::numeric_limits<std::size_t>::max();
    cfg.horizon = times.back();
    cfg.seed = seed;
    cfg.stream = k;
    // Radius is a step function; record jumps and read it off at each time.
    std::vector<std::pair<double, std::int32_t>> jumps;
    std::int32_t r = 0;
    detail::lattice_clusters(cfg, [&](double t, const detail::Site& s) {
      std::int32_t m = 0;
      for (auto c : s.x) m = std::max(m, std::abs(c));
      if (m > r) {
        r = m;
        jumps.emplace_back(t, r);
      }
    });
    std::size_t j = 0;
    std::int32_t cur = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      while (j < jumps.size() && jumps[j].first <= times[i]) cur = jumps[j++].second;
      radius[k][i] = cur;
    }
  });
  ShapeEstimate est;
  est.times = times;
  est.replicates = replicates;
  est.max_radius_linf.assign(times.size(), 0.0);
  for (const auto& row : radius)
    for (std::size_t i = 0; i < times.size(); ++i) est.max_radius_linf[i] += row[i] / static_cast<double>(replicates);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    sxy += times[i] * est.max_radius_linf[i];
    sxx += times[i] * times[i];
  }
  est.fitted_rate = sxy / sxx;
  est.envelope_rate = envelope_factor * est.fitted_rate;
  est.exceed_count.assign(times.size(), 0);
  for (const auto& row : radius)
    for (std::size_t i = 0; i < times.size(); ++i)
      if (row[i] > est.envelope_rate * times[i]) ++est.exceed_count[i];
  return est;
}

// ---------------------------------------------------------------------------
// Bound functionals

struct BoundValues {
  double h;  // max(g / L_min, d)
  double k;  // max(g / L_min, ln s / psi)
};

inline BoundValues bound_calculator(double g_count, double s_size, double d_diam, double psi, double l_min) {
  for (double x : {g_count, s_size, d_diam, psi, l_min})
    if (!(x > 0.0)) throw InvalidParameter("bound_calculator inputs must be positive");
  const double seeding = g_count / l_min;
  return {std::max(seeding, d_diam), std::max(seeding, std::log(s_size) / psi)};
}

// ---------------------------------------------------------------------------
// Export

// `t,N` pairs, thinned to at most max_points rows (first and last kept).
inline void write_cluster_csv(std::ostream& os, const ClusterTrace& tr, std::size_t max_points = 4096) {
  const auto old = os.precision(17);
  os << "t,N\n";
  const std::size_t m = tr.path.size();
  const std::size_t stride = m <= max_points ? 1 : (m + max_points - 2) / (max_points - 1);
  for (std::size_t i = 0; i < m; i += stride)
    if (i + 1 != m) os << tr.path[i].t << ',' << tr.path[i].total << '\n';
  if (m) os << tr.path.back().t << ',' << tr.path.back().total << '\n';
  os.precision(old);
}

inline void write_shape_csv(std::ostream& os, const ShapeEstimate& est) {
  const auto old = os.precision(17);
  os << "t,max_radius,exceed_count\n";
  for (std::size_t i = 0; i < est.times.size(); ++i)
    os << est.times[i] << ',' << est.max_radius_linf[i] << ',' << est.exceed_count[i] << '\n';
  os.precision(old);
}

}  // namespace episim
