#pragma once

// Continuous-time SI simulation with external infection.
//
// Intrinsic spread uses per-directed-edge passage times tau_{u->v} ~ Exp(beta)
// drawn from keyed counter-based draws (slot index), so two runs with the same
// (seed, stream) share every edge clock regardless of what else happens.  A
// node v infected at t schedules t + tau_{v->w} for each healthy neighbour w
// (next-reaction method, lazy-deletion heap).  External infection is a
// Poisson process with the board's total rate; each hit picks a node in
// proportion to its rate and infects it when healthy.  The next external
// time is redrawn after a hit and whenever a policy changes its rates.
//
// Ties between event times are broken by (node id, cause): intrinsic before
// external before policy wakeups.

#include <cmath>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <vector>

#include "episim/error.hpp"
#include "episim/graph.hpp"
#include "episim/parallel.hpp"
#include "episim/policy.hpp"
#include "episim/rate_board.hpp"
#include "episim/rng.hpp"

namespace episim {

enum class Cause : std::uint8_t { seed = 0, intrinsic = 1, external = 2 };

inline const char* cause_name(Cause c) {
  switch (c) {
    case Cause::seed: return "seed";
    case Cause::intrinsic: return "intrinsic";
    case Cause::external: return "external";
  }
  return "?";
}

struct EngineConfig {
  double beta = 1.0;
  NodeId initial_infected = 0;
  std::optional<double> max_time;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  bool record_events = true;
};

struct InfectionEvent {
  double time;
  NodeId node;
  Cause cause;
};

struct Trace {
  std::vector<InfectionEvent> events;
  std::optional<double> finish_time;
  std::size_t infected_count = 0;
  std::size_t external_infections = 0;
  std::size_t idle_hits = 0;
  std::uint64_t stream = 0;
};

struct TraceSummary {
  std::size_t replicate = 0;
  std::optional<double> finish_time;
  std::size_t events = 0;
  std::uint64_t seed_stream = 0;
};

namespace detail {

struct Pending {
  double time;
  NodeId node;
  bool operator>(const Pending& o) const noexcept {
    return time > o.time || (time == o.time && node > o.node);
  }
};

// Domain for the external-hit lane of policy layer k.
inline Domain external_domain(std::size_t layer) {
  return static_cast<Domain>(static_cast<std::uint64_t>(Domain::external) + 0x100 * layer);
}

}  // namespace detail

// Runs one realisation.  `layers` are superposed external policies; each
// layer has its own rate board and its own hit stream, so a layer whose
// rates never change produces the same hit sequence in every run sharing
// (seed, stream).
inline Trace simulate(const Graph& g, std::span<Policy* const> layers, const EngineConfig& cfg) {
  const std::size_t n = g.node_count();
  if (!(cfg.beta > 0.0)) throw InvalidParameter("beta must be positive");
  if (cfg.initial_infected >= n) throw InvalidParameter("initial infected node out of range");

  InfectionState state(n);
  Trace trace;
  trace.stream = cfg.stream;
  if (cfg.record_events) trace.events.reserve(n);

  const double inf = std::numeric_limits<double>::infinity();
  std::priority_queue<detail::Pending, std::vector<detail::Pending>, std::greater<>> heap;
  std::vector<double> tentative(n, inf);

  const std::size_t nl = layers.size();
  std::vector<RateBoard> boards(nl, RateBoard(n));
  std::vector<Rng> hit_rng;
  hit_rng.reserve(nl);
  for (std::size_t k = 0; k < nl; ++k) hit_rng.emplace_back(cfg.seed, cfg.stream, detail::external_domain(k));
  std::vector<double> next_hit(nl, inf);
  std::vector<Envelope> envelopes(nl);
  for (std::size_t k = 0; k < nl; ++k) envelopes[k] = layers[k]->envelope();

  const double idle_budget =
      std::max(static_cast<double>(n) * static_cast<double>(n), 4096.0) * (1.0 + 1.0 / cfg.beta);
  double idle_run = 0.0;

  auto check_envelope = [&](std::size_t k) {
    const auto& env = envelopes[k];
    if (env.binding() && boards[k].total() > env.l_max * (1.0 + 1e-9) + 1e-12)
      throw PolicyContractError("aggregate external rate " + std::to_string(boards[k].total()) +
                                " exceeds declared L_max " + std::to_string(env.l_max));
  };

  auto refresh = [&](std::size_t k, bool force, double now) {
    if (!force && !boards[k].dirty()) return;
    check_envelope(k);
    const double total = boards[k].total();
    next_hit[k] = total > 0.0 ? now + hit_rng[k].exponential(total) : inf;
    boards[k].clear_dirty();
  };

  auto infect = [&](NodeId v, double t, Cause cause) {
    state.infected[v] = 1;
    ++state.infected_count;
    state.clock = t;
    if (cfg.record_events) trace.events.push_back({t, v, cause});
    if (cause == Cause::external) ++trace.external_infections;
    const auto nb = g.neighbors(v);
    const std::size_t base = g.slot_begin(v);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const NodeId w = nb[i];
      if (state.infected[w]) continue;
      const double at = t + bits_to_exponential(keyed_bits(cfg.seed, cfg.stream, Domain::edge_clock, base + i), cfg.beta);
      if (at < tentative[w]) {
        tentative[w] = at;
        heap.push({at, w});
      }
    }
  };

  infect(cfg.initial_infected, 0.0, Cause::seed);
  {
    const PolicyContext ctx{g, state, 0.0};
    for (std::size_t k = 0; k < nl; ++k) {
      layers[k]->reset(ctx, boards[k]);
      refresh(k, true, 0.0);
    }
  }

  while (!state.complete()) {
    while (!heap.empty() && state.infected[heap.top().node]) heap.pop();
    const double t_int = heap.empty() ? inf : heap.top().time;
    double t_ext = inf;
    std::size_t ext_layer = 0;
    for (std::size_t k = 0; k < nl; ++k)
      if (next_hit[k] < t_ext) {
        t_ext = next_hit[k];
        ext_layer = k;
      }
    double t_wake = inf;
    std::size_t wake_layer = 0;
    for (std::size_t k = 0; k < nl; ++k) {
      const double w = layers[k]->next_wakeup();
      if (w < t_wake) {
        t_wake = w;
        wake_layer = k;
      }
    }
    const double t = std::min({t_int, t_ext, t_wake});
    if (cfg.max_time && t > *cfg.max_time) break;
    if (t == inf) {
      if (cfg.max_time) break;
      throw NonTermination("no infection can occur: " + std::to_string(n - state.infected_count) +
                           " healthy nodes unreachable and external rates are zero");
    }

    std::size_t fired = nl;  // layer whose hit clock was consumed
    NodeId newly = kNoNode;
    bool idle = false;
    if (t_int <= t_ext && t_int <= t_wake) {
      newly = heap.top().node;
      heap.pop();
      infect(newly, t, Cause::intrinsic);
    } else if (t_ext <= t_wake) {
      fired = ext_layer;
      const auto v = static_cast<NodeId>(boards[ext_layer].sample(hit_rng[ext_layer].uniform()));
      if (!state.infected[v]) {
        newly = v;
        infect(v, t, Cause::external);
      } else {
        idle = true;
        ++trace.idle_hits;
        const PolicyContext ctx{g, state, t};
        layers[ext_layer]->on_idle_hit(v, ctx, boards[ext_layer]);
      }
    } else {
      const PolicyContext ctx{g, state, t};
      layers[wake_layer]->on_wakeup(ctx, boards[wake_layer]);
    }

    if (newly != kNoNode) {
      idle_run = 0.0;
      const PolicyContext ctx{g, state, t};
      for (std::size_t k = 0; k < nl; ++k) layers[k]->on_infection(newly, ctx, boards[k]);
    } else if (idle && ++idle_run > idle_budget) {
      throw NonTermination("external hits keep landing on infected nodes (guard budget exhausted)");
    }
    for (std::size_t k = 0; k < nl; ++k) refresh(k, k == fired, t);
  }

  trace.infected_count = state.infected_count;
  if (state.complete()) trace.finish_time = state.clock;
  return trace;
}

inline Trace simulate(const Graph& g, Policy& policy, const EngineConfig& cfg) {
  Policy* layer = &policy;
  return simulate(g, std::span<Policy* const>(&layer, 1), cfg);
}

// Builds a fresh policy for one replicate; the argument is the replicate's
// stream id (policies derive their private randomness from it).
using PolicyFactory = std::function<std::unique_ptr<Policy>(std::uint64_t stream)>;

// Replicate k runs on stream k under cfg.seed.  Output is ordered by
// replicate index whatever the thread count.
inline std::vector<TraceSummary> simulate_batch(const Graph& g, const PolicyFactory& factory,
                                                const EngineConfig& cfg, std::size_t replicates,
                                                unsigned threads = default_threads()) {
  if (replicates < 1) throw InvalidParameter("replicates must be >= 1");
  std::vector<TraceSummary> out(replicates);
  parallel_for(replicates, threads, [&](std::size_t k) {
    EngineConfig local = cfg;
    local.stream = k;
    local.record_events = false;
    auto policy = factory(k);
    const Trace t = simulate(g, *policy, local);
    out[k] = {k, t.finish_time, t.infected_count, k};
  });
  return out;
}

inline void write_trace_csv(std::ostream& os, const Trace& trace) {
  const auto old = os.precision(17);
  os << "time,node,cause\n";
  for (const auto& e : trace.events) os << e.time << ',' << e.node << ',' << cause_name(e.cause) << '\n';
  os.precision(old);
}

inline void write_batch_csv(std::ostream& os, std::span<const TraceSummary> rows) {
  const auto old = os.precision(17);
  os << "replicate,finish_time,events,seed_stream\n";
  for (const auto& r : rows) {
    os << r.replicate << ',';
    if (r.finish_time) os << *r.finish_time;
    else os << "NA";
    os << ',' << r.events << ',' << r.seed_stream << '\n';
  }
  os.precision(old);
}

}  // namespace episim
