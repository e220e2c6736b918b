#pragma once

// The external-rate contract shared by the engine and every policy.

#include <cstdint>
#include <limits>
#include <vector>

#include "episim/graph.hpp"
#include "episim/rate_board.hpp"

namespace episim {

struct InfectionState {
  std::vector<std::uint8_t> infected;
  std::size_t infected_count = 0;
  double clock = 0.0;

  explicit InfectionState(std::size_t n = 0) : infected(n, 0) {}

  bool is_infected(NodeId v) const noexcept { return infected[v] != 0; }
  std::size_t size() const noexcept { return infected.size(); }
  bool complete() const noexcept { return infected_count == infected.size(); }
};

// Declared bounds on the aggregate external rate sum_i L_i(t).
struct Envelope {
  double l_min = 0.0;
  double l_max = std::numeric_limits<double>::infinity();

  bool binding() const noexcept { return l_max < std::numeric_limits<double>::infinity(); }
};

struct PolicyContext {
  const Graph& graph;
  const InfectionState& state;
  double time;
};

// A policy owns the external rates L_i(t) written to a RateBoard.  The engine
// polls it at event instants only: at reset, after every infection, after a
// hit on an already infected node, and at the policy's own wakeups.  Rates
// are piecewise constant between those instants.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual Envelope envelope() const = 0;
  virtual void reset(const PolicyContext& ctx, RateBoard& board) = 0;
  virtual void on_infection(NodeId /*v*/, const PolicyContext& /*ctx*/, RateBoard& /*board*/) {}
  // An external hit landed on a node that was already infected.
  virtual void on_idle_hit(NodeId /*v*/, const PolicyContext& /*ctx*/, RateBoard& /*board*/) {}
  // Absolute time of the next policy-internal event (e.g. link rewiring).
  virtual double next_wakeup() const { return std::numeric_limits<double>::infinity(); }
  virtual void on_wakeup(const PolicyContext& /*ctx*/, RateBoard& /*board*/) {}
};

}  // namespace episim
