#pragma once

// External-infection policies.  All of them speak the Policy contract from
// policy.hpp; PolicySpec + make_policy build them from configuration.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "episim/error.hpp"
#include "episim/graph.hpp"
#include "episim/partition.hpp"
#include "episim/policy.hpp"
#include "episim/rng.hpp"

namespace episim {

class NullPolicy final : public Policy {
 public:
  Envelope envelope() const override { return {0.0, 0.0}; }
  void reset(const PolicyContext&, RateBoard& board) override { board.fill(0.0); }
};

// L/n on every node, infected or not (rate landing on infected nodes is
// wasted), so the policy never looks at the infection state.
class RandomHomogeneous final : public Policy {
 public:
  explicit RandomHomogeneous(double total_rate) : rate_(total_rate) {
    if (!(total_rate > 0.0)) throw InvalidParameter("random_homogeneous needs L > 0");
  }
  Envelope envelope() const override { return {rate_, rate_}; }
  void reset(const PolicyContext& ctx, RateBoard& board) override {
    board.fill(rate_ / static_cast<double>(ctx.graph.node_count()));
  }

 private:
  double rate_;
};

// Greedy subgraph infection: the whole budget sits on one healthy node of a
// piece with the fewest infected nodes (lowest piece index on ties, lowest
// healthy node id inside the piece).
class Gsi final : public Policy {
 public:
  Gsi(std::shared_ptr<const Partition> partition, double total_rate)
      : partition_(std::move(partition)), rate_(total_rate) {
    if (!partition_) throw InvalidParameter("gsi needs a partition");
    if (!(total_rate > 0.0)) throw InvalidParameter("gsi needs L > 0");
  }

  Envelope envelope() const override { return {rate_, rate_}; }

  void reset(const PolicyContext& ctx, RateBoard& board) override {
    const auto& p = *partition_;
    if (p.piece_of.size() != ctx.graph.node_count()) throw InvalidParameter("partition does not match the graph");
    board.fill(0.0);
    infected_.assign(p.g(), 0);
    cursor_.assign(p.g(), 0);
    open_.clear();
    for (std::size_t v = 0; v < p.piece_of.size(); ++v)
      if (ctx.state.is_infected(static_cast<NodeId>(v))) ++infected_[p.piece_of[v]];
    for (std::size_t i = 0; i < p.g(); ++i) {
      advance(i, ctx.state);
      if (cursor_[i] < p.pieces[i].size()) open_.emplace(infected_[i], i);
    }
    target_ = kNoNode;
    retarget(ctx.state, board);
  }

  void on_infection(NodeId v, const PolicyContext& ctx, RateBoard& board) override {
    const std::size_t i = partition_->piece_of[v];
    open_.erase({infected_[i], i});
    ++infected_[i];
    advance(i, ctx.state);
    if (cursor_[i] < partition_->pieces[i].size()) open_.emplace(infected_[i], i);
    retarget(ctx.state, board);
  }

  NodeId target() const noexcept { return target_; }

 private:
  void advance(std::size_t i, const InfectionState& state) {
    const auto& piece = partition_->pieces[i];
    while (cursor_[i] < piece.size() && state.is_infected(piece[cursor_[i]])) ++cursor_[i];
  }

  void retarget(const InfectionState& /*state*/, RateBoard& board) {
    const NodeId next = open_.empty() ? kNoNode : partition_->pieces[open_.begin()->second][cursor_[open_.begin()->second]];
    if (next == target_) return;
    if (target_ != kNoNode) board.set(target_, 0.0);
    if (next != kNoNode) board.set(next, rate_);
    target_ = next;
  }

  std::shared_ptr<const Partition> partition_;
  double rate_;
  std::vector<std::size_t> infected_;
  std::vector<std::size_t> cursor_;  // first possibly-healthy position per piece
  std::set<std::pair<std::size_t, std::size_t>> open_;  // (infected count, piece) with healthy nodes
  NodeId target_ = kNoNode;
};

// Long-range links as external rates: a healthy endpoint receives beta_link
// for every link whose other endpoint is infected.
class LinkPolicy : public Policy {
 public:
  LinkPolicy(std::vector<Edge> links, double beta_link) : links_(std::move(links)), beta_(beta_link) {
    if (!(beta_link > 0.0)) throw InvalidParameter("links need beta_link > 0");
  }

  Envelope envelope() const override { return {0.0, beta_ * static_cast<double>(links_.size())}; }

  void reset(const PolicyContext& ctx, RateBoard& board) override {
    const std::size_t n = ctx.graph.node_count();
    for (auto [a, b] : links_)
      if (a >= n || b >= n) throw InvalidParameter("link references a node out of range");
    board.fill(0.0);
    hot_.assign(n, 0);
    for (auto [a, b] : links_) touch(a, b, +1, ctx.state, board);
  }

  void on_infection(NodeId v, const PolicyContext& ctx, RateBoard& board) override {
    hot_[v] = 0;
    board.set(v, 0.0);
    for (auto [a, b] : links_) {
      if (a == v && b != v) bump(b, +1, ctx.state, board);
      else if (b == v && a != v) bump(a, +1, ctx.state, board);
    }
  }

  const std::vector<Edge>& links() const noexcept { return links_; }

 protected:
  // Adds (sign=+1) or removes (sign=-1) the contribution of link (a,b).
  void touch(NodeId a, NodeId b, int sign, const InfectionState& state, RateBoard& board) {
    if (a == b) return;
    if (state.is_infected(a)) bump(b, sign, state, board);
    if (state.is_infected(b)) bump(a, sign, state, board);
  }

  void bump(NodeId v, int sign, const InfectionState& state, RateBoard& board) {
    if (state.is_infected(v)) return;
    hot_[v] = static_cast<std::uint32_t>(static_cast<int>(hot_[v]) + sign);
    board.set(v, beta_ * hot_[v]);
  }

  std::vector<Edge> links_;
  double beta_;
  std::vector<std::uint32_t> hot_;  // per healthy node: links to infected nodes
};

class StaticLinks final : public LinkPolicy {
 public:
  using LinkPolicy::LinkPolicy;
};

// Links whose endpoints are redrawn uniformly at exponential rate
// rewire_rate per link.  With rewire_rate = 0 this is StaticLinks over
// initial_links().
class DynamicLinks final : public LinkPolicy {
 public:
  DynamicLinks(std::size_t n, std::size_t count, double beta_link, double rewire_rate, std::uint64_t seed,
               std::uint64_t stream)
      : LinkPolicy({}, beta_link), n_(n), rewire_(rewire_rate), rng_(seed, stream, Domain::policy) {
    if (count < 1) throw InvalidParameter("dynamic_links needs count >= 1");
    if (!(rewire_rate >= 0.0)) throw InvalidParameter("rewire_rate must be >= 0");
    if (n < 2) throw InvalidParameter("dynamic_links needs at least two nodes");
    links_.reserve(count);
    for (std::size_t k = 0; k < count; ++k) links_.push_back(draw_link());
    initial_ = links_;
  }

  const std::vector<Edge>& initial_links() const noexcept { return initial_; }

  void reset(const PolicyContext& ctx, RateBoard& board) override {
    links_ = initial_;
    LinkPolicy::reset(ctx, board);
    schedule(ctx.time);
  }

  double next_wakeup() const override { return wakeup_; }

  void on_wakeup(const PolicyContext& ctx, RateBoard& board) override {
    const std::size_t k = rng_.below(links_.size());
    touch(links_[k].first, links_[k].second, -1, ctx.state, board);
    links_[k] = draw_link();
    touch(links_[k].first, links_[k].second, +1, ctx.state, board);
    schedule(ctx.time);
  }

 private:
  Edge draw_link() {
    const auto a = static_cast<NodeId>(rng_.below(n_));
    auto b = static_cast<NodeId>(rng_.below(n_ - 1));
    if (b >= a) ++b;
    return {a, b};
  }

  void schedule(double now) {
    const double total = rewire_ * static_cast<double>(links_.size());
    wakeup_ = total > 0.0 ? now + rng_.exponential(total) : std::numeric_limits<double>::infinity();
  }

  std::size_t n_;
  double rewire_;
  Rng rng_;
  std::vector<Edge> initial_;
  double wakeup_ = std::numeric_limits<double>::infinity();
};

// Agents with unconstrained movement.  Each agent sits on one node and
// pushes rate_per_agent onto it.  When that node becomes infected (by any
// cause) or the agent's hit lands on an already infected node, the agent
// jumps to a uniformly random node.
class MobileAgents final : public Policy {
 public:
  MobileAgents(std::size_t agents, double rate_per_agent, std::uint64_t seed, std::uint64_t stream)
      : count_(agents), rate_(rate_per_agent), rng_(seed, stream, Domain::policy) {
    if (agents < 1) throw InvalidParameter("mobile_agents needs at least one agent");
    if (!(rate_per_agent > 0.0)) throw InvalidParameter("mobile_agents needs rate_per_agent > 0");
  }

  Envelope envelope() const override { return {0.0, rate_ * static_cast<double>(count_)}; }

  void reset(const PolicyContext& ctx, RateBoard& board) override {
    n_ = ctx.graph.node_count();
    board.fill(0.0);
    load_.assign(n_, 0);
    position_.resize(count_);
    for (auto& p : position_) {
      p = static_cast<NodeId>(rng_.below(n_));
      place(p, +1, board);
    }
  }

  void on_infection(NodeId v, const PolicyContext&, RateBoard& board) override {
    if (load_[v] == 0) return;
    for (auto& p : position_)
      if (p == v) jump(p, board);
  }

  void on_idle_hit(NodeId v, const PolicyContext&, RateBoard& board) override {
    for (auto& p : position_)
      if (p == v) {
        jump(p, board);
        return;
      }
  }

  const std::vector<NodeId>& positions() const noexcept { return position_; }

 private:
  void place(NodeId v, int sign, RateBoard& board) {
    load_[v] = static_cast<std::uint32_t>(static_cast<int>(load_[v]) + sign);
    board.set(v, rate_ * load_[v]);
  }
  void jump(NodeId& p, RateBoard& board) {
    place(p, -1, board);
    p = static_cast<NodeId>(rng_.below(n_));
    place(p, +1, board);
  }

  std::size_t count_;
  double rate_;
  Rng rng_;
  std::size_t n_ = 0;
  std::vector<NodeId> position_;
  std::vector<std::uint32_t> load_;
};

// Heuristic adversary: the whole budget on the healthy node farthest (in
// hops) from the infected set, lowest id on ties.  Distances are maintained
// incrementally as new sources appear.
class GreedyFrontierAdversary final : public Policy {
 public:
  explicit GreedyFrontierAdversary(double total_rate) : rate_(total_rate) {
    if (!(total_rate > 0.0)) throw InvalidParameter("greedy_frontier_adversary needs L > 0");
  }

  Envelope envelope() const override { return {rate_, rate_}; }

  void reset(const PolicyContext& ctx, RateBoard& board) override {
    const std::size_t n = ctx.graph.node_count();
    board.fill(0.0);
    std::vector<NodeId> sources;
    for (std::size_t v = 0; v < n; ++v)
      if (ctx.state.is_infected(static_cast<NodeId>(v))) sources.push_back(static_cast<NodeId>(v));
    dist_ = bfs_distances(ctx.graph, sources);
    healthy_.clear();
    for (std::size_t v = 0; v < n; ++v)
      if (!ctx.state.is_infected(static_cast<NodeId>(v))) healthy_.emplace(key(static_cast<NodeId>(v)));
    target_ = kNoNode;
    retarget(board);
  }

  void on_infection(NodeId v, const PolicyContext& ctx, RateBoard& board) override {
    healthy_.erase(key(v));
    dist_[v] = 0;
    queue_.assign(1, v);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const NodeId u = queue_[head];
      for (NodeId w : ctx.graph.neighbors(u)) {
        if (dist_[w] <= dist_[u] + 1) continue;
        const bool healthy = !ctx.state.is_infected(w);
        if (healthy) healthy_.erase(key(w));
        dist_[w] = dist_[u] + 1;
        if (healthy) healthy_.emplace(key(w));
        queue_.push_back(w);
      }
    }
    retarget(board);
  }

  NodeId target() const noexcept { return target_; }

 private:
  std::pair<std::int64_t, NodeId> key(NodeId v) const { return {-static_cast<std::int64_t>(dist_[v]), v}; }

  void retarget(RateBoard& board) {
    const NodeId next = healthy_.empty() ? kNoNode : healthy_.begin()->second;
    if (next == target_) return;
    if (target_ != kNoNode) board.set(target_, 0.0);
    if (next != kNoNode) board.set(next, rate_);
    target_ = next;
  }

  double rate_;
  std::vector<std::uint32_t> dist_;
  std::set<std::pair<std::int64_t, NodeId>> healthy_;
  std::vector<NodeId> queue_;
  NodeId target_ = kNoNode;
};

enum class PolicyKind {
  null,
  random_homogeneous,
  gsi,
  static_links,
  dynamic_links,
  mobile_agents,
  greedy_frontier_adversary,
};

inline const char* policy_kind_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::null: return "null";
    case PolicyKind::random_homogeneous: return "random_homogeneous";
    case PolicyKind::gsi: return "gsi";
    case PolicyKind::static_links: return "static_links";
    case PolicyKind::dynamic_links: return "dynamic_links";
    case PolicyKind::mobile_agents: return "mobile_agents";
    case PolicyKind::greedy_frontier_adversary: return "greedy_frontier_adversary";
  }
  return "?";
}

inline PolicyKind parse_policy_kind(const std::string& s) {
  for (auto k : {PolicyKind::null, PolicyKind::random_homogeneous, PolicyKind::gsi, PolicyKind::static_links,
                 PolicyKind::dynamic_links, PolicyKind::mobile_agents, PolicyKind::greedy_frontier_adversary})
    if (s == policy_kind_name(k)) return k;
  throw InvalidParameter("unknown policy kind '" + s + "'");
}

// Immutable description of a policy; each replicate builds its own handle.
struct PolicySpec {
  PolicyKind kind = PolicyKind::null;
  double L = 1.0;  // total budget (random_homogeneous, gsi, adversary)
  std::vector<Edge> links;  // static_links
  double beta_link = 1.0;
  std::size_t link_count = 1;  // dynamic_links
  double rewire_rate = 0.0;
  std::size_t agents = 1;  // mobile_agents
  double rate_per_agent = 1.0;
  std::uint64_t seed = 0;  // policy-private randomness
  std::shared_ptr<const Partition> partition;  // gsi

  Envelope envelope() const {
    switch (kind) {
      case PolicyKind::null: return {0.0, 0.0};
      case PolicyKind::random_homogeneous:
      case PolicyKind::gsi:
      case PolicyKind::greedy_frontier_adversary: return {L, L};
      case PolicyKind::static_links: return {0.0, beta_link * static_cast<double>(links.size())};
      case PolicyKind::dynamic_links: return {0.0, beta_link * static_cast<double>(link_count)};
      case PolicyKind::mobile_agents: return {0.0, rate_per_agent * static_cast<double>(agents)};
    }
    return {};
  }
};

inline std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const Graph& g, std::uint64_t stream) {
  switch (spec.kind) {
    case PolicyKind::null: return std::make_unique<NullPolicy>();
    case PolicyKind::random_homogeneous: return std::make_unique<RandomHomogeneous>(spec.L);
    case PolicyKind::gsi: return std::make_unique<Gsi>(spec.partition, spec.L);
    case PolicyKind::static_links: return std::make_unique<StaticLinks>(spec.links, spec.beta_link);
    case PolicyKind::dynamic_links:
      return std::make_unique<DynamicLinks>(g.node_count(), spec.link_count, spec.beta_link, spec.rewire_rate,
                                            spec.seed, stream);
    case PolicyKind::mobile_agents:
      return std::make_unique<MobileAgents>(spec.agents, spec.rate_per_agent, spec.seed, stream);
    case PolicyKind::greedy_frontier_adversary: return std::make_unique<GreedyFrontierAdversary>(spec.L);
  }
  throw InvalidParameter("unknown policy kind");
}

}  // namespace episim
