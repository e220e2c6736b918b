#include <gtest/gtest.h>

#include <sstream>

#include "episim/engine.hpp"
#include "episim/policies.hpp"
#include "oracles.hpp"

using namespace episim;

namespace {

std::vector<double> finish_times(const Graph& g, const PolicySpec& spec, std::size_t reps, std::uint64_t seed,
                                 double beta = 1.0) {
  EngineConfig cfg;
  cfg.seed = seed;
  cfg.beta = beta;
  std::vector<double> out;
  for (const auto& r : simulate_batch(g, [&](std::uint64_t s) { return make_policy(spec, g, s); }, cfg, reps))
    out.push_back(*r.finish_time);
  return out;
}

double mean_of(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

// Places all of its rate on node 0, even after node 0 is infected.
class StuckPolicy final : public Policy {
 public:
  explicit StuckPolicy(double declared) : declared_(declared) {}
  Envelope envelope() const override { return {0.0, declared_}; }
  void reset(const PolicyContext&, RateBoard& board) override {
    board.fill(0.0);
    board.set(0, 2.0);
  }

 private:
  double declared_;
};

}  // namespace

TEST(Engine, PathMeanIsLength) {
  const auto t = finish_times(gen_line(6), {}, 20000, 1);
  EXPECT_NEAR(mean_of(t), 5.0, 5.0 * 0.02);
}

TEST(Engine, StarFromCentreIsHarmonic) {
  for (std::size_t m : {2u, 4u, 8u}) {
    const auto t = finish_times(oracle::star(m), {}, 20000, 2);
    EXPECT_NEAR(mean_of(t), oracle::harmonic(m), oracle::harmonic(m) * 0.02) << m;
  }
}

TEST(Engine, MatchesCtmcOnSmallGraphs) {
  const std::vector<Edge> kite{{0, 1}, {1, 2}, {0, 2}, {2, 3}};
  const Graph g = Graph::from_edges(4, kite);
  PolicySpec homog{.kind = PolicyKind::random_homogeneous, .L = 1.0};
  const double exact_null = oracle::expected_finish(g, 0, 1.0, [](auto, auto) { return 0.0; });
  const double exact_l = oracle::expected_finish(g, 0, 1.0, [](auto, auto) { return 0.25; });
  EXPECT_NEAR(mean_of(finish_times(g, {}, 30000, 3)), exact_null, exact_null * 0.02);
  EXPECT_NEAR(mean_of(finish_times(g, homog, 30000, 4)), exact_l, exact_l * 0.02);
  const double exact_b2 = oracle::expected_finish(g, 0, 2.0, [](auto, auto) { return 0.25; });
  EXPECT_NEAR(mean_of(finish_times(g, homog, 30000, 5, 2.0)), exact_b2, exact_b2 * 0.02);
}

TEST(Engine, OracleEnumeratesThirtyConnectedGraphs) {
  std::size_t total = 0;
  for (std::size_t n = 2; n <= 5; ++n) total += oracle::connected_graphs(n).size();
  EXPECT_EQ(total, 30u);  // 1 + 2 + 6 + 21
}

TEST(Engine, DeterministicPerSeedAndStream) {
  const Graph g = gen_grid(64, 2);
  RandomHomogeneous p1(1.0), p2(1.0), p3(1.0);
  EngineConfig cfg{.seed = 9, .stream = 4};
  const Trace a = simulate(g, p1, cfg), b = simulate(g, p2, cfg);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    EXPECT_EQ(a.events[i].time, b.events[i].time);
    EXPECT_EQ(a.events[i].node, b.events[i].node);
  }
  cfg.stream = 5;
  EXPECT_NE(simulate(g, p3, cfg).finish_time, a.finish_time);
}

TEST(Engine, TraceInvariants) {
  const Graph g = gen_ring(50);
  RandomHomogeneous p(2.0);
  const Trace t = simulate(g, p, {.seed = 1});
  ASSERT_EQ(t.events.size(), 50u);
  EXPECT_EQ(t.events[0].cause, Cause::seed);
  std::vector<int> seen(50, 0);
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    ++seen[t.events[i].node];
    if (i) {
      EXPECT_GE(t.events[i].time, t.events[i - 1].time);
    }
  }
  for (int s : seen) EXPECT_EQ(s, 1);
  EXPECT_EQ(*t.finish_time, t.events.back().time);
  std::size_t ext = 0;
  for (const auto& e : t.events) ext += e.cause == Cause::external;
  EXPECT_EQ(ext, t.external_infections);
}

// Shared edge clocks: adding external rate can only speed up every node.
TEST(Engine, CouplingNullVersusExternal) {
  const Graph g = gen_ring(40);
  for (std::uint64_t s = 0; s < 200; ++s) {
    NullPolicy none;
    RandomHomogeneous some(1.5);
    const EngineConfig cfg{.seed = 77, .stream = s};
    const Trace a = simulate(g, none, cfg), b = simulate(g, some, cfg);
    std::vector<double> ta(40), tb(40);
    for (const auto& e : a.events) ta[e.node] = e.time;
    for (const auto& e : b.events) tb[e.node] = e.time;
    for (NodeId v = 0; v < 40; ++v) ASSERT_LE(tb[v], ta[v]) << "stream " << s << " node " << v;
  }
}

TEST(Engine, CouplingExtraLayerIsFaster) {
  const Graph g = gen_grid(49, 2);
  for (std::uint64_t s = 0; s < 200; ++s) {
    RandomHomogeneous base(1.0), again(1.0), extra(0.7);
    Policy* one[] = {&base};
    Policy* two[] = {&again, &extra};
    const EngineConfig cfg{.seed = 5, .stream = s};
    const Trace a = simulate(g, std::span<Policy* const>(one), cfg);
    const Trace b = simulate(g, std::span<Policy* const>(two), cfg);
    ASSERT_LE(*b.finish_time, *a.finish_time) << s;
  }
}

TEST(Engine, EnvelopeViolationIsReported) {
  StuckPolicy p(1.0);
  EXPECT_THROW(simulate(gen_line(3), p, {}), PolicyContractError);
}

TEST(Engine, NoPossibleEventIsNonTermination) {
  const std::vector<Edge> e{{0, 1}, {2, 3}};
  const Graph g = Graph::from_edges(4, e);
  NullPolicy p;
  EXPECT_THROW(simulate(g, p, {}), NonTermination);
  EngineConfig cfg;
  cfg.max_time = 50.0;
  const Trace t = simulate(g, p, cfg);
  EXPECT_FALSE(t.finish_time);
  EXPECT_EQ(t.infected_count, 2u);
}

TEST(Engine, IdleHitGuardFires) {
  const std::vector<Edge> e{{0, 1}};
  const Graph g = Graph::from_edges(3, e);
  StuckPolicy p(5.0);
  EXPECT_THROW(simulate(g, p, {}), NonTermination);
}

TEST(Engine, RejectsBadConfig) {
  NullPolicy p;
  EXPECT_THROW(simulate(gen_line(3), p, {.beta = 0.0}), InvalidParameter);
  EXPECT_THROW(simulate(gen_line(3), p, {.initial_infected = 3}), InvalidParameter);
}

TEST(Engine, SingleNodeFinishesAtZero) {
  NullPolicy p;
  const Trace t = simulate(gen_line(1), p, {});
  EXPECT_EQ(*t.finish_time, 0.0);
}

TEST(Engine, BatchIndependentOfThreadCount) {
  const Graph g = gen_ring(64);
  const PolicySpec spec{.kind = PolicyKind::random_homogeneous, .L = 1.0};
  auto f = [&](std::uint64_t s) { return make_policy(spec, g, s); };
  const auto a = simulate_batch(g, f, {.seed = 3}, 40, 1);
  const auto b = simulate_batch(g, f, {.seed = 3}, 40, 4);
  for (std::size_t k = 0; k < 40; ++k) {
    EXPECT_EQ(a[k].finish_time, b[k].finish_time);
    EXPECT_EQ(a[k].seed_stream, k);
  }
}

TEST(Engine, CsvFormats) {
  NullPolicy p;
  const Trace t = simulate(gen_line(2), p, {.seed = 1});
  std::ostringstream os;
  write_trace_csv(os, t);
  EXPECT_EQ(os.str().rfind("time,node,cause\n0,0,seed\n", 0), 0u);
  std::vector<TraceSummary> rows{{0, 1.5, 2, 0}, {1, std::nullopt, 1, 1}};
  std::ostringstream bs;
  write_batch_csv(bs, rows);
  EXPECT_EQ(bs.str(), "replicate,finish_time,events,seed_stream\n0,1.5,2,0\n1,NA,1,1\n");
}
