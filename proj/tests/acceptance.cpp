// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.  Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "episim/analytics.hpp"
#include "episim/conductance.hpp"
#include "episim/dominators.hpp"
#include "episim/engine.hpp"
#include "episim/partition.hpp"
#include "episim/policies.hpp"
#include "episim/stats.hpp"
#include "oracles.hpp"

using namespace episim;

namespace {

constexpr double kOracleTol = 0.01;       // 1
constexpr double kClosedFormTol = 0.01;   // 2
constexpr double kLineLawTol = 0.02;      // 3
constexpr double kRingSlope = 0.50, kRingSlopeTol = 0.10, kLineSlopeTol = 0.05;  // 4
constexpr double kGsiSlope = 0.50, kGsiSlopeTol = 0.07;                          // 5
constexpr double kGridSlope = 1.0 / 3.0, kGridSlopeTol = 0.08, kFppSlopeTol = 0.07;  // 6
constexpr double kChainTol = 0.01;        // 8
constexpr double kCouponTol = 0.02;       // 9
constexpr double kKsAlpha = 0.01;         // 11

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("[criterion %2d] %s: %s (%s) [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
  failures += !o.pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double mean_finish(const Graph& g, const PolicySpec& spec, std::size_t reps, std::uint64_t seed) {
  EngineConfig cfg;
  cfg.seed = seed;
  double s = 0.0;
  for (const auto& r : simulate_batch(g, [&](std::uint64_t k) { return make_policy(spec, g, k); }, cfg, reps))
    s += *r.finish_time;
  return s / static_cast<double>(reps);
}

std::vector<double> finish_sample(const Graph& g, const PolicySpec& spec, std::size_t reps, std::uint64_t seed) {
  EngineConfig cfg;
  cfg.seed = seed;
  std::vector<double> out;
  for (const auto& r : simulate_batch(g, [&](std::uint64_t k) { return make_policy(spec, g, k); }, cfg, reps))
    out.push_back(*r.finish_time);
  return out;
}

ExperimentPlan sweep(Family f, std::vector<std::size_t> sizes, PolicyKind kind, LogCorrection c,
                     SampleSource src = SampleSource::simulate) {
  ExperimentPlan p;
  p.family = f;
  p.dimension = 2;
  p.sizes = std::move(sizes);
  p.policy = {.kind = kind, .L = 1.0};
  p.source = src;
  p.replicates = 200;
  p.correction = c;
  p.master_seed = 20240601;
  return p;
}

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

}  // namespace

int main() {
  criterion(1, "engine vs CTMC on all connected graphs n<=5", [] {
    std::size_t graphs = 0, checked = 0;
    double worst = 0.0;
    std::string worst_at;
    for (std::size_t n = 2; n <= 5; ++n) {
      for (const auto& edges : oracle::connected_graphs(n)) {
        const Graph g = Graph::from_edges(n, edges);
        ++graphs;
        const double rate = 1.0 / static_cast<double>(n);
        const double exact_null = oracle::expected_finish(g, 0, 1.0, [](auto, auto) { return 0.0; });
        const double exact_l = oracle::expected_finish(g, 0, 1.0, [&](auto, auto) { return rate; });
        const double mc_null = mean_finish(g, {.kind = PolicyKind::null}, 100000, 1000 + graphs);
        const double mc_l = mean_finish(g, {.kind = PolicyKind::random_homogeneous, .L = 1.0}, 100000, 2000 + graphs);
        for (auto [mc, ex, tag] : {std::tuple{mc_null, exact_null, "null"}, std::tuple{mc_l, exact_l, "L=1"}}) {
          ++checked;
          const double rel = std::abs(mc - ex) / ex;
          if (rel > worst) {
            worst = rel;
            worst_at = fmt("n=%zu graph#%zu %s", n, graphs, tag);
          }
        }
      }
    }
    return Outcome{graphs >= 10 && worst <= kOracleTol,
                   fmt("%zu graphs, %zu comparisons, worst relative error %.4f at %s, tol %.2f", graphs, checked,
                       worst, worst_at.c_str(), kOracleTol)};
  });

  criterion(2, "closed forms: path and star", [] {
    bool ok = true;
    std::string d;
    const double path = mean_finish(gen_line(11), {}, 100000, 31);
    ok &= std::abs(path - 10.0) / 10.0 <= kClosedFormTol;
    d += fmt("path(11) %.4f vs 10", path);
    for (std::size_t m : {2u, 4u, 8u}) {
      const double h = oracle::harmonic(m);
      const double t = mean_finish(oracle::star(m), {}, 100000, 40 + m);
      ok &= std::abs(t - h) / h <= kClosedFormTol;
      d += fmt("; star(%zu) %.4f vs H=%.4f", m, t, h);
    }
    return Outcome{ok, d + fmt("; tol %.2f", kClosedFormTol)};
  });

  criterion(3, "line cluster law beta t^2 + 2 beta t", [] {
    const std::vector<double> ts{1, 2, 3};
    std::vector<double> grown(3, 0.0), total(3, 0.0);
    const int reps = 100000;
    for (int k = 0; k < reps; ++k) {
      ClusterProcessConfig cfg{.seeding_rate = 1.0, .beta = 1.0, .target_count = SIZE_MAX, .seed = 303,
                               .stream = static_cast<std::uint64_t>(k), .horizon = 3.0};
      const ClusterTrace tr = line_clusters(cfg);
      for (std::size_t i = 0; i < 3; ++i) {
        grown[i] += static_cast<double>(tr.grown_at(ts[i])) / reps;
        total[i] += static_cast<double>(tr.total_at(ts[i])) / reps;
      }
    }
    bool ok = true;
    std::string d;
    for (std::size_t i = 0; i < 3; ++i) {
      const double t = ts[i], law = t * t + 2 * t, with_seeds = t * t + 3 * t + 1;
      ok &= std::abs(grown[i] - law) / law <= kLineLawTol;
      ok &= std::abs(total[i] - with_seeds) / with_seeds <= kLineLawTol;
      d += fmt("%st=%g grown %.4f vs %.1f (total %.4f vs %.1f)", i ? "; " : "", t, grown[i], law, total[i], with_seeds);
    }
    return Outcome{ok, d + fmt("; tol %.2f", kLineLawTol)};
  });

  const std::vector<std::size_t> ring_sizes{64, 256, 1024, 4096, 16384};
  ScalingReport ring_random;

  criterion(4, "ring scaling: random policy and line clusters", [&] {
    ring_random = run_plan(sweep(Family::ring, ring_sizes, PolicyKind::random_homogeneous, LogCorrection::divide_by_log_n));
    const auto lc = run_plan(sweep(Family::ring, ring_sizes, PolicyKind::random_homogeneous, LogCorrection::none,
                                   SampleSource::line_clusters));
    const double s1 = ring_random.fit->slope, s2 = lc.fit->slope;
    return Outcome{within(s1, kRingSlope, kRingSlopeTol) && within(s2, kRingSlope, kLineSlopeTol),
                   fmt("random slope of mean T/ln n = %.4f (raw %.4f, target %.2f +- %.2f); line clusters slope = "
                       "%.4f (target %.2f +- %.2f)",
                       s1, ring_random.fit_raw->slope, kRingSlope, kRingSlopeTol, s2, kRingSlope, kLineSlopeTol)};
  });

  criterion(5, "GSI scaling on the sqrt(n)-segment partition", [&] {
    const auto gsi = run_plan(sweep(Family::ring, ring_sizes, PolicyKind::gsi, LogCorrection::none));
    bool below = true;
    std::string cmp;
    for (std::size_t i = 0; i < gsi.rows.size(); ++i) {
      if (gsi.rows[i].n < 1024) continue;
      const double r = ring_random.rows.size() > i ? ring_random.rows[i].mean : NAN;
      below &= gsi.rows[i].mean <= r;
      cmp += fmt(" n=%zu gsi %.2f vs random %.2f;", gsi.rows[i].n, gsi.rows[i].mean, r);
    }
    const double s = gsi.fit->slope;
    return Outcome{within(s, kGsiSlope, kGsiSlopeTol) && below,
                   fmt("slope of mean T = %.4f (target %.2f +- %.2f);", s, kGsiSlope, kGsiSlopeTol) + cmp};
  });

  criterion(6, "2-d grid scaling and FPP clusters", [] {
    const std::vector<std::size_t> sizes{256, 1024, 4096, 16384};
    const auto grid = run_plan(sweep(Family::grid, sizes, PolicyKind::random_homogeneous, LogCorrection::divide_by_log_n));
    const auto fpp = run_plan(sweep(Family::grid, sizes, PolicyKind::random_homogeneous, LogCorrection::none,
                                    SampleSource::fpp_clusters));
    const double s1 = grid.fit->slope, s2 = fpp.fit->slope;
    return Outcome{within(s1, kGridSlope, kGridSlopeTol) && within(s2, kGridSlope, kFppSlopeTol),
                   fmt("grid slope of mean T/ln n = %.4f (raw %.4f, target %.3f +- %.2f); fpp clusters slope = %.4f "
                       "(target %.3f +- %.2f)",
                       s1, grid.fit_raw->slope, kGridSlope, kGridSlopeTol, s2, kGridSlope, kFppSlopeTol)};
  });

  criterion(7, "dominance suite on rings n=64,256", [] {
    bool ok = true;
    std::string d;
    for (std::size_t n : {64u, 256u}) {
      const Graph g = gen_ring(n);
      const Partition p = partition_ring(g);
      const auto a = dominance_check(g, p, {.kind = PolicyKind::random_homogeneous, .L = 1.0}, 1000, 700 + n);
      const auto b = dominance_check(g, p, {.kind = PolicyKind::gsi, .L = 1.0}, 1000, 800 + n);
      const auto adv = finish_sample(g, {.kind = PolicyKind::greedy_frontier_adversary, .L = 1.0}, 1000, 900 + n);
      ClusterProcessConfig cc{.seeding_rate = 1.0, .beta = 1.0, .target_count = n, .seed = 1000 + n};
      const auto lc = cluster_hitting_times(cc, 1000);
      const auto c = dominance_report(lc, adv, {.seed = 1100 + n});
      ok &= a.verdict.consistent && b.verdict.consistent && c.consistent;
      d += fmt("n=%zu: random<=two_phase %s, gsi<=two_phase %s, line_clusters<=adversary %s; ", n,
               a.verdict.label().c_str(), b.verdict.label().c_str(), c.label().c_str());
    }
    return Outcome{ok, d + "one-sided bootstrap 95%, 2000 resamples"};
  });

  criterion(8, "conductance: even rings and birth chain", [] {
    bool ok = true;
    std::string d;
    for (std::size_t n = 4; n <= 12; n += 2) {
      const auto r = conductance_exact(gen_ring(n));
      ok &= r.cut * (n / 2) == 2 * r.size;
      d += fmt("ring%zu %llu/%llu; ", n, static_cast<unsigned long long>(r.cut), static_cast<unsigned long long>(r.size));
    }
    double worst = 0.0;
    for (std::size_t size : {4u, 8u, 16u})
      for (double psi : {0.5, 1.0}) {
        double s = 0.0;
        for (std::uint64_t k = 0; k < 100000; ++k) s += conductance_chain(size, psi, 88 + size, k);
        const double exact = conductance_chain_mean(size, psi);
        worst = std::max(worst, std::abs(s / 100000 - exact) / exact);
      }
    ok &= worst <= kChainTol;
    return Outcome{ok, d + fmt("chain worst relative error %.4f (tol %.2f)", worst, kChainTol)};
  });

  criterion(9, "coupon-collector phase 1", [] {
    const Graph g = gen_ring(64);
    std::vector<std::vector<NodeId>> pieces(4);
    for (NodeId v = 0; v < 64; ++v) pieces[v / 16].push_back(v);
    const Partition p = finalize_partition(g, pieces, false);
    double s = 0.0;
    for (std::uint64_t k = 0; k < 100000; ++k) s += two_phase_process(g, p, 1.0, PhaseOneMode::homogeneous, 99, k).t1;
    const double m = s / 100000, exact = 25.0 / 3.0;
    return Outcome{std::abs(m - exact) / exact <= kCouponTol,
                   fmt("E[T1] = %.4f vs 4 H_4 = %.4f, tol %.2f", m, exact, kCouponTol)};
  });

  criterion(10, "RGG pipeline n=2000", [] {
    const std::size_t n = 2000;
    const double r = std::sqrt(5.0 * std::log(static_cast<double>(n)) / static_cast<double>(n));
    std::size_t connected = 0, degenerate = 0, runs = 0;
    double sum_t = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Graph g = gen_rgg(n, r, seed);
      if (!is_connected(g)) continue;
      ++connected;
      if (runs >= 50) continue;
      try {
        const Partition p = partition_rgg(g);
        (void)p;
      } catch (const PartitionDegenerate&) {
        ++degenerate;
        continue;
      }
      RandomHomogeneous policy(1.0);
      const Trace t = simulate(g, policy, {.seed = 1010, .stream = seed, .record_events = false});
      if (!t.finish_time) return Outcome{false, "run did not finish"};
      sum_t += *t.finish_time;
      ++runs;
    }
    const double mean_t = runs ? sum_t / static_cast<double>(runs) : NAN;
    return Outcome{connected >= 99 && runs == 50 && std::isfinite(mean_t),
                   fmt("%zu/100 connected, %zu degenerate partitions skipped, mean T over %zu seeds = %.4f", connected,
                       degenerate, runs, mean_t)};
  });

  criterion(11, "static link equals extra edge", [] {
    const std::vector<Edge> base{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 4}};
    const Graph g = Graph::from_edges(6, base);
    std::vector<Edge> plus = base;
    plus.emplace_back(0, 5);
    const Graph h = Graph::from_edges(6, plus);
    const auto a = finish_sample(g, {.kind = PolicyKind::static_links, .links = {{0, 5}}, .beta_link = 1.0}, 10000, 111);
    const auto b = finish_sample(h, {.kind = PolicyKind::null}, 10000, 112);
    const auto ks = ks_two_sample(a, b);
    return Outcome{ks.p_value > kKsAlpha, fmt("KS D = %.4f, p = %.4f (reject below %.2f)", ks.statistic, ks.p_value, kKsAlpha)};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
