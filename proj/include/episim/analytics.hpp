#pragma once

// Sweeps over graph sizes, scaling fits and report writers.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "episim/dominators.hpp"
#include "episim/engine.hpp"
#include "episim/error.hpp"
#include "episim/graph.hpp"
#include "episim/partition.hpp"
#include "episim/policies.hpp"
#include "episim/stats.hpp"

namespace episim {

enum class LogCorrection { none, divide_by_log_n };

// What produces the finish-time sample at each n.
enum class SampleSource { simulate, line_clusters, fpp_clusters, diagonal_clusters };

inline const char* sample_source_name(SampleSource s) {
  switch (s) {
    case SampleSource::simulate: return "simulate";
    case SampleSource::line_clusters: return "line_clusters";
    case SampleSource::fpp_clusters: return "fpp_clusters";
    case SampleSource::diagonal_clusters: return "diagonal_clusters";
  }
  return "?";
}

struct ExperimentPlan {
  Family family = Family::ring;
  int dimension = 2;              // grid dimension, fpp lattice dimension
  double rgg_radius_factor = 5.0; // r = sqrt(c ln n / n)
  std::vector<std::size_t> sizes;
  PolicySpec policy;              // gsi gets the family partition per n
  SampleSource source = SampleSource::simulate;
  double mu_eff = 1.0;            // diagonal clusters
  std::size_t occupancy = 0;      // diagonal clusters, 0 = ceil(ln n)
  std::size_t replicates = 200;
  EngineConfig engine;            // seed/stream are overwritten per point
  LogCorrection correction = LogCorrection::none;
  std::uint64_t master_seed = 0;
  // Ceiling on n * replicates summed over the sweep; sizes past it are skipped.
  std::optional<std::uint64_t> event_budget;
  unsigned threads = default_threads();
};

struct ScalingRow {
  std::size_t n = 0;          // requested size
  std::size_t nodes = 0;      // realised node count (grids floor to side^d)
  double mean = 0.0;
  double std = 0.0;
  Deciles deciles{};
  std::vector<double> samples;  // by replicate index
  double seconds = 0.0;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  LogCorrection correction = LogCorrection::none;
  std::optional<ExponentFit> fit;            // per `correction`
  std::optional<ExponentFit> fit_corrected;  // mean T / ln n
  std::optional<ExponentFit> fit_raw;        // mean T
  bool incomplete = false;
  std::string incomplete_reason;
  std::uint64_t master_seed = 0;
  double seconds = 0.0;
};

inline void validate(const ExperimentPlan& plan) {
  if (plan.sizes.empty()) throw InvalidParameter("plan needs at least one size");
  for (std::size_t i = 1; i < plan.sizes.size(); ++i)
    if (plan.sizes[i] <= plan.sizes[i - 1]) throw InvalidParameter("plan sizes must be strictly increasing");
  if (plan.replicates < 1) throw InvalidParameter("replicates must be >= 1");
}

// Graph for sweep point i.  RGG points come from a seed derived from the
// master seed and the point index.
inline Graph plan_graph(const ExperimentPlan& plan, std::size_t i) {
  const std::size_t n = plan.sizes[i];
  switch (plan.family) {
    case Family::ring: return gen_ring(n);
    case Family::line: return gen_line(n);
    case Family::grid: return gen_grid(n, plan.dimension);
    case Family::rgg: {
      const double r = std::sqrt(plan.rgg_radius_factor * std::log(static_cast<double>(n)) / static_cast<double>(n));
      return gen_rgg(n, std::min(r, std::sqrt(2.0)), derive_seed(plan.master_seed, 0x6000 + i));
    }
    case Family::custom: break;
  }
  throw InvalidFamily("sweeps need a generated family");
}

inline Partition family_partition(const Graph& g, double l_min) {
  switch (g.family()) {
    case Family::ring:
    case Family::line: return partition_ring(g);
    case Family::grid: return partition_grid(g, l_min);
    case Family::rgg: return partition_rgg(g, l_min);
    case Family::custom: break;
  }
  throw InvalidFamily("no partition construction for a custom graph");
}

inline double log_corrected(double y, double n, LogCorrection c) {
  return c == LogCorrection::divide_by_log_n ? y / std::log(n) : y;
}

// Fits the rows of a report in place.
inline void fit_report(ScalingReport& rep) {
  rep.fit.reset();
  rep.fit_raw.reset();
  rep.fit_corrected.reset();
  if (rep.rows.size() < 3) return;
  std::vector<ScalingPoint> raw, corr;
  for (const auto& r : rep.rows) {
    const auto n = static_cast<double>(r.n);
    raw.push_back({n, r.mean});
    corr.push_back({n, log_corrected(r.mean, n, LogCorrection::divide_by_log_n)});
  }
  rep.fit_raw = exponent_fit(raw);
  rep.fit_corrected = exponent_fit(corr);
  rep.fit = rep.correction == LogCorrection::none ? rep.fit_raw : rep.fit_corrected;
}

// Deterministic in the plan: sweep point i uses seed derive_seed(master, i)
// and replicate k uses stream k.  Setting *cancel stops the sweep; the
// report then holds the finished points and is flagged incomplete.
inline ScalingReport run_plan(const ExperimentPlan& plan, const std::atomic<bool>* cancel = nullptr) {
  validate(plan);
  const auto start = std::chrono::steady_clock::now();
  ScalingReport rep;
  rep.correction = plan.correction;
  rep.master_seed = plan.master_seed;
  std::uint64_t spent = 0;

  for (std::size_t i = 0; i < plan.sizes.size(); ++i) {
    const std::size_t n = plan.sizes[i];
    const std::uint64_t cost = static_cast<std::uint64_t>(n) * plan.replicates;
    if (plan.event_budget && spent + cost > *plan.event_budget) {
      rep.incomplete = true;
      rep.incomplete_reason = "event budget exhausted before n=" + std::to_string(n);
      break;
    }
    spent += cost;
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t seed = derive_seed(plan.master_seed, i);
    ScalingRow row;
    row.n = n;
    row.samples.assign(plan.replicates, std::nan(""));

    if (plan.source == SampleSource::simulate) {
      const Graph g = plan_graph(plan, i);
      row.nodes = g.node_count();
      PolicySpec spec = plan.policy;
      if (spec.kind == PolicyKind::gsi) spec.partition = std::make_shared<const Partition>(family_partition(g, spec.L));
      EngineConfig cfg = plan.engine;
      cfg.seed = seed;
      cfg.record_events = false;
      parallel_for(plan.replicates, plan.threads, [&](std::size_t k) {
        EngineConfig local = cfg;
        local.stream = k;
        auto policy = make_policy(spec, g, k);
        const Trace t = simulate(g, *policy, local);
        if (!t.finish_time) throw NonTermination("replicate did not finish before max_time");
        row.samples[k] = *t.finish_time;
      }, cancel);
    } else {
      ClusterProcessConfig cfg;
      cfg.seeding_rate = plan.policy.L;
      cfg.beta = plan.engine.beta;
      cfg.dimension = plan.dimension;
      cfg.mu_eff = plan.mu_eff;
      cfg.occupancy = plan.occupancy ? plan.occupancy : default_occupancy(n);
      cfg.target_count = n;
      cfg.seed = seed;
      cfg.growth = plan.source == SampleSource::line_clusters ? GrowthKind::line
                   : plan.source == SampleSource::fpp_clusters ? GrowthKind::fpp
                                                               : GrowthKind::diagonal;
      row.nodes = n;
      parallel_for(plan.replicates, plan.threads, [&](std::size_t k) {
        ClusterProcessConfig local = cfg;
        local.stream = k;
        const ClusterTrace tr = cfg.growth == GrowthKind::line  ? line_clusters(local)
                                : cfg.growth == GrowthKind::fpp ? fpp_clusters(local)
                                                                : diagonal_grid_clusters(local);
        row.samples[k] = *tr.hitting_time;
      }, cancel);
    }
    if (cancel && cancel->load()) {
      rep.incomplete = true;
      rep.incomplete_reason = "interrupted during n=" + std::to_string(n);
      break;
    }
    row.mean = mean(row.samples);
    row.std = stddev(row.samples);
    row.deciles = deciles(row.samples);
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.rows.push_back(std::move(row));
  }
  fit_report(rep);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

struct ConcentrationRow {
  std::size_t n;
  double h;          // max(g / L_min, max piece diameter)
  double threshold;  // kappa h ln n
  double fraction;   // share of replicates with T >= threshold
};

struct ConcentrationReport {
  std::vector<ConcentrationRow> rows;
  bool nonincreasing = true;
};

// Uses the finish times already in `report` (produced from `plan`).
inline ConcentrationReport concentration_probe(const ExperimentPlan& plan, const ScalingReport& report, double kappa) {
  if (!(kappa >= 0.0)) throw InvalidParameter("kappa must be >= 0");
  ConcentrationReport out;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    const Graph g = plan_graph(plan, i);
    const Partition p = family_partition(g, plan.policy.L);
    const double h = bound_calculator(static_cast<double>(p.g()), p.mean_size(),
                                      std::max(1.0, static_cast<double>(p.max_diameter())), 1.0, plan.policy.L)
                         .h;
    const double thr = kappa * h * std::log(static_cast<double>(row.n));
    std::size_t hits = 0;
    for (double t : row.samples) hits += t >= thr;
    const double frac = static_cast<double>(hits) / static_cast<double>(row.samples.size());
    if (!out.rows.empty() && frac > out.rows.back().fraction) out.nonincreasing = false;
    out.rows.push_back({row.n, h, thr, frac});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Writers

void write_report_csv(std::ostream& os, const ScalingReport& rep);

// Two columns "n y" where y follows the report's log correction.
void write_gnuplot(std::ostream& os, const ScalingReport& rep);

nlohmann::json fit_json(const std::optional<ExponentFit>& f);

nlohmann::json report_json(const ScalingReport& rep, const nlohmann::json& config = nullptr);

nlohmann::json verdict_json(const DominanceVerdict& v);

}  // namespace episim
