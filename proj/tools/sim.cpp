// sim <subcommand> [--config PATH] [--seed U64] [--out DIR] [--set KEY=VALUE]...
//
// Exit codes: 0 success, 2 usage or configuration error, 3 runtime guard
// (non-termination, contract violation, budget, interruption).

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "episim/analytics.hpp"
#include "episim/conductance.hpp"
#include "episim/config.hpp"
#include "episim/dominators.hpp"
#include "episim/engine.hpp"
#include "episim/graph_io.hpp"
#include "episim/policies.hpp"
#include "episim/stats.hpp"

namespace fs = std::filesystem;
using namespace episim;
using nlohmann::json;

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
  // gen shorthands
  std::string family;
  std::optional<std::size_t> n;
  std::optional<int> d;
  std::optional<double> r;
};

// Raised when results were written but the run did not finish.
struct Incomplete : Error {
  using Error::Error;
};

Config resolve(const Options& o) {
  Config c;
  if (!o.config_path.empty()) c.merge_file(o.config_path);
  for (const auto& kv : o.overrides) c.apply_override(kv);
  if (!o.family.empty()) c.set("graph.family", o.family);
  if (o.n) c.set("graph.n", std::to_string(*o.n));
  if (o.d) c.set("graph.d", std::to_string(*o.d));
  if (o.r) c.set("graph.r", format_real(*o.r));
  if (o.seed) c.set("run.seed", std::to_string(*o.seed));
  return c;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw ConfigError("cannot write '" + p.string() + "'");
  return os;
}

fs::path out_dir(const Options& o) {
  fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);
  return dir;
}

void write_resolved(const fs::path& dir, const Config& c,
                    std::vector<std::pair<std::string, std::string>> derived = {}) {
  const auto seed = c.get<std::uint64_t>("run.seed");
  derived.emplace_back("policy_seed", std::to_string(derive_seed(seed, 0x9011C7)));
  auto os = open_out(dir / "resolved.cfg");
  c.write(os, derived);
}

void write_json(const fs::path& p, const json& j) {
  auto os = open_out(p);
  os << j.dump(2) << '\n';
}

void mark_incomplete(const fs::path& dir, const std::string& why) {
  auto os = open_out(dir / "INCOMPLETE");
  os << why << '\n';
}

json deciles_json(std::vector<double> xs) {
  const auto d = deciles(std::move(xs));
  return json(std::vector<double>(d.begin(), d.end()));
}

json sample_json(const std::vector<double>& xs) {
  return {{"count", xs.size()}, {"mean", mean(xs)}, {"std", stddev(xs)}, {"deciles", deciles_json(xs)}};
}

// ---------------------------------------------------------------------------

int cmd_gen(const Options& o) {
  const Config c = resolve(o);
  const Graph g = graph_from_config(c);
  if (o.out.empty()) {
    write_graph(std::cout, g);
    return 0;
  }
  const fs::path file(o.out);
  const fs::path dir = file.has_parent_path() ? file.parent_path() : fs::path(".");
  fs::create_directories(dir);
  auto os = open_out(file);
  write_graph(os, g);
  write_resolved(dir, c, {{"graph_seed", std::to_string(derive_seed(c.get<std::uint64_t>("run.seed"), 0x6000))}});
  return 0;
}

int cmd_simulate(const Options& o) {
  const Config c = resolve(o);
  const fs::path dir = out_dir(o);
  write_resolved(dir, c);
  const Graph g = graph_from_config(c);
  PolicySpec spec = policy_from_config(c);
  if (spec.kind == PolicyKind::gsi) spec.partition = std::make_shared<const Partition>(family_partition(g, spec.L));
  EngineConfig cfg = engine_from_config(c);
  cfg.seed = c.get<std::uint64_t>("run.seed");
  const auto reps = c.get<std::size_t>("engine.replicates");
  if (reps < 1) throw ConfigError("engine.replicates must be >= 1");

  if (c.get<bool>("engine.trace")) {
    auto policy = make_policy(spec, g, 0);
    const Trace t = simulate(g, *policy, cfg);
    auto os = open_out(dir / "trace.csv");
    write_trace_csv(os, t);
  }
  std::vector<TraceSummary> rows(reps);
  std::vector<char> done(reps, 0);
  parallel_for(reps, threads_from_config(c), [&](std::size_t k) {
    EngineConfig local = cfg;
    local.stream = k;
    local.record_events = false;
    auto policy = make_policy(spec, g, k);
    const Trace t = simulate(g, *policy, local);
    rows[k] = {k, t.finish_time, t.infected_count, k};
    done[k] = 1;
  }, &g_interrupted);
  std::erase_if(rows, [&](const TraceSummary& r) { return !done[r.replicate]; });
  {
    auto os = open_out(dir / "batch.csv");
    write_batch_csv(os, rows);
  }
  std::vector<double> finish;
  for (const auto& r : rows)
    if (r.finish_time) finish.push_back(*r.finish_time);
  json summary = {{"nodes", g.node_count()}, {"edges", g.edge_count()}, {"policy", policy_kind_name(spec.kind)},
                  {"replicates", rows.size()}, {"finished", finish.size()},
                  {"master_seed", std::to_string(cfg.seed)}, {"incomplete", rows.size() != reps}};
  if (!finish.empty()) summary["finish_time"] = sample_json(finish);
  write_json(dir / "summary.json", summary);
  if (rows.size() != reps) {
    mark_incomplete(dir, "interrupted");
    throw Incomplete("interrupted after " + std::to_string(rows.size()) + " replicates");
  }
  std::cout << "mean finish time " << (finish.empty() ? 0.0 : mean(finish)) << " over " << finish.size()
            << " replicates\n";
  return 0;
}

int cmd_sweep(const Options& o) {
  const Config c = resolve(o);
  const fs::path dir = out_dir(o);
  const ExperimentPlan plan = plan_from_config(c);
  std::vector<std::pair<std::string, std::string>> derived;
  for (std::size_t i = 0; i < plan.sizes.size(); ++i)
    derived.emplace_back("seed_n" + std::to_string(plan.sizes[i]), std::to_string(derive_seed(plan.master_seed, i)));
  write_resolved(dir, c, derived);
  const ScalingReport rep = run_plan(plan, &g_interrupted);
  {
    auto os = open_out(dir / "sweep.csv");
    write_report_csv(os, rep);
  }
  {
    auto os = open_out(dir / "sweep.dat");
    write_gnuplot(os, rep);
  }
  json config = {{"family", c.str("graph.family")}, {"policy", c.str("policy.kind")},
                 {"source", c.str("sweep.source")}, {"replicates", plan.replicates},
                 {"sizes", plan.sizes}, {"L", plan.policy.L}, {"beta", plan.engine.beta}};
  json summary = report_json(rep, config);
  const double kappa = c.get<double>("sweep.kappa");
  if (kappa > 0.0 && plan.source == SampleSource::simulate) {
    const auto probe = concentration_probe(plan, rep, kappa);
    auto os = open_out(dir / "concentration.csv");
    os.precision(17);
    os << "n,h,threshold,fraction\n";
    for (const auto& r : probe.rows) os << r.n << ',' << r.h << ',' << r.threshold << ',' << r.fraction << '\n';
    summary["concentration_nonincreasing"] = probe.nonincreasing;
  }
  write_json(dir / "summary.json", summary);
  if (rep.incomplete) {
    mark_incomplete(dir, rep.incomplete_reason);
    throw Incomplete(rep.incomplete_reason);
  }
  if (rep.fit)
    std::cout << "exponent " << rep.fit->slope << " [" << rep.fit->ci_low << ", " << rep.fit->ci_high << "]\n";
  return 0;
}

int cmd_dominate(const Options& o) {
  const Config c = resolve(o);
  const fs::path dir = out_dir(o);
  write_resolved(dir, c);
  const Graph g = graph_from_config(c);
  PolicySpec spec = policy_from_config(c);
  const auto seed = c.get<std::uint64_t>("run.seed");
  const auto reps = c.get<std::size_t>("dominate.replicates");
  const unsigned threads = threads_from_config(c);
  const EngineConfig base = engine_from_config(c);
  const std::string against = c.str("dominate.against");
  json out = {{"nodes", g.node_count()}, {"policy", policy_kind_name(spec.kind)}, {"against", against},
              {"replicates", reps}, {"master_seed", std::to_string(seed)}};

  if (against == "two_phase") {
    const Partition p = family_partition(g, spec.L);
    const auto rep = dominance_check(g, p, spec, reps, seed, base.beta, threads);
    out["claim"] = "policy <=_st two_phase";
    out["policy_finish"] = sample_json(rep.real);
    out["two_phase_finish"] = sample_json(rep.two_phase);
    out["result"] = verdict_json(rep.verdict);
  } else if (against == "line_clusters") {
    if (spec.kind == PolicyKind::gsi) spec.partition = std::make_shared<const Partition>(family_partition(g, spec.L));
    EngineConfig cfg = base;
    cfg.seed = seed;
    const auto batch = simulate_batch(g, [&](std::uint64_t s) { return make_policy(spec, g, s); }, cfg, reps, threads);
    std::vector<double> real;
    for (const auto& r : batch) real.push_back(*r.finish_time);
    ClusterProcessConfig cc;
    cc.seeding_rate = std::max(spec.envelope().l_max, 1e-300);
    cc.beta = base.beta;
    cc.target_count = g.node_count();
    cc.seed = derive_seed(seed, 0xC1);
    const auto clusters = cluster_hitting_times(cc, reps, threads);
    out["claim"] = "line_clusters <=_st policy";
    out["line_clusters_hitting"] = sample_json(clusters);
    out["policy_finish"] = sample_json(real);
    out["result"] = verdict_json(dominance_report(clusters, real, {.seed = derive_seed(seed, 0xB0)}));
  } else {
    throw ConfigError("dominate.against must be two_phase or line_clusters");
  }
  write_json(dir / "dominance.json", out);
  std::cout << out["result"]["verdict"].get<std::string>() << '\n';
  return 0;
}

int cmd_conductance(const Options& o) {
  const Config c = resolve(o);
  const fs::path dir = out_dir(o);
  write_resolved(dir, c);
  const Graph g = graph_from_config(c);
  json out = {{"nodes", g.node_count()}, {"family", family_name(g.family())}};
  auto add = [&](const char* name, const ConductanceResult& r) {
    out[name] = {{"value", r.value()}, {"cut", r.cut}, {"size", r.size}, {"witness", r.witness_set}};
  };
  if (g.node_count() <= kConductanceExactLimit) add("exact", conductance_exact(g));
  try {
    add("analytic", conductance_analytic(g));
  } catch (const InvalidFamily&) {
    if (g.node_count() > kConductanceExactLimit) throw;
  }
  write_json(dir / "conductance.json", out);
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_fpp(const Options& o) {
  const Config c = resolve(o);
  const fs::path dir = out_dir(o);
  const std::string lattice = c.str("fpp.lattice");
  if (lattice != "fpp" && lattice != "diagonal") throw ConfigError("fpp.lattice must be fpp or diagonal");
  ExperimentPlan plan;
  plan.sizes = c.list<std::size_t>("fpp.sizes");
  plan.source = lattice == "fpp" ? SampleSource::fpp_clusters : SampleSource::diagonal_clusters;
  plan.dimension = c.get<int>("fpp.d");
  plan.engine.beta = c.get<double>("fpp.beta");
  plan.mu_eff = c.get<double>("fpp.beta");
  plan.occupancy = c.get<std::size_t>("sweep.occupancy");
  plan.policy.L = c.get<double>("fpp.seeding_rate");
  plan.replicates = c.get<std::size_t>("fpp.replicates");
  plan.correction = LogCorrection::none;
  plan.master_seed = c.get<std::uint64_t>("run.seed");
  plan.threads = threads_from_config(c);
  std::vector<std::pair<std::string, std::string>> derived;
  for (std::size_t i = 0; i < plan.sizes.size(); ++i)
    derived.emplace_back("seed_n" + std::to_string(plan.sizes[i]), std::to_string(derive_seed(plan.master_seed, i)));
  write_resolved(dir, c, derived);

  const ScalingReport rep = run_plan(plan, &g_interrupted);
  {
    auto os = open_out(dir / "fpp.csv");
    write_report_csv(os, rep);
  }
  const auto kind = lattice == "fpp" ? GrowthKind::fpp : GrowthKind::diagonal;
  const ShapeEstimate shape =
      shape_estimate(kind, plan.dimension, plan.engine.beta, c.list<double>("fpp.shape_times"),
                     c.get<std::size_t>("fpp.shape_replicates"), derive_seed(plan.master_seed, 0x5A), 1.25,
                     plan.threads);
  {
    auto os = open_out(dir / "shape.csv");
    write_shape_csv(os, shape);
  }
  json summary = report_json(rep, {{"lattice", lattice}, {"d", plan.dimension}, {"sizes", plan.sizes}});
  summary["shape"] = {{"fitted_rate", shape.fitted_rate}, {"envelope_rate", shape.envelope_rate}};
  write_json(dir / "summary.json", summary);
  if (rep.incomplete) {
    mark_incomplete(dir, rep.incomplete_reason);
    throw Incomplete(rep.incomplete_reason);
  }
  if (rep.fit) std::cout << "hitting-time exponent " << rep.fit->slope << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epidemic simulator with external infection"};
  app.require_subcommand(1, 1);
  Options o;
  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Sub subs[] = {
      {"gen", "generate a graph file", cmd_gen},
      {"simulate", "run replicates on one graph", cmd_simulate},
      {"sweep", "scaling sweep over sizes", cmd_sweep},
      {"dominate", "stochastic dominance check", cmd_dominate},
      {"conductance", "graph conductance", cmd_conductance},
      {"fpp", "lattice cluster process sweep and shape estimate", cmd_fpp},
  };
  std::vector<CLI::App*> handles;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", o.config_path, "experiment config file (INI)");
    sub->add_option("--seed", o.seed, "master seed (overrides run.seed)");
    sub->add_option("--out", o.out, std::string(s.name) == "gen" ? "output graph file" : "output directory");
    sub->add_option("--set", o.overrides, "override KEY=VALUE (dotted key), repeatable")->take_all();
    if (std::string(s.name) == "gen") {
      sub->add_option("--family", o.family, "ring | line | grid | rgg");
      sub->add_option("--n", o.n, "node count");
      sub->add_option("--d", o.d, "grid dimension");
      sub->add_option("--r", o.r, "rgg radius");
    }
    handles.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  std::signal(SIGINT, on_sigint);
  try {
    for (std::size_t i = 0; i < handles.size(); ++i)
      if (handles[i]->parsed()) return subs[i].run(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return 2;
  } catch (const InvalidFamily& e) {
    std::cerr << "invalid family: " << e.what() << '\n';
    return 2;
  } catch (const SizeLimit& e) {
    std::cerr << "size limit: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "runtime guard: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
