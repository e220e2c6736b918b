#pragma once

// Experiment configuration: INI sections with a fixed key schema.  Every key
// has a default, files and overrides may only set known keys, and the
// resolved view is written back out verbatim.

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "episim/analytics.hpp"
#include "episim/error.hpp"
#include "episim/graph_io.hpp"
#include "episim/policies.hpp"

namespace episim {

struct ConfigKey {
  const char* key;
  const char* fallback;
  const char* help;
};

// clang-format off
inline const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"run.seed", "0", "master seed"},
      {"run.threads", "0", "worker threads, 0 = hardware concurrency"},
      {"graph.family", "ring", "ring | line | grid | rgg"},
      {"graph.n", "1024", "node count"},
      {"graph.d", "2", "grid dimension"},
      {"graph.r", "0", "rgg radius, 0 = sqrt(radius_factor ln n / n)"},
      {"graph.radius_factor", "5", "rgg radius factor"},
      {"graph.file", "", "read the graph from this file instead"},
      {"engine.beta", "1", "intrinsic rate per edge"},
      {"engine.initial_infected", "0", "initially infected node"},
      {"engine.max_time", "", "optional cutoff"},
      {"engine.replicates", "200", "replicates for simulate"},
      {"engine.trace", "false", "simulate: also write the event trace of replicate 0"},
      {"policy.kind", "random_homogeneous", "null | random_homogeneous | gsi | static_links | dynamic_links | mobile_agents | greedy_frontier_adversary"},
      {"policy.L", "1", "total external budget"},
      {"policy.links", "", "static links as u-v,u-v,..."},
      {"policy.beta_link", "1", "rate per long-range link"},
      {"policy.link_count", "1", "dynamic link count"},
      {"policy.rewire_rate", "0", "dynamic rewire rate per link"},
      {"policy.agents", "1", "mobile agent count"},
      {"policy.rate_per_agent", "1", "mobile agent rate"},
      {"sweep.sizes", "64,256,1024,4096,16384", "strictly increasing sizes"},
      {"sweep.replicates", "200", "replicates per size"},
      {"sweep.correction", "divide_by_log_n", "none | divide_by_log_n"},
      {"sweep.source", "simulate", "simulate | line_clusters | fpp_clusters | diagonal_clusters"},
      {"sweep.mu_eff", "1", "diagonal cluster edge rate"},
      {"sweep.occupancy", "0", "diagonal cluster occupancy, 0 = ceil(ln n)"},
      {"sweep.budget", "0", "ceiling on sum n * replicates, 0 = none"},
      {"sweep.kappa", "0", "concentration probe multiplier, 0 = skip"},
      {"dominate.against", "two_phase", "two_phase | line_clusters"},
      {"dominate.replicates", "1000", "replicates per side"},
      {"fpp.lattice", "fpp", "fpp | diagonal"},
      {"fpp.d", "2", "lattice dimension (fpp)"},
      {"fpp.beta", "1", "edge rate"},
      {"fpp.seeding_rate", "1", "cluster arrival rate"},
      {"fpp.sizes", "100,1000,10000", "target counts"},
      {"fpp.replicates", "200", "replicates per target"},
      {"fpp.shape_times", "10,20,30,40", "single-cluster observation times"},
      {"fpp.shape_replicates", "50", "single-cluster replicates"},
  };
  return schema;
}
// clang-format on

class Config {
 public:
  using Tree = boost::property_tree::ptree;

  Config();

  static bool known(const std::string& key);

  // Merges an INI stream.  The [derived] section written by write() is
  // informational and skipped.
  void merge(std::istream& is);
  void merge_file(const std::string& path);
  // "key=value" with a dotted key.
  void apply_override(const std::string& pair);
  void set(const std::string& key, const std::string& value);
  std::string str(const std::string& key) const;

  template <typename T>
  T get(const std::string& key) const {
    const std::string s = str(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (s == "true" || s == "1" || s == "yes") return true;
      if (s == "false" || s == "0" || s == "no") return false;
      throw ConfigError("config key '" + key + "' expects a boolean, got '" + s + "'");
    } else {
      std::istringstream in(s);
      T v{};
      if (!(in >> v) || !(in >> std::ws).eof())
        throw ConfigError("config key '" + key + "' has a malformed value '" + s + "'");
      if constexpr (std::is_unsigned_v<T>)
        if (s.find('-') != std::string::npos) throw ConfigError("config key '" + key + "' must be non-negative");
      return v;
    }
  }

  template <typename T>
  std::vector<T> list(const std::string& key) const {
    std::vector<T> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      std::istringstream in(item);
      T v{};
      if (!(in >> v) || !(in >> std::ws).eof()) throw ConfigError("config key '" + key + "' has a malformed item '" + item + "'");
      out.push_back(v);
    }
    return out;
  }

  // Resolved view, plus an optional [derived] section (e.g. sub-seeds).
  void write(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& derived = {}) const;

  bool operator==(const Config& o) const { return tree_ == o.tree_; }

  static std::string trim(const std::string& s);

 private:
  Tree tree_;
};

// "u-v,u-v" -> edges.
std::vector<Edge> parse_links(const std::string& s);

// Policy-private randomness is derived from the master seed.
PolicySpec policy_from_config(const Config& c);

LogCorrection parse_correction(const std::string& s);

SampleSource parse_source(const std::string& s);

unsigned threads_from_config(const Config& c);

EngineConfig engine_from_config(const Config& c);

ExperimentPlan plan_from_config(const Config& c);

double rgg_radius(std::size_t n, double factor);

// The single graph used by simulate, dominate and conductance.
Graph graph_from_config(const Config& c);

}  // namespace episim
