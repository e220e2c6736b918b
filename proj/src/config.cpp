#include "episim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace episim {

Config::Config() {
  for (const auto& k : config_schema()) tree_.put(Tree::path_type(k.key, '.'), k.fallback);
}

bool Config::known(const std::string& key) {
  for (const auto& k : config_schema())
    if (key == k.key) return true;
  return false;
}

void Config::merge(std::istream& is) {
  Tree file;
  try {
    boost::property_tree::ini_parser::read_ini(is, file);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  for (const auto& [section, body] : file) {
    if (section == "derived") continue;
    if (body.empty() && !body.data().empty()) throw ConfigError("key outside a section: " + section);
    for (const auto& [key, value] : body) set(section + "." + key, value.data());
  }
}

void Config::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  merge(in);
}

void Config::apply_override(const std::string& pair) {
  const auto eq = pair.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must be KEY=VALUE: " + pair);
  set(trim(pair.substr(0, eq)), trim(pair.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
  if (!known(key)) throw ConfigError("unknown config key '" + key + "'");
  tree_.put(Tree::path_type(key, '.'), value);
}

std::string Config::str(const std::string& key) const {
  if (!known(key)) throw ConfigError("unknown config key '" + key + "'");
  return tree_.get<std::string>(Tree::path_type(key, '.'));
}

void Config::write(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& derived) const {
  Tree out = tree_;
  for (const auto& [k, v] : derived) out.put(Tree::path_type("derived." + k, '.'), v);
  boost::property_tree::ini_parser::write_ini(os, out);
}

std::string Config::trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<Edge> parse_links(const std::string& s) {
  std::vector<Edge> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Config::trim(item);
    if (item.empty()) continue;
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw ConfigError("link must be u-v: " + item);
    try {
      out.emplace_back(static_cast<NodeId>(std::stoul(item.substr(0, dash))),
                       static_cast<NodeId>(std::stoul(item.substr(dash + 1))));
    } catch (const std::logic_error&) {
      throw ConfigError("link must be u-v: " + item);
    }
  }
  return out;
}

PolicySpec policy_from_config(const Config& c) {
  PolicySpec p;
  p.kind = parse_policy_kind(c.str("policy.kind"));
  p.L = c.get<double>("policy.L");
  p.links = parse_links(c.str("policy.links"));
  p.beta_link = c.get<double>("policy.beta_link");
  p.link_count = c.get<std::size_t>("policy.link_count");
  p.rewire_rate = c.get<double>("policy.rewire_rate");
  p.agents = c.get<std::size_t>("policy.agents");
  p.rate_per_agent = c.get<double>("policy.rate_per_agent");
  p.seed = derive_seed(c.get<std::uint64_t>("run.seed"), 0x9011C7);
  return p;
}

LogCorrection parse_correction(const std::string& s) {
  if (s == "none") return LogCorrection::none;
  if (s == "divide_by_log_n") return LogCorrection::divide_by_log_n;
  throw ConfigError("unknown log correction '" + s + "'");
}

SampleSource parse_source(const std::string& s) {
  for (auto k : {SampleSource::simulate, SampleSource::line_clusters, SampleSource::fpp_clusters,
                 SampleSource::diagonal_clusters})
    if (s == sample_source_name(k)) return k;
  throw ConfigError("unknown sweep source '" + s + "'");
}

unsigned threads_from_config(const Config& c) {
  const auto t = c.get<unsigned>("run.threads");
  return t ? t : default_threads();
}

EngineConfig engine_from_config(const Config& c) {
  EngineConfig e;
  e.beta = c.get<double>("engine.beta");
  e.initial_infected = c.get<NodeId>("engine.initial_infected");
  if (!c.str("engine.max_time").empty()) e.max_time = c.get<double>("engine.max_time");
  return e;
}

ExperimentPlan plan_from_config(const Config& c) {
  ExperimentPlan plan;
  plan.family = parse_family(c.str("graph.family"));
  plan.dimension = c.get<int>("graph.d");
  plan.rgg_radius_factor = c.get<double>("graph.radius_factor");
  plan.sizes = c.list<std::size_t>("sweep.sizes");
  plan.policy = policy_from_config(c);
  plan.source = parse_source(c.str("sweep.source"));
  plan.mu_eff = c.get<double>("sweep.mu_eff");
  plan.occupancy = c.get<std::size_t>("sweep.occupancy");
  plan.replicates = c.get<std::size_t>("sweep.replicates");
  plan.engine = engine_from_config(c);
  plan.correction = parse_correction(c.str("sweep.correction"));
  plan.master_seed = c.get<std::uint64_t>("run.seed");
  if (const auto b = c.get<std::uint64_t>("sweep.budget")) plan.event_budget = b;
  plan.threads = threads_from_config(c);
  return plan;
}

double rgg_radius(std::size_t n, double factor) {
  return std::min(std::sqrt(2.0), std::sqrt(factor * std::log(static_cast<double>(n)) / static_cast<double>(n)));
}

Graph graph_from_config(const Config& c) {
  const std::string file = c.str("graph.file");
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open graph file '" + file + "'");
    return read_graph(in);
  }
  const auto n = c.get<std::size_t>("graph.n");
  switch (parse_family(c.str("graph.family"))) {
    case Family::ring: return gen_ring(n);
    case Family::line: return gen_line(n);
    case Family::grid: return gen_grid(n, c.get<int>("graph.d"));
    case Family::rgg: {
      double r = c.get<double>("graph.r");
      if (r == 0.0) r = rgg_radius(n, c.get<double>("graph.radius_factor"));
      return gen_rgg(n, r, derive_seed(c.get<std::uint64_t>("run.seed"), 0x6000));
    }
    case Family::custom: break;
  }
  throw ConfigError("graph.family custom needs graph.file");
}

}  // namespace episim
