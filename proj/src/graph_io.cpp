#include "episim/graph_io.hpp"

#include <cstdio>
#include <sstream>

namespace episim {

Family parse_family(const std::string& s) {
  for (auto f : {Family::ring, Family::line, Family::grid, Family::rgg, Family::custom})
    if (s == family_name(f)) return f;
  throw InvalidFamily("unknown graph family '" + s + "'");
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_graph(std::ostream& os, const Graph& g) {
  os << g.node_count() << ' ' << family_name(g.family());
  if (g.family() == Family::grid) os << ' ' << g.dimension() << ' ' << g.side();
  if (g.family() == Family::rgg) os << ' ' << format_real(g.radius());
  os << '\n';
  for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
  if (g.family() == Family::rgg)
    for (NodeId v = 0; v < g.node_count(); ++v) {
      const auto c = g.coord(v);
      os << "coord " << v << ' ' << format_real(c[0]) << ' ' << format_real(c[1]) << '\n';
    }
}

Graph read_graph(std::istream& is) {
  std::string line;
  auto next = [&](std::string& out) {
    while (std::getline(is, out)) {
      const auto first = out.find_first_not_of(" \t\r");
      if (first == std::string::npos || out[first] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next(line)) throw ConfigError("graph file is empty");
  std::istringstream header(line);
  std::size_t n = 0;
  std::string fam;
  if (!(header >> n >> fam)) throw ConfigError("bad graph header: " + line);
  const Family family = parse_family(fam);
  int d = 0;
  std::size_t side = 0;
  double r = 0.0;
  if (family == Family::grid && !(header >> d >> side)) throw ConfigError("grid header needs '<d> <side>'");
  if (family == Family::rgg && !(header >> r)) throw ConfigError("rgg header needs '<r>'");

  std::vector<Edge> edges;
  std::vector<double> points(family == Family::rgg ? 2 * n : 0, -1.0);
  while (next(line)) {
    std::istringstream ls(line);
    if (line.rfind("coord", 0) == 0) {
      std::string tag;
      std::size_t u;
      double x, y;
      if (family != Family::rgg || !(ls >> tag >> u >> x >> y) || u >= n) throw ConfigError("bad coord line: " + line);
      points[2 * u] = x;
      points[2 * u + 1] = y;
      continue;
    }
    std::size_t u, v;
    if (!(ls >> u >> v)) throw ConfigError("bad edge line: " + line);
    if (u >= n || v >= n) throw ConfigError("edge references a node out of range: " + line);
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }

  Graph listed = Graph::from_edges(n, edges, family);
  Graph built;
  switch (family) {
    case Family::ring:
    case Family::line:
    case Family::custom: return listed;
    case Family::grid: {
      std::size_t count = 1;
      for (int k = 0; k < d; ++k) count *= side;
      if (d < 1 || count != n) throw ConfigError("grid header does not match node count");
      built = gen_grid(n, d, true);
      break;
    }
    case Family::rgg:
      for (double p : points)
        if (p < 0.0) throw ConfigError("rgg file is missing coordinates");
      built = make_rgg_from_points(std::move(points), r);
      break;
  }
  if (built.edges() != listed.edges()) throw ConfigError("edge list does not match the family parameters");
  return built;
}

}  // namespace episim
