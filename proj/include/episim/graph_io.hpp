#pragma once

// Text graph format:
//   <n> <family> [params]     params: grid "<d> <side>", rgg "<r>"
//   <u> <v>                   one line per undirected edge, u < v
//   coord <u> <x> <y>         rgg only, 17 significant digits
// Blank lines and lines starting with '#' are ignored.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "episim/error.hpp"
#include "episim/graph.hpp"

namespace episim {

Family parse_family(const std::string& s);

std::string format_real(double x);

void write_graph(std::ostream& os, const Graph& g);

// Grids and RGGs are rebuilt from their parameters (and coordinates) and
// must agree with the listed edges.
Graph read_graph(std::istream& is);

}  // namespace episim
