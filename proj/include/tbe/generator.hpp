#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tbe/problem.hpp"

namespace tbe {

enum class Topology { Random, ScaleFree, Grid };

/// How many edges the Random topology draws.
enum class EdgeRule {
  Formula,      // floor(n(n-1)p1), clamped to n(n-1)/2
  HalfDensity,  // floor(n(n-1)p1 / 2), i.e. a G(n, m) graph of density p1
};

struct GeneratorConfig {
  Topology topology = Topology::Random;
  std::size_t n = 10;  // grid: nodes per side
  std::size_t d = 10;
  double p1 = 0.3;  // Random only
  double p2 = 0.5;
  int max_cost = 100;
  std::uint64_t seed = 0;
  EdgeRule edge_rule = EdgeRule::Formula;
};

struct GeneratedGraph {
  std::size_t nodes = 0;
  std::vector<std::pair<VarId, VarId>> edges;  // (a, b) with a < b, sorted
  std::size_t attempts = 1;
  std::vector<std::string> warnings;
};

/// Edge count the Random topology draws for `config` (after clamping).
std::size_t random_edge_count(const GeneratorConfig& config);

/// Connected constraint graph for `config`. Random graphs are redrawn with a
/// derived seed until connected, at most 1000 times. Throws PreconditionError
/// on invalid parameters and Error when no connected graph was found.
GeneratedGraph generate_graph(const GeneratorConfig& config);

/// Min-sum problem with one binary function per edge: uniform integer costs in
/// [0, max_cost] and exactly floor(p2 · d²) Top cells per function.
Problem generate(const GeneratorConfig& config);

Topology parse_topology(const std::string& name);
std::string topology_name(Topology t);

}  // namespace tbe
