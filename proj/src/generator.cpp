#include "tbe/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tbe/errors.hpp"
#include "tbe/graph.hpp"

namespace tbe {

namespace {

using Engine = std::mt19937_64;
using Edge = std::pair<VarId, VarId>;

Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Engine(seq);
}

bool connected(std::size_t n, const std::vector<Edge>& edges) {
  PrimalGraph g(n);
  for (auto [a, b] : edges) g.add_edge(a, b);
  return connected_components(g).size() <= 1;
}

std::vector<Edge> random_edges(std::size_t n, std::size_t m, Engine& rng) {
  std::vector<Edge> all;
  all.reserve(n * (n - 1) / 2);
  for (VarId a = 0; a < n; ++a)
    for (VarId b = a + 1; b < n; ++b) all.emplace_back(a, b);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(m);
  return all;
}

std::vector<Edge> scale_free_edges(std::size_t n, Engine& rng) {
  std::vector<Edge> edges{{0, 1}};
  std::vector<std::size_t> degree(n, 0);
  degree[0] = degree[1] = 1;
  for (VarId v = 2; v < n; ++v) {
    std::vector<double> weights(degree.begin(), degree.begin() + v);
    std::discrete_distribution<VarId> first(weights.begin(), weights.end());
    const VarId a = first(rng);
    weights[a] = 0.0;
    std::discrete_distribution<VarId> second(weights.begin(), weights.end());
    const VarId b = second(rng);
    edges.emplace_back(a, v);
    edges.emplace_back(b, v);
    ++degree[a];
    ++degree[b];
    degree[v] = 2;
  }
  return edges;
}

std::vector<Edge> grid_edges(std::size_t side) {
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) {
      const auto v = static_cast<VarId>(r * side + c);
      if (c + 1 < side) edges.emplace_back(v, v + 1);
      if (r + 1 < side) edges.emplace_back(v, static_cast<VarId>(v + side));
    }
  return edges;
}

}  // namespace

std::size_t random_edge_count(const GeneratorConfig& config) {
  const std::size_t n = config.n;
  const std::size_t pairs = n * (n - 1) / 2;
  double m = std::floor(static_cast<double>(n) * static_cast<double>(n - 1) * config.p1);
  if (config.edge_rule == EdgeRule::HalfDensity) m = std::floor(m / 2.0);
  return std::min(pairs, static_cast<std::size_t>(m));
}

GeneratedGraph generate_graph(const GeneratorConfig& config) {
  GeneratedGraph out;
  if (config.d == 0) throw PreconditionError("domain size must be positive");
  switch (config.topology) {
    case Topology::Random: {
      const std::size_t n = config.n;
      if (n < 2) throw PreconditionError("random topology needs n >= 2");
      if (!(config.p1 >= 0.0)) throw PreconditionError("p1 must be non-negative");
      out.nodes = n;
      const std::size_t m = random_edge_count(config);
      const std::size_t pairs = n * (n - 1) / 2;
      if (config.edge_rule == EdgeRule::Formula &&
          std::floor(static_cast<double>(n) * static_cast<double>(n - 1) * config.p1) > static_cast<double>(pairs))
        out.warnings.push_back("edge count clamped to " + std::to_string(pairs));
      if (m < n - 1) throw PreconditionError("p1 gives " + std::to_string(m) + " edges, too few to connect " +
                                             std::to_string(n) + " nodes");
      constexpr std::size_t kMaxAttempts = 1000;
      for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Engine rng = make_engine(config.seed, attempt);
        auto edges = random_edges(n, m, rng);
        if (connected(n, edges)) {
          out.edges = std::move(edges);
          out.attempts = attempt + 1;
          break;
        }
      }
      if (out.edges.empty() && n > 1) throw Error("no connected random graph after 1000 attempts");
      break;
    }
    case Topology::ScaleFree: {
      if (config.n < 3) throw PreconditionError("scale-free topology needs n >= 3");
      out.nodes = config.n;
      Engine rng = make_engine(config.seed, 0);
      out.edges = scale_free_edges(config.n, rng);
      break;
    }
    case Topology::Grid: {
      if (config.n < 2) throw PreconditionError("grid side must be at least 2");
      out.nodes = config.n * config.n;
      out.edges = grid_edges(config.n);
      break;
    }
  }
  for (auto& [a, b] : out.edges)
    if (a > b) std::swap(a, b);
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

Problem generate(const GeneratorConfig& config) {
  if (!(config.p2 >= 0.0 && config.p2 <= 1.0)) throw PreconditionError("p2 must lie in [0, 1]");
  if (config.max_cost < 0) throw PreconditionError("max_cost must be non-negative");
  GeneratedGraph g = generate_graph(config);
  Problem p;
  p.name = topology_name(config.topology) + "-n" + std::to_string(config.n) + "-d" + std::to_string(config.d) +
           "-s" + std::to_string(config.seed);
  p.domains.assign(g.nodes, config.d);

  Engine rng = make_engine(config.seed, 0xC057);
  std::uniform_int_distribution<int> cost(0, config.max_cost);
  const std::size_t cells = config.d * config.d;
  const auto tops = static_cast<std::size_t>(std::floor(config.p2 * static_cast<double>(cells)));
  std::vector<std::size_t> idx(cells);
  for (auto [a, b] : g.edges) {
    CostFunction f;
    f.scope = {a, b};
    f.costs.resize(cells);
    for (Cost& c : f.costs) c = cost(rng);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < tops; ++k) f.costs[idx[k]] = MinSumOps::top();
    p.functions.push_back(std::move(f));
  }
  return p;
}

Topology parse_topology(const std::string& name) {
  if (name == "random") return Topology::Random;
  if (name == "scalefree" || name == "scale-free") return Topology::ScaleFree;
  if (name == "grid") return Topology::Grid;
  throw PreconditionError("unknown topology '" + name + "'");
}

std::string topology_name(Topology t) {
  switch (t) {
    case Topology::Random: return "random";
    case Topology::ScaleFree: return "scalefree";
    case Topology::Grid: return "grid";
  }
  return "unknown";
}

}  // namespace tbe
