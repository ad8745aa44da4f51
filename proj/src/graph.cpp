#include "tbe/graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "tbe/errors.hpp"

namespace tbe {

bool PrimalGraph::has_edge(VarId a, VarId b) const {
  const auto& n = adj_.at(a);
  return std::binary_search(n.begin(), n.end(), b);
}

bool PrimalGraph::add_edge(VarId a, VarId b) {
  if (a == b) return false;
  auto& na = adj_.at(a);
  auto it = std::lower_bound(na.begin(), na.end(), b);
  if (it != na.end() && *it == b) return false;
  na.insert(it, b);
  auto& nb = adj_.at(b);
  nb.insert(std::lower_bound(nb.begin(), nb.end(), a), a);
  ++edges_;
  return true;
}

PrimalGraph build_primal_graph(const Problem& problem) {
  PrimalGraph g(problem.num_variables());
  for (const auto& f : problem.functions) {
    for (std::size_t i = 0; i < f.scope.size(); ++i)
      for (std::size_t j = i + 1; j < f.scope.size(); ++j) g.add_edge(f.scope[i], f.scope[j]);
  }
  return g;
}

Ordering::Ordering(std::vector<VarId> order) : order_(std::move(order)), position_(order_.size()) {
  std::vector<bool> seen(order_.size(), false);
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const VarId v = order_[i];
    if (v >= order_.size() || seen[v])
      throw PreconditionError("ordering is not a permutation of 0.." + std::to_string(order_.size() - 1));
    seen[v] = true;
    position_[v] = i;
  }
}

Ordering Ordering::identity(std::size_t n) {
  std::vector<VarId> o(n);
  std::iota(o.begin(), o.end(), VarId{0});
  return Ordering(std::move(o));
}

Ordering parse_ordering(std::string_view text, std::size_t num_variables) {
  std::istringstream in{std::string(text)};
  std::vector<VarId> order;
  long long v = 0;
  while (in >> v) {
    if (v < 0) throw ParseError(1, "negative variable id in ordering");
    order.push_back(static_cast<VarId>(v));
  }
  if (!in.eof()) throw ParseError(1, "non-numeric token in ordering");
  if (order.size() != num_variables)
    throw ParseError(1, "ordering lists " + std::to_string(order.size()) + " variables, expected " +
                            std::to_string(num_variables));
  try {
    return Ordering(std::move(order));
  } catch (const PreconditionError& e) {
    throw ParseError(1, e.what());
  }
}

std::string format_ordering(const Ordering& ordering) {
  std::string out;
  for (std::size_t i = 0; i < ordering.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(ordering[i]);
  }
  out += '\n';
  return out;
}

std::size_t width(const PrimalGraph& graph, const Ordering& ordering) {
  std::size_t w = 0;
  for (VarId v = 0; v < graph.size(); ++v) {
    std::size_t earlier = 0;
    for (VarId u : graph.neighbors(v)) earlier += ordering.precedes(u, v);
    w = std::max(w, earlier);
  }
  return w;
}

std::size_t induced_width(const PrimalGraph& graph, const Ordering& ordering) {
  if (ordering.size() != graph.size()) throw PreconditionError("ordering does not cover the graph");
  std::vector<std::set<VarId>> adj(graph.size());
  for (VarId v = 0; v < graph.size(); ++v) adj[v].insert(graph.neighbors(v).begin(), graph.neighbors(v).end());
  std::size_t w = 0;
  std::vector<VarId> earlier;
  for (std::size_t i = ordering.size(); i-- > 0;) {
    const VarId v = ordering[i];
    earlier.clear();
    for (VarId u : adj[v]) {
      if (ordering.position(u) < i) earlier.push_back(u);
    }
    w = std::max(w, earlier.size());
    for (std::size_t a = 0; a < earlier.size(); ++a)
      for (std::size_t b = a + 1; b < earlier.size(); ++b) {
        adj[earlier[a]].insert(earlier[b]);
        adj[earlier[b]].insert(earlier[a]);
      }
  }
  return w;
}

Ordering default_ordering(const PrimalGraph& graph) {
  std::vector<VarId> order(graph.size());
  std::iota(order.begin(), order.end(), VarId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](VarId a, VarId b) { return graph.degree(a) < graph.degree(b); });
  return Ordering(std::move(order));
}

Ordering min_degree_ordering(const PrimalGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<std::set<VarId>> adj(n);
  for (VarId v = 0; v < n; ++v) adj[v].insert(graph.neighbors(v).begin(), graph.neighbors(v).end());
  // (degree, id) keyed queue; entries are refreshed as fill edges appear.
  std::set<std::pair<std::size_t, VarId>> queue;
  for (VarId v = 0; v < n; ++v) queue.emplace(adj[v].size(), v);
  std::vector<VarId> eliminated;
  eliminated.reserve(n);
  while (!queue.empty()) {
    const VarId v = queue.begin()->second;
    queue.erase(queue.begin());
    eliminated.push_back(v);
    std::vector<VarId> nb(adj[v].begin(), adj[v].end());
    for (VarId u : nb) {
      queue.erase({adj[u].size(), u});
      adj[u].erase(v);
    }
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        adj[nb[a]].insert(nb[b]);
        adj[nb[b]].insert(nb[a]);
      }
    for (VarId u : nb) queue.emplace(adj[u].size(), u);
    adj[v].clear();
  }
  std::reverse(eliminated.begin(), eliminated.end());
  return Ordering(std::move(eliminated));
}

Ordering degree_dfs_ordering(const PrimalGraph& graph) {
  const std::size_t n = graph.size();
  const auto higher = [&](VarId a, VarId b) {
    return graph.degree(a) != graph.degree(b) ? graph.degree(a) > graph.degree(b) : a < b;
  };
  std::vector<VarId> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), VarId{0});
  std::sort(by_degree.begin(), by_degree.end(), higher);

  std::vector<VarId> order;
  order.reserve(n);
  std::vector<bool> seen(n, false);
  std::vector<std::pair<VarId, std::size_t>> stack;  // node, next neighbor index
  std::vector<std::vector<VarId>> sorted_adj(n);
  for (VarId v = 0; v < n; ++v) {
    sorted_adj[v] = graph.neighbors(v);
    std::sort(sorted_adj[v].begin(), sorted_adj[v].end(), higher);
  }
  for (VarId root : by_degree) {
    if (seen[root]) continue;
    seen[root] = true;
    order.push_back(root);
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next == sorted_adj[v].size()) {
        stack.pop_back();
        continue;
      }
      const VarId u = sorted_adj[v][next++];
      if (seen[u]) continue;
      seen[u] = true;
      order.push_back(u);
      stack.emplace_back(u, 0);
    }
  }
  return Ordering(std::move(order));
}

Ordering make_ordering(const PrimalGraph& graph, OrderingHeuristic heuristic) {
  switch (heuristic) {
    case OrderingHeuristic::MinDegree: return min_degree_ordering(graph);
    case OrderingHeuristic::DegreeDfs: return degree_dfs_ordering(graph);
    case OrderingHeuristic::PaperDegree: break;
  }
  return default_ordering(graph);
}

bool PseudoTree::is_ancestor(VarId a, VarId b) const {
  return a != b && enter_.at(a) < enter_.at(b) && leave_.at(b) <= leave_.at(a);
}

std::vector<std::pair<VarId, VarId>> PseudoTree::tree_edges() const {
  std::vector<std::pair<VarId, VarId>> out;
  for (VarId v : dfs_order.order())
    if (parent[v]) out.emplace_back(*parent[v], v);
  return out;
}

std::vector<std::pair<VarId, VarId>> PseudoTree::back_edges() const {
  std::vector<std::pair<VarId, VarId>> out;
  for (VarId v : dfs_order.order())
    for (VarId a : pseudo_parents[v]) out.emplace_back(a, v);
  return out;
}

std::size_t PseudoTree::max_separator_size() const {
  std::size_t m = 0;
  for (const auto& s : separator) m = std::max(m, s.size());
  return m;
}

PseudoTree build_pseudo_tree(const PrimalGraph& graph, const Ordering& ordering) {
  const std::size_t n = graph.size();
  if (ordering.size() != n) throw PreconditionError("ordering does not cover the graph");
  if (n == 0) throw PreconditionError("cannot build a pseudo-tree of an empty graph");
  if (connected_components(graph).size() != 1)
    throw PreconditionError("graph is disconnected; split it with connected_components first");

  PseudoTree t;
  t.root = ordering[0];
  t.parent.assign(n, std::nullopt);
  t.children.assign(n, {});
  t.pseudo_parents.assign(n, {});
  t.separator.assign(n, {});
  t.depth.assign(n, 0);
  t.enter_.assign(n, 0);
  t.leave_.assign(n, 0);

  // Neighbors of each node sorted by priority, consumed by an explicit stack.
  std::vector<std::vector<VarId>> by_priority(n);
  for (VarId v = 0; v < n; ++v) {
    by_priority[v] = graph.neighbors(v);
    std::sort(by_priority[v].begin(), by_priority[v].end(),
              [&](VarId a, VarId b) { return ordering.position(a) < ordering.position(b); });
  }
  std::vector<bool> visited(n, false);
  std::vector<std::size_t> cursor(n, 0);
  std::vector<VarId> preorder;
  preorder.reserve(n);
  std::vector<VarId> stack{t.root};
  std::size_t clock = 0;
  visited[t.root] = true;
  t.enter_[t.root] = clock++;
  preorder.push_back(t.root);
  while (!stack.empty()) {
    const VarId v = stack.back();
    if (cursor[v] < by_priority[v].size()) {
      const VarId u = by_priority[v][cursor[v]++];
      if (visited[u]) continue;
      visited[u] = true;
      t.parent[u] = v;
      t.children[v].push_back(u);
      t.depth[u] = t.depth[v] + 1;
      t.enter_[u] = clock++;
      preorder.push_back(u);
      stack.push_back(u);
    } else {
      t.leave_[v] = clock++;
      stack.pop_back();
    }
  }
  t.dfs_order = Ordering(preorder);

  for (VarId v = 0; v < n; ++v) {
    for (VarId u : graph.neighbors(v)) {
      if (t.is_ancestor(u, v) && t.parent[v] != u) t.pseudo_parents[v].push_back(u);
    }
    std::sort(t.pseudo_parents[v].begin(), t.pseudo_parents[v].end(),
              [&](VarId a, VarId b) { return t.dfs_order.position(a) < t.dfs_order.position(b); });
  }

  // Bottom-up: sep(v) = (∪ sep(children) ∪ N(v)) ∩ strict ancestors of v.
  for (std::size_t i = n; i-- > 0;) {
    const VarId v = preorder[i];
    std::set<VarId> sep;
    for (VarId u : graph.neighbors(v))
      if (t.is_ancestor(u, v)) sep.insert(u);
    for (VarId c : t.children[v])
      for (VarId u : t.separator[c])
        if (u != v) sep.insert(u);
    t.separator[v].assign(sep.begin(), sep.end());
    std::sort(t.separator[v].begin(), t.separator[v].end(),
              [&](VarId a, VarId b) { return t.dfs_order.position(a) < t.dfs_order.position(b); });
  }
  return t;
}

std::vector<std::vector<VarId>> connected_components(const PrimalGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<bool> seen(n, false);
  std::vector<std::vector<VarId>> out;
  for (VarId s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<VarId> comp{s}, frontier{s};
    seen[s] = true;
    while (!frontier.empty()) {
      const VarId v = frontier.back();
      frontier.pop_back();
      for (VarId u : graph.neighbors(v)) {
        if (seen[u]) continue;
        seen[u] = true;
        comp.push_back(u);
        frontier.push_back(u);
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

Ordering restrict_ordering(const Ordering& ordering, std::span<const VarId> vars) {
  std::vector<std::pair<std::size_t, VarId>> keyed;
  keyed.reserve(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) keyed.emplace_back(ordering.position(vars[i]), static_cast<VarId>(i));
  std::sort(keyed.begin(), keyed.end());
  std::vector<VarId> order;
  order.reserve(keyed.size());
  for (const auto& [pos, local] : keyed) order.push_back(local);
  return Ordering(std::move(order));
}

}  // namespace tbe
