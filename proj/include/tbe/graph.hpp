#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tbe/problem.hpp"

namespace tbe {

/// Undirected graph with sorted adjacency lists and no self loops.
class PrimalGraph {
 public:
  PrimalGraph() = default;
  explicit PrimalGraph(std::size_t num_nodes) : adj_(num_nodes) {}

  std::size_t size() const { return adj_.size(); }
  std::size_t edge_count() const { return edges_; }
  const std::vector<VarId>& neighbors(VarId v) const { return adj_.at(v); }
  std::size_t degree(VarId v) const { return adj_.at(v).size(); }
  bool has_edge(VarId a, VarId b) const;

  /// Adds {a, b}; self loops and duplicates are ignored. Returns true if new.
  bool add_edge(VarId a, VarId b);

 private:
  std::vector<std::vector<VarId>> adj_;
  std::size_t edges_ = 0;
};

/// Edge {x, y} for every pair co-occurring in some scope.
PrimalGraph build_primal_graph(const Problem& problem);

/// A permutation of variable ids; earlier entries have lower priority.
class Ordering {
 public:
  Ordering() = default;
  /// Throws PreconditionError unless `order` is a permutation of 0..n-1.
  explicit Ordering(std::vector<VarId> order);
  static Ordering identity(std::size_t n);

  std::size_t size() const { return order_.size(); }
  const std::vector<VarId>& order() const { return order_; }
  VarId operator[](std::size_t i) const { return order_[i]; }
  std::size_t position(VarId v) const { return position_.at(v); }
  bool precedes(VarId a, VarId b) const { return position(a) < position(b); }

  friend bool operator==(const Ordering& a, const Ordering& b) { return a.order_ == b.order_; }

 private:
  std::vector<VarId> order_;
  std::vector<std::size_t> position_;
};

/// One-line whitespace-separated permutation.
Ordering parse_ordering(std::string_view text, std::size_t num_variables);
std::string format_ordering(const Ordering& ordering);

/// Max over nodes of the number of earlier neighbors, without fill edges.
std::size_t width(const PrimalGraph& graph, const Ordering& ordering);

/// Width of the induced graph built by processing nodes from last to first
/// and connecting each node's earlier neighbors pairwise.
std::size_t induced_width(const PrimalGraph& graph, const Ordering& ordering);

/// Ascending degree, ties by ascending id. BE eliminates from the tail, so
/// high-degree variables are eliminated first.
Ordering default_ordering(const PrimalGraph& graph);

/// Classic greedy min-degree elimination; the elimination sequence is
/// reversed so that the first eliminated variable is last in the ordering.
Ordering min_degree_ordering(const PrimalGraph& graph);

/// Preorder of a DFS that starts at the highest-degree variable and visits
/// neighbors by descending degree (ties by id); one traversal per component.
Ordering degree_dfs_ordering(const PrimalGraph& graph);

enum class OrderingHeuristic { PaperDegree, MinDegree, DegreeDfs };

Ordering make_ordering(const PrimalGraph& graph, OrderingHeuristic heuristic);

/// Rooted DFS arrangement of a connected primal graph.
struct PseudoTree {
  VarId root = 0;
  std::vector<std::optional<VarId>> parent;
  std::vector<std::vector<VarId>> children;
  /// Backedge ancestors other than the parent, by ascending DFS position.
  std::vector<std::vector<VarId>> pseudo_parents;
  /// sep(v): ancestors linked to v or one of its descendants, by DFS position.
  std::vector<std::vector<VarId>> separator;
  std::vector<std::size_t> depth;
  /// Preorder of the traversal; every ancestor precedes its descendants.
  Ordering dfs_order;

  std::size_t size() const { return parent.size(); }
  bool is_ancestor(VarId a, VarId b) const;  // strict
  bool is_leaf(VarId v) const { return children.at(v).empty(); }
  std::vector<std::pair<VarId, VarId>> tree_edges() const;  // (parent, child)
  std::vector<std::pair<VarId, VarId>> back_edges() const;  // (ancestor, descendant)
  std::size_t max_separator_size() const;

 private:
  friend PseudoTree build_pseudo_tree(const PrimalGraph&, const Ordering&);
  std::vector<std::size_t> enter_, leave_;
};

/// DFS from the ordering's first variable visiting unvisited neighbors by
/// ascending priority. Throws PreconditionError on a disconnected graph.
PseudoTree build_pseudo_tree(const PrimalGraph& graph, const Ordering& ordering);

/// Node sets of the connected components, each sorted, ordered by smallest member.
std::vector<std::vector<VarId>> connected_components(const PrimalGraph& graph);

/// `ordering` restricted to `vars` (sorted), renumbered so `vars[i]` becomes i.
Ordering restrict_ordering(const Ordering& ordering, std::span<const VarId> vars);

}  // namespace tbe
