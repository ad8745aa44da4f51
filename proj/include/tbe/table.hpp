#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tbe/graph.hpp"
#include "tbe/problem.hpp"

namespace tbe {

/// Flat cost table over an ordered scope. Rows are implicit: `chi[r]` belongs
/// to the scope tuple of lexicographic rank r, first variable most significant.
/// Inside the solvers scopes are sorted by ascending priority, so the variable
/// to eliminate is last and its values occupy consecutive rows.
struct BucketTable {
  std::vector<VarId> scope;
  std::vector<std::size_t> dims;  // domain size per scope position
  std::vector<Cost> chi;

  std::size_t rows() const { return chi.size(); }
  std::size_t arity() const { return scope.size(); }

  /// Table with every entry set to `value`.
  static BucketTable filled(std::vector<VarId> scope, std::vector<std::size_t> dims, Cost value);

  /// Entry for the tuple described by `assignment` (all scope variables assigned).
  Cost lookup(const Assignment& assignment) const;

  friend bool operator==(const BucketTable&, const BucketTable&) = default;
};

/// Reorders the scope of `f` by ascending priority under `ordering` and
/// permutes the costs accordingly.
BucketTable table_from_function(const CostFunction& f, std::span<const std::size_t> domains,
                                const Ordering& ordering);

/// Stride arrays translating an output row into the matching input row when
/// the input scope is a subsequence of the output scope ending in the same
/// variable. Positions are 0-based: for k < s-1,
///   mul[k] = ∏_{j>k} in_dims[j]
///   div[k] = ∏_{j>phi[k]} out_dims[j]
///   mod[k] = in_dims[k]
/// and mod[s-1] = in_dims[s-1].
struct IndexMap {
  std::vector<std::size_t> mul;
  std::vector<std::size_t> div;
  std::vector<std::size_t> mod;
  std::vector<std::size_t> phi;  // input position -> output position
  std::size_t out_rows = 0;
};

/// Throws PreconditionError unless `in_scope` is a non-empty subsequence of
/// `out_scope` with the same last variable and matching dimensions.
IndexMap build_index_map(std::span<const VarId> in_scope, std::span<const std::size_t> in_dims,
                         std::span<const VarId> out_scope, std::span<const std::size_t> out_dims);

/// Same, with dimensions looked up in a per-variable domain vector.
IndexMap build_index_map(std::span<const VarId> in_scope, std::span<const VarId> out_scope,
                         std::span<const std::size_t> domains);

inline std::size_t map_row(std::size_t r_out, const IndexMap& map) {
  const std::size_t last = map.mod.size() - 1;
  std::size_t r_in = 0;
  for (std::size_t k = 0; k < last; ++k) r_in += map.mul[k] * ((r_out / map.div[k]) % map.mod[k]);
  return r_in + r_out % map.mod[last];
}

}  // namespace tbe
