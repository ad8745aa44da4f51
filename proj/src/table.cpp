#include "tbe/table.hpp"

#include <algorithm>
#include <numeric>

#include "tbe/errors.hpp"

namespace tbe {

BucketTable BucketTable::filled(std::vector<VarId> scope, std::vector<std::size_t> dims, Cost value) {
  if (scope.size() != dims.size()) throw PreconditionError("scope and dims differ in length");
  BucketTable t;
  const std::size_t rows = checked_product(dims);
  t.scope = std::move(scope);
  t.dims = std::move(dims);
  t.chi.assign(rows, value);
  return t;
}

Cost BucketTable::lookup(const Assignment& assignment) const {
  std::size_t r = 0;
  for (std::size_t k = 0; k < scope.size(); ++k) r = r * dims[k] + assignment[scope[k]];
  return chi[r];
}

BucketTable table_from_function(const CostFunction& f, std::span<const std::size_t> domains,
                                const Ordering& ordering) {
  const std::size_t s = f.scope.size();
  std::vector<std::size_t> perm(s);  // sorted position -> original position
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return ordering.position(f.scope[a]) < ordering.position(f.scope[b]);
  });

  BucketTable t;
  std::vector<std::size_t> src_dims(s);
  for (std::size_t k = 0; k < s; ++k) src_dims[k] = domains[f.scope[k]];
  for (std::size_t k = 0; k < s; ++k) {
    t.scope.push_back(f.scope[perm[k]]);
    t.dims.push_back(src_dims[perm[k]]);
  }
  if (std::is_sorted(perm.begin(), perm.end())) {
    t.chi = f.costs;
    return t;
  }

  // Stride of each sorted position inside the source layout.
  std::vector<std::size_t> src_stride(s, 1);
  for (std::size_t k = s; k-- > 1;) src_stride[k - 1] = src_stride[k] * src_dims[k];
  std::vector<std::size_t> stride(s);
  for (std::size_t k = 0; k < s; ++k) stride[k] = src_stride[perm[k]];

  t.chi.resize(f.costs.size());
  std::vector<ValueIndex> digit(s, 0);
  std::size_t src = 0;
  for (std::size_t r = 0; r < t.chi.size(); ++r) {
    t.chi[r] = f.costs[src];
    // Odometer increment over the sorted layout, tracking the source offset.
    for (std::size_t k = s; k-- > 0;) {
      if (++digit[k] < t.dims[k]) {
        src += stride[k];
        break;
      }
      src -= stride[k] * (t.dims[k] - 1);
      digit[k] = 0;
    }
  }
  return t;
}

IndexMap build_index_map(std::span<const VarId> in_scope, std::span<const std::size_t> in_dims,
                         std::span<const VarId> out_scope, std::span<const std::size_t> out_dims) {
  const std::size_t s = in_scope.size();
  const std::size_t m = out_scope.size();
  if (s == 0) throw PreconditionError("index map needs a non-empty input scope");
  if (in_dims.size() != s || out_dims.size() != m) throw PreconditionError("scope and dims differ in length");
  if (s > m || in_scope.back() != out_scope.back())
    throw PreconditionError("input and output scopes must end with the same variable");

  IndexMap map;
  map.phi.resize(s);
  std::size_t j = 0;
  for (std::size_t k = 0; k < s; ++k) {
    while (j < m && out_scope[j] != in_scope[k]) ++j;
    if (j == m) throw PreconditionError("input scope is not a subsequence of the output scope");
    if (out_dims[j] != in_dims[k]) throw PreconditionError("domain size mismatch for a shared variable");
    map.phi[k] = j++;
  }

  // suffix[j] = ∏_{i >= j} out_dims[i]
  std::vector<std::size_t> suffix(m + 1, 1);
  for (std::size_t i = m; i-- > 0;) suffix[i] = suffix[i + 1] * out_dims[i];
  map.out_rows = suffix[0];

  map.mul.resize(s - 1);
  map.div.resize(s - 1);
  map.mod.resize(s);
  std::size_t in_suffix = 1;
  for (std::size_t k = s - 1; k-- > 0;) {
    in_suffix *= in_dims[k + 1];
    map.mul[k] = in_suffix;
  }
  for (std::size_t k = 0; k + 1 < s; ++k) map.div[k] = suffix[map.phi[k] + 1];
  for (std::size_t k = 0; k < s; ++k) map.mod[k] = in_dims[k];
  return map;
}

IndexMap build_index_map(std::span<const VarId> in_scope, std::span<const VarId> out_scope,
                         std::span<const std::size_t> domains) {
  std::vector<std::size_t> in_dims, out_dims;
  for (VarId v : in_scope) in_dims.push_back(domains[v]);
  for (VarId v : out_scope) out_dims.push_back(domains[v]);
  return build_index_map(in_scope, in_dims, out_scope, out_dims);
}

}  // namespace tbe
