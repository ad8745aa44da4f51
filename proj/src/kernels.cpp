#include "tbe/kernels.hpp"

#include <algorithm>
#include <span>
#include <vector>

#include "tbe/errors.hpp"

namespace tbe {

namespace {

// Per output position: input stride (0 when absent) and dimension. Trailing
// positions whose strides match the output layout form one contiguous run.
struct RowWalk {
  std::vector<std::size_t> dims;
  std::vector<std::size_t> stride;
  std::size_t prefix = 0;  // positions outside the contiguous run
  std::size_t run = 1;

  RowWalk(const IndexMap& map, std::span<const std::size_t> out_dims)
      : dims(out_dims.begin(), out_dims.end()), stride(out_dims.size(), 0) {
    const std::size_t last = map.mod.size() - 1;
    for (std::size_t k = 0; k < last; ++k) stride[map.phi[k]] = map.mul[k];
    stride[map.phi[last]] = 1;
    prefix = dims.size();
    while (prefix > 0 && stride[prefix - 1] == run) run *= dims[--prefix];
  }
};

template <class Ops>
void aggregate_rows(Cost* out, const Cost* in, const RowWalk& walk, RowRange range) {
  if (range.begin >= range.end) return;
  std::size_t r = range.begin;
  std::size_t offset = r % walk.run;
  std::vector<std::size_t> digit(walk.prefix);
  std::size_t base = 0;
  for (std::size_t q = r / walk.run, p = walk.prefix; p-- > 0;) {
    digit[p] = q % walk.dims[p];
    q /= walk.dims[p];
    base += digit[p] * walk.stride[p];
  }
  while (r < range.end) {
    const std::size_t len = std::min(walk.run - offset, range.end - r);
    Cost* o = out + r;
    const Cost* i = in + base + offset;
    for (std::size_t j = 0; j < len; ++j) o[j] = Ops::combine(o[j], i[j]);
    r += len;
    offset = 0;
    for (std::size_t p = walk.prefix; p-- > 0;) {
      base += walk.stride[p];
      if (++digit[p] < walk.dims[p]) break;
      base -= walk.stride[p] * walk.dims[p];
      digit[p] = 0;
    }
  }
}

template <class Ops>
void eliminate_rows(Cost* dst, const Cost* src, std::size_t d, RowRange range) {
  for (std::size_t r = range.begin; r < range.end; ++r) {
    const Cost* group = src + r * d;
    Cost best = group[0];
    for (std::size_t l = 1; l < d; ++l) best = Ops::marginalize(best, group[l]);
    dst[r] = best;
  }
}

}  // namespace

void aggregate_into(BucketTable& out, const BucketTable& in, const Semiring& semiring,
                    const ExecutionBackend& backend) {
  if (in.chi.size() != checked_product(in.dims) || out.chi.size() != checked_product(out.dims))
    throw PreconditionError("table size does not match its dimensions");
  const IndexMap map = build_index_map(in.scope, in.dims, out.scope, out.dims);
  const RowWalk walk(map, out.dims);
  Cost* dst = out.chi.data();
  const Cost* src = in.chi.data();
  semiring.visit([&](auto ops) {
    using Ops = decltype(ops);
    backend.for_each_range(out.rows(), [&](RowRange range) { aggregate_rows<Ops>(dst, src, walk, range); });
  });
}

BucketTable eliminate_last(BucketTable table, const Semiring& semiring, const ExecutionBackend& backend) {
  if (table.scope.empty()) throw PreconditionError("cannot eliminate from an empty scope");
  if (table.chi.size() != checked_product(table.dims))
    throw PreconditionError("table size does not match its dimensions");
  const std::size_t d = table.dims.back();
  const std::size_t out_rows = table.rows() / d;
  table.scope.pop_back();
  table.dims.pop_back();
  if (d == 1) return table;

  semiring.visit([&](auto ops) {
    using Ops = decltype(ops);
    if (backend.kind() == BackendKind::Sequential) {
      // Row r writes index r after reading indices >= r·d, so in place is safe.
      Cost* data = table.chi.data();
      backend.for_each_range(out_rows, [&](RowRange range) { eliminate_rows<Ops>(data, data, d, range); });
      table.chi.resize(out_rows);
      table.chi.shrink_to_fit();
    } else {
      std::vector<Cost> out(out_rows);
      const Cost* src = table.chi.data();
      Cost* dst = out.data();
      backend.for_each_range(out_rows, [&](RowRange range) { eliminate_rows<Ops>(dst, src, d, range); });
      table.chi = std::move(out);
    }
  });
  return table;
}

}  // namespace tbe
