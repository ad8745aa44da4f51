#pragma once

#include "tbe/backend.hpp"
#include "tbe/cost.hpp"
#include "tbe/table.hpp"

namespace tbe {

/// out.chi[r] = combine(out.chi[r], in.chi[map_row(r)]) for every output row,
/// one logical task per row. `in.scope` must be a subsequence of `out.scope`
/// ending in the same variable. Overflow saturates to Top.
void aggregate_into(BucketTable& out, const BucketTable& in, const Semiring& semiring,
                    const ExecutionBackend& backend);

/// Marginalizes the last scope variable: output row r reduces the |D| input
/// rows [r·|D|, r·|D| + |D|). The sequential backend reuses the input storage.
BucketTable eliminate_last(BucketTable table, const Semiring& semiring, const ExecutionBackend& backend);

}  // namespace tbe
