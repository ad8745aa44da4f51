#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tbe/backend.hpp"
#include "tbe/graph.hpp"
#include "tbe/problem.hpp"
#include "tbe/table.hpp"

namespace tbe {

/// 32 GiB worth of cost entries.
inline constexpr std::size_t kDefaultBudgetRows = (std::size_t{32} << 30) / sizeof(Cost);

struct SolverOptions {
  ExecutionBackend backend;
  /// Cap on cost entries held at once (retained tables plus the table being built).
  std::size_t memory_budget_rows = kDefaultBudgetRows;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  /// Copy every bucket function into EliminationRun::bucket_functions.
  bool keep_bucket_functions = false;
};

struct InferenceStats {
  std::size_t induced_width = 0;
  std::size_t max_table_rows = 0;
  double elimination_seconds = 0.0;
  double assignment_seconds = 0.0;
  std::string backend;
  std::vector<std::size_t> minibucket_counts;  // per variable id
  std::size_t components = 0;
};

struct Solution {
  Cost optimum = 0.0;
  Assignment assignment;
  InferenceStats stats;
};

/// Result of MBE. For MinSum `bound` is a lower bound on the optimum and the
/// assignment's cost an upper bound; for MaxProduct the directions flip.
struct Bounds {
  Semiring task;
  std::size_t z = 0;
  Cost bound = 0.0;
  Cost assignment_cost = 0.0;
  Assignment assignment;
  InferenceStats stats;

  Cost lower() const { return task.minimizes() ? bound : assignment_cost; }
  Cost upper() const { return task.minimizes() ? assignment_cost : bound; }
};

/// Greedy first-fit: members sorted by descending scope size (stable), each
/// placed in the first group whose scope union stays within `z` variables.
/// Returns member indices per group. Throws BoundTooSmallError when a single
/// scope is larger than `z`.
std::vector<std::vector<std::size_t>> partition_bucket(std::span<const std::vector<VarId>> scopes,
                                                       std::size_t z);

/// Union of the scopes, sorted by ascending priority.
std::vector<VarId> scope_union(std::span<const std::vector<VarId>* const> scopes, const Ordering& ordering);

/// Head-to-tail pass: each variable takes the value whose combined cost over
/// its bucket members is best given earlier values; ties go to the smallest
/// value index. `members[v]` lists the tables of v's bucket.
Assignment assign_forward(const std::vector<std::vector<const BucketTable*>>& members, const Ordering& ordering,
                          const Semiring& semiring, std::span<const std::size_t> domains);

/// Everything an elimination run produces. Bucket functions (one per
/// mini-bucket, in processing order) are filled only on request.
struct EliminationRun {
  Cost value = 0.0;
  Assignment assignment;
  InferenceStats stats;
  std::vector<std::vector<BucketTable>> bucket_functions;  // per variable id
};

/// Scope-only dry run of the elimination: checks `z` and the row budget
/// without allocating any table. Returns the largest table size in rows.
std::size_t plan_max_rows(const Problem& problem, const Ordering& ordering, std::optional<std::size_t> z,
                          std::size_t memory_budget_rows);

/// Shared engine: exact when `z` is empty, mini-bucket(z) otherwise.
EliminationRun run_elimination(const Problem& problem, const Ordering& ordering, std::optional<std::size_t> z,
                               const SolverOptions& options = {});

Solution bucket_elimination(const Problem& problem, const Ordering& ordering, const SolverOptions& options = {});

Bounds mini_bucket_elimination(const Problem& problem, const Ordering& ordering, std::size_t z,
                               const SolverOptions& options = {});

}  // namespace tbe
