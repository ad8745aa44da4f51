#include "tbe/solver.hpp"

#include <algorithm>
#include <numeric>

#include "tbe/errors.hpp"
#include "tbe/kernels.hpp"

namespace tbe {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_deadline(const SolverOptions& options) {
  if (options.deadline && Clock::now() >= *options.deadline) throw TimeoutError();
}

struct PlannedGroup {
  std::vector<std::size_t> members;  // pool indices, aggregation order
  std::vector<VarId> scope;
  std::vector<std::size_t> dims;
  std::size_t output = 0;  // pool index of the bucket function
};

// Scope-only dry run of the elimination. The pool holds the original
// functions first, then every bucket function in creation order.
struct Plan {
  std::vector<std::vector<VarId>> scopes;
  std::vector<std::vector<std::size_t>> bucket;  // per variable, insertion order
  std::vector<std::vector<PlannedGroup>> groups;
  std::vector<std::size_t> constants;  // empty-scope entries, combination order
  std::size_t max_rows = 0;
};

std::vector<std::size_t> dims_of(std::span<const VarId> scope, std::span<const std::size_t> domains) {
  std::vector<std::size_t> dims;
  dims.reserve(scope.size());
  for (VarId v : scope) dims.push_back(domains[v]);
  return dims;
}

Plan plan_elimination(const Problem& problem, const Ordering& ordering, std::optional<std::size_t> z,
                      std::size_t budget) {
  const std::size_t n = problem.num_variables();
  Plan plan;
  plan.bucket.resize(n);
  plan.groups.resize(n);
  std::size_t retained = 0;
  const auto place = [&](std::size_t idx) {
    const auto& s = plan.scopes[idx];
    if (s.empty()) plan.constants.push_back(idx);
    else plan.bucket[s.back()].push_back(idx);
  };

  for (std::size_t j = 0; j < problem.functions.size(); ++j) {
    std::vector<VarId> s = problem.functions[j].scope;
    std::sort(s.begin(), s.end(), [&](VarId a, VarId b) { return ordering.position(a) < ordering.position(b); });
    const std::size_t rows = problem.functions[j].costs.size();
    retained += rows;
    plan.max_rows = std::max(plan.max_rows, rows);
    plan.scopes.push_back(std::move(s));
    place(j);
  }

  for (std::size_t i = n; i-- > 0;) {
    const VarId v = ordering[i];
    const auto& members = plan.bucket[v];
    if (members.empty()) continue;
    std::vector<std::vector<std::size_t>> parts;
    if (z) {
      std::vector<std::vector<VarId>> member_scopes;
      for (std::size_t m : members) member_scopes.push_back(plan.scopes[m]);
      for (auto& part : partition_bucket(member_scopes, *z)) {
        for (auto& k : part) k = members[k];
        parts.push_back(std::move(part));
      }
    } else {
      parts.push_back(members);
    }
    for (auto& part : parts) {
      std::vector<const std::vector<VarId>*> ptrs;
      for (std::size_t m : part) ptrs.push_back(&plan.scopes[m]);
      PlannedGroup g;
      g.members = std::move(part);
      g.scope = scope_union(ptrs, ordering);
      g.dims = dims_of(g.scope, problem.domains);
      const std::size_t rows = checked_product(g.dims);
      if (rows > budget) throw MemoryBudgetError(v, rows, budget);
      if (retained + rows > budget || retained + rows < retained)
        throw MemoryBudgetError(v, retained + rows, budget);
      plan.max_rows = std::max(plan.max_rows, rows);
      std::vector<VarId> out_scope(g.scope.begin(), g.scope.end() - 1);
      retained += rows / g.dims.back();
      g.output = plan.scopes.size();
      plan.scopes.push_back(std::move(out_scope));
      place(g.output);
      plan.groups[v].push_back(std::move(g));
    }
  }
  return plan;
}

}  // namespace

std::vector<std::vector<std::size_t>> partition_bucket(std::span<const std::vector<VarId>> scopes, std::size_t z) {
  std::vector<std::size_t> order(scopes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scopes[a].size() > scopes[b].size(); });
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::vector<VarId>> unions;  // kept sorted by id
  for (std::size_t idx : order) {
    const auto& s = scopes[idx];
    if (s.size() > z) throw BoundTooSmallError(z, s.size());
    std::vector<VarId> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    bool placed = false;
    for (std::size_t g = 0; g < groups.size() && !placed; ++g) {
      std::vector<VarId> merged;
      std::set_union(unions[g].begin(), unions[g].end(), sorted.begin(), sorted.end(), std::back_inserter(merged));
      if (merged.size() <= z) {
        groups[g].push_back(idx);
        unions[g] = std::move(merged);
        placed = true;
      }
    }
    if (!placed) {
      groups.push_back({idx});
      unions.push_back(std::move(sorted));
    }
  }
  return groups;
}

std::vector<VarId> scope_union(std::span<const std::vector<VarId>* const> scopes, const Ordering& ordering) {
  std::vector<VarId> all;
  for (const auto* s : scopes) all.insert(all.end(), s->begin(), s->end());
  std::sort(all.begin(), all.end(), [&](VarId a, VarId b) { return ordering.position(a) < ordering.position(b); });
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

Assignment assign_forward(const std::vector<std::vector<const BucketTable*>>& members, const Ordering& ordering,
                          const Semiring& semiring, std::span<const std::size_t> domains) {
  Assignment a(ordering.size());
  semiring.visit([&](auto ops) {
    using Ops = decltype(ops);
    for (std::size_t i = 0; i < ordering.size(); ++i) {
      const VarId v = ordering[i];
      ValueIndex best_value = 0;
      Cost best = Ops::identity();
      for (ValueIndex d = 0; d < domains[v]; ++d) {
        a.set(v, d);
        Cost c = Ops::identity();
        for (const BucketTable* t : members[v]) c = Ops::combine(c, t->lookup(a));
        if (d == 0 || Ops::better(c, best)) {
          best = c;
          best_value = d;
        }
      }
      a.set(v, best_value);
    }
  });
  return a;
}

std::size_t plan_max_rows(const Problem& problem, const Ordering& ordering, std::optional<std::size_t> z,
                          std::size_t memory_budget_rows) {
  problem.validate();
  if (ordering.size() != problem.num_variables())
    throw PreconditionError("ordering does not cover the problem variables");
  if (z && *z == 0) throw BoundTooSmallError(0, 1);
  if (z && problem.max_arity() > *z) throw BoundTooSmallError(*z, problem.max_arity());
  return plan_elimination(problem, ordering, z, memory_budget_rows).max_rows;
}

EliminationRun run_elimination(const Problem& problem, const Ordering& ordering, std::optional<std::size_t> z,
                               const SolverOptions& options) {
  problem.validate();
  const std::size_t n = problem.num_variables();
  if (ordering.size() != n) throw PreconditionError("ordering does not cover the problem variables");
  if (z && *z == 0) throw BoundTooSmallError(0, 1);
  if (z && problem.max_arity() > *z) throw BoundTooSmallError(*z, problem.max_arity());

  const auto start = Clock::now();
  const Plan plan = plan_elimination(problem, ordering, z, options.memory_budget_rows);
  const Semiring& sr = problem.task;
  const auto& backend = options.backend;

  EliminationRun run;
  const PrimalGraph graph = build_primal_graph(problem);
  run.stats.induced_width = induced_width(graph, ordering);
  run.stats.components = connected_components(graph).size();
  run.stats.max_table_rows = plan.max_rows;
  run.stats.backend = backend.name();
  run.stats.minibucket_counts.assign(n, 0);
  run.bucket_functions.resize(n);

  std::vector<BucketTable> pool(plan.scopes.size());
  for (std::size_t j = 0; j < problem.functions.size(); ++j)
    pool[j] = table_from_function(problem.functions[j], problem.domains, ordering);

  for (std::size_t i = n; i-- > 0;) {
    const VarId v = ordering[i];
    run.stats.minibucket_counts[v] = plan.groups[v].size();
    for (const auto& g : plan.groups[v]) {
      check_deadline(options);
      BucketTable acc = BucketTable::filled(g.scope, g.dims, sr.identity());
      for (std::size_t m : g.members) aggregate_into(acc, pool[m], sr, backend);
      pool[g.output] = eliminate_last(std::move(acc), sr, backend);
      if (options.keep_bucket_functions) run.bucket_functions[v].push_back(pool[g.output]);
    }
  }

  run.value = sr.identity();
  for (std::size_t c : plan.constants) run.value = sr.combine(run.value, pool[c].chi.at(0));
  run.stats.elimination_seconds = seconds_since(start);

  const auto assign_start = Clock::now();
  std::vector<std::vector<const BucketTable*>> members(n);
  for (VarId v = 0; v < n; ++v)
    for (std::size_t m : plan.bucket[v]) members[v].push_back(&pool[m]);
  run.assignment = assign_forward(members, ordering, sr, problem.domains);
  run.stats.assignment_seconds = seconds_since(assign_start);
  return run;
}

Solution bucket_elimination(const Problem& problem, const Ordering& ordering, const SolverOptions& options) {
  EliminationRun run = run_elimination(problem, ordering, std::nullopt, options);
  return Solution{run.value, std::move(run.assignment), std::move(run.stats)};
}

Bounds mini_bucket_elimination(const Problem& problem, const Ordering& ordering, std::size_t z,
                               const SolverOptions& options) {
  EliminationRun run = run_elimination(problem, ordering, z, options);
  Bounds b;
  b.task = problem.task;
  b.z = z;
  b.bound = run.value;
  b.assignment_cost = evaluate(problem, run.assignment);
  b.assignment = std::move(run.assignment);
  b.stats = std::move(run.stats);
  return b;
}

}  // namespace tbe
