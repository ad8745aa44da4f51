#include "tbe/oracle.hpp"

#include <algorithm>
#include <chrono>

#include "tbe/errors.hpp"

namespace tbe {

namespace {

// Depth-first enumeration. Each function is evaluated at the level of its
// largest variable id, when its whole scope is fixed.
template <class Ops>
struct Enumerator {
  const Problem& problem;
  std::vector<std::vector<const CostFunction*>> at_level;
  std::vector<ValueIndex> values;
  std::vector<ValueIndex> best_values;
  Cost best = Ops::identity();
  bool found = false;

  explicit Enumerator(const Problem& p) : problem(p), at_level(p.num_variables()), values(p.num_variables(), 0) {}

  Cost cost_of(const CostFunction& f) const {
    std::size_t r = 0;
    for (VarId v : f.scope) r = r * problem.domains[v] + values[v];
    return f.costs[r];
  }

  void visit(std::size_t level, Cost partial) {
    if (level == values.size()) {
      if (!found || Ops::better(partial, best)) {
        best = partial;
        best_values = values;
        found = true;
      }
      return;
    }
    for (ValueIndex d = 0; d < problem.domains[level]; ++d) {
      values[level] = d;
      Cost c = partial;
      for (const CostFunction* f : at_level[level]) c = Ops::combine(c, cost_of(*f));
      visit(level + 1, c);
    }
  }
};

}  // namespace

Solution brute_force(const Problem& problem, std::size_t limit) {
  problem.validate();
  const std::size_t states = checked_product(problem.domains);
  if (states > limit)
    throw StateSpaceTooLargeError("state space of " + std::to_string(states) + " assignments exceeds the limit of " +
                                  std::to_string(limit));
  const auto start = std::chrono::steady_clock::now();
  Solution sol;
  problem.task.visit([&](auto ops) {
    using Ops = decltype(ops);
    Enumerator<Ops> e(problem);
    Cost constant = Ops::identity();
    for (const auto& f : problem.functions) {
      if (f.scope.empty()) {
        constant = Ops::combine(constant, f.costs[0]);
        continue;
      }
      e.at_level[*std::max_element(f.scope.begin(), f.scope.end())].push_back(&f);
    }
    e.visit(0, constant);
    sol.optimum = e.best;
    sol.assignment = Assignment::from_values(e.best_values);
  });
  sol.stats.max_table_rows = states;
  sol.stats.backend = "brute-force";
  sol.stats.elimination_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

}  // namespace tbe
