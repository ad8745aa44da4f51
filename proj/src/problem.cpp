#include "tbe/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tbe/errors.hpp"

namespace tbe {

std::size_t checked_product(std::span<const std::size_t> dims) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t p = 1;
  for (std::size_t d : dims) {
    if (d != 0 && p > kMax / d) return kMax;
    p *= d;
  }
  return p;
}

std::size_t table_size(std::span<const VarId> scope, std::span<const std::size_t> domains) {
  std::vector<std::size_t> dims;
  dims.reserve(scope.size());
  for (VarId v : scope) dims.push_back(domains[v]);
  return checked_product(dims);
}

std::size_t lex_rank(std::span<const ValueIndex> tuple, std::span<const std::size_t> dims) {
  std::size_t r = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) r = r * dims[k] + tuple[k];
  return r;
}

void lex_unrank(std::size_t row, std::span<const std::size_t> dims, std::span<ValueIndex> tuple) {
  for (std::size_t k = dims.size(); k-- > 0;) {
    tuple[k] = static_cast<ValueIndex>(row % dims[k]);
    row /= dims[k];
  }
}

std::size_t Problem::max_arity() const {
  std::size_t a = 0;
  for (const auto& f : functions) a = std::max(a, f.arity());
  return a;
}

std::size_t Problem::max_domain() const {
  std::size_t d = 0;
  for (std::size_t s : domains) d = std::max(d, s);
  return d;
}

void Problem::validate() const {
  for (std::size_t v = 0; v < domains.size(); ++v) {
    if (domains[v] == 0) throw PreconditionError("variable " + std::to_string(v) + " has an empty domain");
  }
  for (std::size_t j = 0; j < functions.size(); ++j) {
    const auto& f = functions[j];
    std::vector<VarId> sorted = f.scope;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw PreconditionError("function " + std::to_string(j) + " repeats a scope variable");
    for (VarId v : f.scope) {
      if (v >= domains.size())
        throw PreconditionError("function " + std::to_string(j) + " references unknown variable " +
                                std::to_string(v));
    }
    if (f.costs.size() != table_size(f.scope, domains))
      throw PreconditionError("function " + std::to_string(j) + " has " +
                              std::to_string(f.costs.size()) + " costs, expected " +
                              std::to_string(table_size(f.scope, domains)));
  }
}

Assignment Assignment::from_values(std::span<const ValueIndex> values) {
  Assignment a(values.size());
  for (std::size_t v = 0; v < values.size(); ++v) a.set(static_cast<VarId>(v), values[v]);
  return a;
}

bool Assignment::complete() const {
  return std::none_of(values_.begin(), values_.end(), [](auto x) { return x == kUnassigned; });
}

std::size_t Assignment::assigned_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](auto x) { return x != kUnassigned; }));
}

std::vector<ValueIndex> Assignment::values() const {
  if (!complete()) throw PreconditionError("assignment is incomplete");
  return {values_.begin(), values_.end()};
}

void check_in_domain(const Assignment& a, std::span<const std::size_t> domains) {
  if (a.size() != domains.size())
    throw PreconditionError("assignment covers " + std::to_string(a.size()) + " variables, problem has " +
                            std::to_string(domains.size()));
  for (VarId v = 0; v < a.size(); ++v) {
    if (a.has(v) && a[v] >= domains[v])
      throw PreconditionError("value " + std::to_string(a[v]) + " out of domain for variable " +
                              std::to_string(v));
  }
}

Cost evaluate(const Problem& problem, const Assignment& assignment) {
  check_in_domain(assignment, problem.domains);
  if (!assignment.complete()) throw PreconditionError("evaluate needs a complete assignment");
  const Semiring& sr = problem.task;
  Cost total = sr.identity();
  std::vector<ValueIndex> tuple;
  std::vector<std::size_t> dims;
  for (const auto& f : problem.functions) {
    tuple.clear();
    dims.clear();
    for (VarId v : f.scope) {
      tuple.push_back(assignment[v]);
      dims.push_back(problem.domains[v]);
    }
    total = sr.combine(total, f.costs[lex_rank(tuple, dims)]);
  }
  return total;
}

void BeliefNetwork::validate() const {
  if (child.size() != cpts.size()) throw PreconditionError("one child variable is needed per CPT");
  Problem p;
  p.domains = domains;
  p.functions = cpts;
  p.validate();
  for (std::size_t i = 0; i < cpts.size(); ++i) {
    const auto& s = cpts[i].scope;
    if (std::find(s.begin(), s.end(), child[i]) == s.end())
      throw PreconditionError("CPT " + std::to_string(i) + " does not contain its child variable");
  }
}

double BeliefNetwork::max_normalization_error() const {
  double worst = 0.0;
  std::vector<ValueIndex> tuple;
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < cpts.size(); ++i) {
    const auto& f = cpts[i];
    dims.clear();
    for (VarId v : f.scope) dims.push_back(domains[v]);
    const auto child_pos = static_cast<std::size_t>(
        std::find(f.scope.begin(), f.scope.end(), child[i]) - f.scope.begin());
    tuple.assign(f.scope.size(), 0);
    // Walk every row whose child value is 0 and sum across the child's values.
    for (std::size_t r = 0; r < f.costs.size(); ++r) {
      lex_unrank(r, dims, tuple);
      if (tuple[child_pos] != 0) continue;
      double sum = 0.0;
      for (ValueIndex c = 0; c < dims[child_pos]; ++c) {
        tuple[child_pos] = c;
        sum += f.costs[lex_rank(tuple, dims)];
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  return worst;
}

Assignment ConditionedProblem::lift(const Assignment& reduced) const {
  Assignment full = evidence;
  for (VarId v = 0; v < original.size(); ++v) {
    if (reduced.has(v)) full.set(original[v], reduced[v]);
  }
  return full;
}

ConditionedProblem condition_on_evidence(const BeliefNetwork& bn, const Assignment& evidence,
                                         bool log_domain) {
  bn.validate();
  check_in_domain(evidence, bn.domains);

  ConditionedProblem out;
  out.evidence = evidence;
  out.problem.task = Semiring::max_product(log_domain);
  std::vector<VarId> reduced_id(bn.num_variables(), 0);
  for (VarId v = 0; v < bn.num_variables(); ++v) {
    if (evidence.has(v)) continue;
    reduced_id[v] = static_cast<VarId>(out.original.size());
    out.original.push_back(v);
    out.problem.domains.push_back(bn.domains[v]);
  }

  const Semiring& sr = out.problem.task;
  std::vector<ValueIndex> full_tuple, free_tuple;
  std::vector<std::size_t> full_dims, free_dims;
  for (const auto& cpt : bn.cpts) {
    CostFunction f;
    std::vector<std::size_t> free_pos;
    full_dims.clear();
    free_dims.clear();
    for (std::size_t k = 0; k < cpt.scope.size(); ++k) {
      const VarId v = cpt.scope[k];
      full_dims.push_back(bn.domains[v]);
      if (!evidence.has(v)) {
        free_pos.push_back(k);
        free_dims.push_back(bn.domains[v]);
        f.scope.push_back(reduced_id[v]);
      }
    }
    full_tuple.assign(cpt.scope.size(), 0);
    for (std::size_t k = 0; k < cpt.scope.size(); ++k) {
      if (evidence.has(cpt.scope[k])) full_tuple[k] = evidence[cpt.scope[k]];
    }
    const std::size_t rows = checked_product(free_dims);
    f.costs.resize(rows);
    free_tuple.assign(free_pos.size(), 0);
    for (std::size_t r = 0; r < rows; ++r) {
      lex_unrank(r, free_dims, free_tuple);
      for (std::size_t k = 0; k < free_pos.size(); ++k) full_tuple[free_pos[k]] = free_tuple[k];
      f.costs[r] = sr.from_probability(cpt.costs[lex_rank(full_tuple, full_dims)]);
    }
    out.problem.functions.push_back(std::move(f));
  }
  return out;
}

SubProblem extract_subproblem(const Problem& problem, std::span<const VarId> vars) {
  SubProblem out;
  out.problem.name = problem.name;
  out.problem.task = problem.task;
  out.problem.upper_bound = problem.upper_bound;
  constexpr VarId kAbsent = std::numeric_limits<VarId>::max();
  std::vector<VarId> local(problem.num_variables(), kAbsent);
  for (VarId v : vars) {
    local[v] = static_cast<VarId>(out.original.size());
    out.original.push_back(v);
    out.problem.domains.push_back(problem.domains[v]);
  }
  for (const auto& f : problem.functions) {
    if (f.scope.empty()) continue;
    const bool inside =
        std::all_of(f.scope.begin(), f.scope.end(), [&](VarId v) { return local[v] != kAbsent; });
    if (!inside) continue;
    CostFunction g;
    for (VarId v : f.scope) g.scope.push_back(local[v]);
    g.costs = f.costs;
    out.problem.functions.push_back(std::move(g));
  }
  return out;
}

}  // namespace tbe
