#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tbe/cost.hpp"

namespace tbe {

using VarId = std::uint32_t;
using ValueIndex = std::uint32_t;

/// Product of the domain sizes of `scope`, saturating at SIZE_MAX.
std::size_t table_size(std::span<const VarId> scope, std::span<const std::size_t> domains);

/// Saturating product of `dims`.
std::size_t checked_product(std::span<const std::size_t> dims);

/// Lexicographic rank of `tuple` over `dims`; the first position is the most
/// significant digit.
std::size_t lex_rank(std::span<const ValueIndex> tuple, std::span<const std::size_t> dims);

/// Inverse of `lex_rank`.
void lex_unrank(std::size_t row, std::span<const std::size_t> dims, std::span<ValueIndex> tuple);

/// A cost function stored as a flat table: `costs[r]` is the cost of the
/// scope tuple of lexicographic rank r.
struct CostFunction {
  std::vector<VarId> scope;
  std::vector<Cost> costs;

  std::size_t arity() const { return scope.size(); }
  friend bool operator==(const CostFunction&, const CostFunction&) = default;
};

/// A WCSP or (conditioned) belief network in cost-function form.
struct Problem {
  std::string name;
  std::vector<std::size_t> domains;
  std::vector<CostFunction> functions;
  Semiring task = Semiring::min_sum();
  /// Global upper bound declared by a WCSP file (costs at or above it are Top).
  std::optional<Cost> upper_bound;

  std::size_t num_variables() const { return domains.size(); }
  std::size_t max_arity() const;
  std::size_t max_domain() const;

  /// Throws PreconditionError when a scope references an unknown variable,
  /// repeats a variable, a domain is empty or a table has the wrong length.
  void validate() const;
};

/// Partial assignment of value indices to variables.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t num_variables) : values_(num_variables, kUnassigned) {}
  /// Complete assignment from a value vector.
  static Assignment from_values(std::span<const ValueIndex> values);

  std::size_t size() const { return values_.size(); }
  bool has(VarId v) const { return values_.at(v) != kUnassigned; }
  ValueIndex operator[](VarId v) const { return static_cast<ValueIndex>(values_.at(v)); }
  void set(VarId v, ValueIndex value) { values_.at(v) = static_cast<std::int64_t>(value); }
  void clear(VarId v) { values_.at(v) = kUnassigned; }
  bool complete() const;
  std::size_t assigned_count() const;

  /// Value vector; throws PreconditionError when incomplete.
  std::vector<ValueIndex> values() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  static constexpr std::int64_t kUnassigned = -1;
  std::vector<std::int64_t> values_;
};

/// Throws PreconditionError when the assignment has the wrong size or a value
/// outside its domain.
void check_in_domain(const Assignment& a, std::span<const std::size_t> domains);

/// Combine over all functions of their cost under a complete assignment.
Cost evaluate(const Problem& problem, const Assignment& assignment);

/// Bayesian network: `cpts[i]` has scope `{child[i]} ∪ parents`, in any order.
struct BeliefNetwork {
  std::vector<std::size_t> domains;
  std::vector<CostFunction> cpts;  // linear probabilities
  std::vector<VarId> child;

  std::size_t num_variables() const { return domains.size(); }
  void validate() const;
  /// Largest |Σ_child P - 1| over all CPTs and parent tuples.
  double max_normalization_error() const;
};

/// A problem obtained by slicing out evidence variables. Variables are
/// renumbered densely; `original[v]` maps back.
struct ConditionedProblem {
  Problem problem;
  std::vector<VarId> original;
  Assignment evidence;

  /// Complete assignment over the original network.
  Assignment lift(const Assignment& reduced) const;
};

ConditionedProblem condition_on_evidence(const BeliefNetwork& bn, const Assignment& evidence,
                                         bool log_domain = true);

/// Sub-problem induced by `vars` (sorted). Functions whose scope lies in `vars`
/// are kept, others dropped; constant functions are dropped as well.
struct SubProblem {
  Problem problem;
  std::vector<VarId> original;
};

SubProblem extract_subproblem(const Problem& problem, std::span<const VarId> vars);

}  // namespace tbe
