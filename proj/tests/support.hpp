#pragma once

// Fixtures and brute-force reference implementations shared by the tests.
// The oracles below deliberately avoid the library's indexing helpers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "tbe/problem.hpp"
#include "tbe/table.hpp"

namespace tbe::testing {

inline constexpr Cost kInf = std::numeric_limits<Cost>::infinity();

/// The four-variable example WCSP: x0..x3 binary, five binary functions.
inline Problem example_problem() {
  Problem p;
  p.name = "example";
  p.domains = {2, 2, 2, 2};
  p.functions = {
      {{0, 1}, {3, 0, 0, 2}},
      {{0, 3}, {4, 1, 2, 1}},
      {{1, 2}, {1, 1, 0, 4}},
      {{1, 3}, {4, 3, 4, 0}},
      {{2, 3}, {1, 3, 1, 3}},
  };
  return p;
}

/// Row of a tuple, first position most significant.
inline std::size_t encode(const std::vector<std::size_t>& tuple, const std::vector<std::size_t>& dims) {
  std::size_t r = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) r = r * dims[k] + tuple[k];
  return r;
}

inline std::vector<std::size_t> decode(std::size_t r, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> t(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    t[k] = r % dims[k];
    r /= dims[k];
  }
  return t;
}

/// Input row matching an output row, found by comparing variable ids.
inline std::size_t match_row(std::size_t r_out, const std::vector<VarId>& in_scope,
                             const std::vector<std::size_t>& in_dims, const std::vector<VarId>& out_scope,
                             const std::vector<std::size_t>& out_dims) {
  const auto out_tuple = decode(r_out, out_dims);
  std::vector<std::size_t> in_tuple(in_scope.size());
  for (std::size_t i = 0; i < in_scope.size(); ++i)
    for (std::size_t j = 0; j < out_scope.size(); ++j)
      if (in_scope[i] == out_scope[j]) in_tuple[i] = out_tuple[j];
  return encode(in_tuple, in_dims);
}

/// Nested-loop join: out[r] ⊕= in[matching row].
inline std::vector<Cost> join_oracle(const BucketTable& out, const BucketTable& in,
                                     const std::function<Cost(Cost, Cost)>& combine) {
  std::vector<Cost> res = out.chi;
  for (std::size_t r = 0; r < res.size(); ++r)
    res[r] = combine(res[r], in.chi[match_row(r, in.scope, in.dims, out.scope, out.dims)]);
  return res;
}

/// Group rows by the tuple without the last variable and reduce each group.
inline std::vector<Cost> eliminate_oracle(const BucketTable& t, const std::function<Cost(Cost, Cost)>& reduce) {
  std::vector<std::size_t> out_dims(t.dims.begin(), t.dims.end() - 1);
  std::map<std::size_t, Cost> groups;
  for (std::size_t r = 0; r < t.chi.size(); ++r) {
    auto tuple = decode(r, t.dims);
    tuple.pop_back();
    const std::size_t key = encode(tuple, out_dims);
    auto it = groups.find(key);
    if (it == groups.end()) groups.emplace(key, t.chi[r]);
    else it->second = reduce(it->second, t.chi[r]);
  }
  std::vector<Cost> res;
  for (auto& [k, v] : groups) res.push_back(v);
  return res;
}

/// Sum of function costs (min-sum) by scanning the scope tuple directly.
inline Cost naive_cost(const Problem& p, const std::vector<std::size_t>& values) {
  Cost total = 0.0;
  for (const auto& f : p.functions) {
    std::vector<std::size_t> dims, tuple;
    for (VarId v : f.scope) {
      dims.push_back(p.domains[v]);
      tuple.push_back(values[v]);
    }
    total += f.costs[encode(tuple, dims)];
  }
  return total;
}

struct RandomProblemSpec {
  std::size_t min_vars = 3, max_vars = 8;
  std::size_t max_domain = 3;
  std::size_t max_arity = 3;
  std::size_t min_functions = 2, max_functions = 10;
  double top_probability = 0.1;
  bool unary_constants = false;  // add an empty-scope function
};

/// Random min-sum problem with mixed arities and integer costs.
inline Problem random_problem(std::mt19937_64& rng, const RandomProblemSpec& s = {}) {
  std::uniform_int_distribution<std::size_t> nv(s.min_vars, s.max_vars);
  std::uniform_int_distribution<std::size_t> dom(1, s.max_domain);
  std::uniform_int_distribution<int> cost(0, 20);
  std::bernoulli_distribution top(s.top_probability);
  Problem p;
  p.name = "random";
  const std::size_t n = nv(rng);
  for (std::size_t i = 0; i < n; ++i) p.domains.push_back(dom(rng));
  std::uniform_int_distribution<std::size_t> nf(s.min_functions, s.max_functions);
  std::uniform_int_distribution<std::size_t> ar(1, std::min(s.max_arity, n));
  const std::size_t m = nf(rng);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<VarId> vars(n);
    for (VarId v = 0; v < n; ++v) vars[v] = v;
    std::shuffle(vars.begin(), vars.end(), rng);
    vars.resize(ar(rng));
    CostFunction f;
    f.scope = vars;
    std::size_t rows = 1;
    for (VarId v : vars) rows *= p.domains[v];
    for (std::size_t r = 0; r < rows; ++r) f.costs.push_back(top(rng) ? kInf : cost(rng));
    p.functions.push_back(std::move(f));
  }
  if (s.unary_constants) p.functions.push_back({{}, {static_cast<Cost>(cost(rng))}});
  return p;
}

/// Random BucketTable over `scope` with values in [0, 100) and occasional Top.
inline BucketTable random_table(std::mt19937_64& rng, std::vector<VarId> scope, std::vector<std::size_t> dims,
                                Cost top) {
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::bernoulli_distribution t(0.05);
  BucketTable table;
  table.scope = std::move(scope);
  table.dims = std::move(dims);
  std::size_t rows = 1;
  for (std::size_t d : table.dims) rows *= d;
  for (std::size_t r = 0; r < rows; ++r) table.chi.push_back(t(rng) ? top : u(rng));
  return table;
}

/// Bayesian network over a random DAG: each variable picks up to
/// `max_parents` parents among lower ids.
inline BeliefNetwork random_network(std::mt19937_64& rng, std::size_t n, std::size_t max_domain,
                                    std::size_t max_parents) {
  std::uniform_int_distribution<std::size_t> dom(2, max_domain);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  BeliefNetwork bn;
  for (std::size_t i = 0; i < n; ++i) bn.domains.push_back(dom(rng));
  for (VarId v = 0; v < n; ++v) {
    std::vector<VarId> earlier(v);
    for (VarId u2 = 0; u2 < v; ++u2) earlier[u2] = u2;
    std::shuffle(earlier.begin(), earlier.end(), rng);
    std::uniform_int_distribution<std::size_t> np(0, std::min<std::size_t>(max_parents, v));
    earlier.resize(np(rng));
    CostFunction cpt;
    cpt.scope = earlier;
    cpt.scope.push_back(v);
    std::size_t parent_rows = 1;
    for (VarId p : earlier) parent_rows *= bn.domains[p];
    const std::size_t d = bn.domains[v];
    for (std::size_t r = 0; r < parent_rows; ++r) {
      std::vector<double> w(d);
      double sum = 0.0;
      for (double& x : w) sum += (x = u(rng));
      for (double x : w) cpt.costs.push_back(x / sum);
    }
    bn.cpts.push_back(std::move(cpt));
    bn.child.push_back(v);
  }
  return bn;
}

/// Max over joint assignments of the product of CPT entries, ties to the
/// lexicographically smallest assignment. Evidence variables are fixed.
struct JointMax {
  double probability = 0.0;
  std::vector<std::size_t> values;
};

inline JointMax joint_max(const BeliefNetwork& bn, const std::vector<std::int64_t>& evidence) {
  const std::size_t n = bn.domains.size();
  JointMax best;
  best.probability = -1.0;
  std::vector<std::size_t> x(n, 0);
  const std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == n) {
      double p = 1.0;
      for (const auto& cpt : bn.cpts) {
        std::vector<std::size_t> dims, tuple;
        for (VarId v : cpt.scope) {
          dims.push_back(bn.domains[v]);
          tuple.push_back(x[v]);
        }
        p *= cpt.costs[encode(tuple, dims)];
      }
      if (p > best.probability) best = {p, x};
      return;
    }
    if (evidence[i] >= 0) {
      x[i] = static_cast<std::size_t>(evidence[i]);
      rec(i + 1);
      return;
    }
    for (std::size_t v = 0; v < bn.domains[i]; ++v) {
      x[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return best;
}

}  // namespace tbe::testing
