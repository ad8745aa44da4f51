#include <doctest.h>

#include <cstring>
#include <random>
#include <set>

#include "support.hpp"
#include "tbe/backend.hpp"
#include "tbe/errors.hpp"
#include "tbe/kernels.hpp"
#include "tbe/table.hpp"

using namespace tbe;
using namespace tbe::testing;

namespace {

// Random subsequence layout: out scope of m ids, in scope a subsequence
// keeping the last variable.
struct Layout {
  std::vector<VarId> out_scope, in_scope;
  std::vector<std::size_t> out_dims, in_dims;
};

Layout random_layout(std::mt19937_64& rng, std::size_t max_vars, std::size_t max_domain) {
  Layout l;
  const std::size_t m = 1 + rng() % max_vars;
  std::vector<VarId> ids(12);
  for (VarId v = 0; v < 12; ++v) ids[v] = v;
  std::shuffle(ids.begin(), ids.end(), rng);
  for (std::size_t k = 0; k < m; ++k) {
    l.out_scope.push_back(ids[k]);
    l.out_dims.push_back(1 + rng() % max_domain);
  }
  for (std::size_t k = 0; k + 1 < m; ++k)
    if (rng() % 2) {
      l.in_scope.push_back(l.out_scope[k]);
      l.in_dims.push_back(l.out_dims[k]);
    }
  l.in_scope.push_back(l.out_scope.back());
  l.in_dims.push_back(l.out_dims.back());
  return l;
}

bool bit_equal(const std::vector<Cost>& a, const std::vector<Cost>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(Cost)) == 0;
}

}  // namespace

TEST_CASE("table from function") {
  const std::vector<std::size_t> domains{2, 2, 2, 2, 2};
  SUBCASE("sorted scope is copied") {
    const CostFunction f{{1, 3}, {1, 2, 3, 4}};
    const BucketTable t = table_from_function(f, domains, Ordering::identity(5));
    CHECK(t.scope == f.scope);
    CHECK(t.chi == f.costs);
  }
  SUBCASE("2x2 transpose") {
    const CostFunction f{{4, 2}, {1, 2, 3, 4}};
    const BucketTable t = table_from_function(f, domains, Ordering::identity(5));
    CHECK(t.scope == std::vector<VarId>{2, 4});
    CHECK(t.chi == std::vector<Cost>{1, 3, 2, 4});
  }
  SUBCASE("random ternary functions keep tuple semantics") {
    std::mt19937_64 rng(1);
    const std::vector<std::size_t> doms{2, 3, 4, 2, 3};
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<VarId> vars{0, 1, 2, 3, 4};
      std::shuffle(vars.begin(), vars.end(), rng);
      CostFunction f;
      f.scope.assign(vars.begin(), vars.begin() + 3);
      std::vector<std::size_t> dims;
      for (VarId v : f.scope) dims.push_back(doms[v]);
      for (std::size_t r = 0; r < dims[0] * dims[1] * dims[2]; ++r) f.costs.push_back(static_cast<Cost>(r));
      std::shuffle(vars.begin(), vars.end(), rng);
      const Ordering o(vars);
      const BucketTable t = table_from_function(f, doms, o);
      for (std::size_t k = 1; k < t.scope.size(); ++k) CHECK(o.precedes(t.scope[k - 1], t.scope[k]));
      for (std::size_t r = 0; r < f.costs.size(); ++r) {
        const auto tuple = decode(r, dims);
        Assignment a(5);
        for (std::size_t k = 0; k < 3; ++k) a.set(f.scope[k], static_cast<ValueIndex>(tuple[k]));
        CHECK(t.lookup(a) == f.costs[r]);
      }
    }
  }
}

TEST_CASE("index map of the worked example") {
  const std::vector<VarId> in{2, 3};
  const std::vector<VarId> out{1, 2, 3};
  const std::vector<std::size_t> domains{2, 2, 2, 2};
  const IndexMap m = build_index_map(in, out, domains);
  CHECK(m.mul[0] == 2);
  CHECK(m.div[0] == 2);
  CHECK(m.mod[0] == 2);
  CHECK(m.mod[1] == 2);
  CHECK(m.out_rows == 8);
  const std::vector<std::size_t> expected{0, 1, 2, 3, 0, 1, 2, 3};
  for (std::size_t r = 0; r < 8; ++r) CHECK(map_row(r, m) == expected[r]);
}

TEST_CASE("index map preconditions") {
  const std::vector<std::size_t> domains{2, 2, 2, 2};
  CHECK_THROWS_AS(build_index_map(std::vector<VarId>{2, 1}, std::vector<VarId>{1, 2, 3}, domains),
                  PreconditionError);
  CHECK_THROWS_AS(build_index_map(std::vector<VarId>{1, 2}, std::vector<VarId>{1, 2, 3}, domains),
                  PreconditionError);
  CHECK_THROWS_AS(build_index_map(std::vector<VarId>{0, 3}, std::vector<VarId>{1, 2, 3}, domains),
                  PreconditionError);
  CHECK_THROWS_AS(build_index_map(std::vector<VarId>{}, std::vector<VarId>{1}, domains), PreconditionError);
}

TEST_CASE("index map agrees with tuple matching") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 2000; ++trial) {
    const Layout l = random_layout(rng, 6, 5);
    const IndexMap m = build_index_map(l.in_scope, l.in_dims, l.out_scope, l.out_dims);
    for (std::size_t r = 0; r < m.out_rows; ++r)
      REQUIRE(map_row(r, m) == match_row(r, l.in_scope, l.in_dims, l.out_scope, l.out_dims));
  }
  SUBCASE("identical scopes map to the identity") {
    const std::vector<VarId> s{0, 1, 2};
    const IndexMap m = build_index_map(s, s, std::vector<std::size_t>{3, 2, 4});
    for (std::size_t r = 0; r < 24; ++r) CHECK(map_row(r, m) == r);
  }
}

TEST_CASE("aggregate") {
  const Semiring ms = Semiring::min_sum();
  SUBCASE("identity output takes the input") {
    BucketTable out = BucketTable::filled({3}, {4}, 0.0);
    const BucketTable in{{3}, {4}, {5, 6, 7, 8}};
    aggregate_into(out, in, ms, ExecutionBackend::sequential());
    CHECK(out.chi == in.chi);
  }
  SUBCASE("Top is absorbing") {
    BucketTable out = BucketTable::filled({0, 1}, {2, 2}, 1.0);
    const BucketTable in{{1}, {2}, {kInf, 2}};
    aggregate_into(out, in, ms, ExecutionBackend::sequential());
    CHECK(out.chi == std::vector<Cost>{kInf, 3, kInf, 3});
  }
  SUBCASE("nested-loop join oracle") {
    std::mt19937_64 rng(5);
    for (const Semiring s : {Semiring::min_sum(), Semiring::max_product(false), Semiring::max_product(true)}) {
      for (int trial = 0; trial < 200; ++trial) {
        const Layout l = random_layout(rng, 5, 4);
        BucketTable out = random_table(rng, l.out_scope, l.out_dims, s.top());
        const BucketTable in = random_table(rng, l.in_scope, l.in_dims, s.top());
        const auto expected = join_oracle(out, in, [&](Cost a, Cost b) { return s.combine(a, b); });
        aggregate_into(out, in, s, ExecutionBackend::sequential(7));
        CHECK(bit_equal(out.chi, expected));
      }
    }
  }
  SUBCASE("join of two functions into an identity table") {
    // (f + g)(t', t'') = f(t') + g(t'') on every tuple of the scope union.
    const BucketTable f{{0, 2}, {2, 3}, {1, 2, 3, 4, 5, 6}};
    const BucketTable g{{1, 2}, {2, 3}, {10, 20, 30, 40, 50, 60}};
    BucketTable out = BucketTable::filled({0, 1, 2}, {2, 2, 3}, 0.0);
    aggregate_into(out, f, ms, ExecutionBackend::sequential());
    aggregate_into(out, g, ms, ExecutionBackend::sequential());
    for (std::size_t x0 = 0; x0 < 2; ++x0)
      for (std::size_t x1 = 0; x1 < 2; ++x1)
        for (std::size_t x2 = 0; x2 < 3; ++x2)
          CHECK(out.chi[x0 * 6 + x1 * 3 + x2] == f.chi[x0 * 3 + x2] + g.chi[x1 * 3 + x2]);
  }
  SUBCASE("mismatched sizes are rejected") {
    BucketTable out = BucketTable::filled({0, 1}, {2, 2}, 0.0);
    BucketTable in{{1}, {2}, {1, 2, 3}};
    CHECK_THROWS_AS(aggregate_into(out, in, ms, ExecutionBackend::sequential()), PreconditionError);
  }
}

TEST_CASE("eliminate") {
  const Semiring ms = Semiring::min_sum();
  SUBCASE("min of consecutive pairs") {
    const BucketTable t{{0, 1}, {2, 2}, {5, 2, 7, 1}};
    const BucketTable r = eliminate_last(t, ms, ExecutionBackend::sequential());
    CHECK(r.scope == std::vector<VarId>{0});
    CHECK(r.chi == std::vector<Cost>{2, 1});
  }
  SUBCASE("unit domain only shortens the scope") {
    const BucketTable t{{0, 1}, {3, 1}, {4, 5, 6}};
    const BucketTable r = eliminate_last(t, ms, ExecutionBackend::sequential());
    CHECK(r.scope == std::vector<VarId>{0});
    CHECK(r.chi == t.chi);
  }
  SUBCASE("empty scope is rejected") {
    CHECK_THROWS_AS(eliminate_last(BucketTable{{}, {}, {1}}, ms, ExecutionBackend::sequential()), PreconditionError);
  }
  SUBCASE("Top is never selected over a finite value") {
    const BucketTable t{{0}, {3}, {kInf, 4, kInf}};
    CHECK(eliminate_last(t, ms, ExecutionBackend::sequential()).chi == std::vector<Cost>{4});
  }
  SUBCASE("grouping oracle") {
    std::mt19937_64 rng(8);
    for (const Semiring s : {Semiring::min_sum(), Semiring::max_product(false)}) {
      for (int trial = 0; trial < 200; ++trial) {
        const Layout l = random_layout(rng, 5, 4);
        const BucketTable t = random_table(rng, l.out_scope, l.out_dims, s.top());
        const auto expected = eliminate_oracle(t, [&](Cost a, Cost b) { return s.marginalize(a, b); });
        for (const auto& backend : {ExecutionBackend::sequential(), ExecutionBackend::parallel(3, 5)})
          CHECK(bit_equal(eliminate_last(t, s, backend).chi, expected));
      }
    }
  }
}

TEST_CASE("backend partitions are disjoint and covering") {
  for (const auto& b : {ExecutionBackend::sequential(), ExecutionBackend::sequential(10),
                        ExecutionBackend::parallel(4, 1 << 20), ExecutionBackend::parallel(8, 100)}) {
    for (std::size_t rows : {0ul, 1ul, 9ul, 4096ul, 100000ul}) {
      std::size_t next = 0;
      for (const RowRange& r : b.partition(rows)) {
        CHECK(r.begin == next);
        CHECK(r.end > r.begin);
        CHECK(r.size() <= b.chunk_rows());
        next = r.end;
      }
      CHECK(next == rows);
    }
  }
  CHECK(ExecutionBackend::parallel(4).partition(1 << 16).size() >= 16);
}

TEST_CASE("backend parsing") {
  CHECK(ExecutionBackend::parse("seq").kind() == BackendKind::Sequential);
  CHECK(ExecutionBackend::parse("par:3").workers() == 3);
  CHECK(ExecutionBackend::parse("par:3").name() == "par:3");
  CHECK(ExecutionBackend::parse("par").kind() == BackendKind::ParallelWorkers);
  CHECK_THROWS_AS(ExecutionBackend::parse("gpu"), PreconditionError);
  CHECK_THROWS_AS(ExecutionBackend::parse("par:0"), PreconditionError);
}

TEST_CASE("every row is visited exactly once by the parallel backend") {
  const auto b = ExecutionBackend::parallel(4, 64);
  std::vector<int> hits(100000, 0);
  b.for_each_range(hits.size(), [&](RowRange r) {
    for (std::size_t i = r.begin; i < r.end; ++i) ++hits[i];
  });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

TEST_CASE("backends agree bit for bit") {
  std::mt19937_64 rng(1234);
  const Semiring s = Semiring::min_sum();
  for (int trial = 0; trial < 200; ++trial) {
    const Layout l = random_layout(rng, 6, 5);
    const BucketTable base = random_table(rng, l.out_scope, l.out_dims, s.top());
    const BucketTable in = random_table(rng, l.in_scope, l.in_dims, s.top());
    BucketTable seq = base;
    aggregate_into(seq, in, s, ExecutionBackend::sequential());
    for (std::size_t k : {2, 4, 8}) {
      BucketTable par = base;
      aggregate_into(par, in, s, ExecutionBackend::parallel(k, 16));
      CHECK(bit_equal(par.chi, seq.chi));
      CHECK(bit_equal(eliminate_last(par, s, ExecutionBackend::parallel(k, 16)).chi,
                      eliminate_last(seq, s, ExecutionBackend::sequential()).chi));
    }
  }
}
