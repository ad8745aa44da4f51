#include <doctest.h>

#include <cstring>
#include <json.hpp>
#include <random>

#include "support.hpp"
#include "tbe/dcop.hpp"
#include "tbe/errors.hpp"
#include "tbe/oracle.hpp"

using namespace tbe;
using namespace tbe::testing;

namespace {

Ordering random_ordering(std::mt19937_64& rng, std::size_t n) {
  std::vector<VarId> o(n);
  for (VarId v = 0; v < n; ++v) o[v] = v;
  std::shuffle(o.begin(), o.end(), rng);
  return Ordering(o);
}

bool bit_equal(const std::vector<Cost>& a, const std::vector<Cost>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(Cost)) == 0;
}

bool same_tables(const std::vector<BucketTable>& a, const std::vector<BucketTable>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].scope != b[i].scope || !bit_equal(a[i].chi, b[i].chi)) return false;
  return true;
}

Problem chain(std::size_t n) {
  Problem p;
  p.domains.assign(n, 2);
  for (VarId v = 0; v + 1 < n; ++v) p.functions.push_back({{v, v + 1}, {1, 0, 0, 1}});
  return p;
}

DcopOptions util_only(std::function<double(VarId)> util_cost) {
  DcopOptions o;
  o.cost_model.custom = [util_cost](VarId v, DcopPhase phase, std::size_t) {
    return phase == DcopPhase::Util ? util_cost(v) : 0.0;
  };
  return o;
}

}  // namespace

TEST_CASE("single agent sends no messages") {
  Problem p;
  p.domains = {3};
  p.functions = {{{0}, {4, 2, 7}}};
  const DpopResult r = run_dpop(p, Ordering::identity(1));
  CHECK(r.solution.optimum == 2.0);
  CHECK(r.metrics.util_messages == 0);
  CHECK(r.metrics.value_messages == 0);
  CHECK(r.metrics.network_load == 0);
}

TEST_CASE("UTIL table of the last agent equals the bucket function") {
  const Problem p = example_problem();
  const PseudoTree tree = build_pseudo_tree(build_primal_graph(p), Ordering::identity(4));
  DcopOptions opt;
  opt.keep_tables = true;
  const DpopResult r = run_dpop(p, tree, opt);
  SolverOptions sopt;
  sopt.keep_bucket_functions = true;
  const EliminationRun be = run_elimination(p, Ordering::identity(4), std::nullopt, sopt);
  REQUIRE(r.run.util_tables[3].size() == 1);
  CHECK(r.run.util_tables[3][0].scope == std::vector<VarId>{0, 1, 2});
  CHECK(bit_equal(r.run.util_tables[3][0].chi, be.bucket_functions[3][0].chi));
  CHECK(r.solution.optimum == 4.0);
  CHECK(r.solution.assignment == be.assignment);
  CHECK(r.metrics.util_messages == 3);
  CHECK(r.metrics.value_messages == 3);
  CHECK(r.metrics.max_message_rows == 8);
}

TEST_CASE("pseudo-tree must respect the primal graph") {
  Problem star;
  star.domains = {2, 2, 2};
  star.functions = {{{0, 1}, {0, 1, 1, 0}}, {{0, 2}, {0, 1, 1, 0}}};
  const PseudoTree st = build_pseudo_tree(build_primal_graph(star), Ordering::identity(3));
  Problem cross = star;
  cross.functions.push_back({{1, 2}, {0, 1, 1, 0}});
  CHECK_THROWS_AS(run_dpop(cross, st), PreconditionError);
  CHECK_NOTHROW(run_dpop(star, st));
}

TEST_CASE("DPOP reproduces bucket elimination") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    RandomProblemSpec spec;
    spec.unary_constants = trial % 4 == 0;
    const Problem p = random_problem(rng, spec);
    const Ordering o = random_ordering(rng, p.num_variables());
    DcopOptions opt;
    opt.keep_tables = true;
    const DpopResult r = run_dpop(p, o, opt);
    SolverOptions sopt;
    sopt.keep_bucket_functions = true;
    const EliminationRun be = run_elimination(p, r.run.dfs_order, std::nullopt, sopt);
    CHECK(bit_equal({r.solution.optimum}, {be.value}));
    CHECK(r.solution.assignment == be.assignment);
    CHECK(r.solution.optimum == brute_force(p).optimum);
    for (VarId v = 0; v < p.num_variables(); ++v) CHECK(same_tables(r.run.util_tables[v], be.bucket_functions[v]));
    const std::size_t comps = connected_components(build_primal_graph(p)).size();
    CHECK(r.metrics.util_messages == p.num_variables() - comps);
    CHECK(r.metrics.value_messages == p.num_variables() - comps);
    CHECK(r.metrics.network_load == 2 * (p.num_variables() - comps));
  }
}

TEST_CASE("ADPOP reproduces mini-bucket elimination") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    RandomProblemSpec spec;
    spec.top_probability = 0.0;
    const Problem p = random_problem(rng, spec);
    const Ordering o = random_ordering(rng, p.num_variables());
    const std::size_t z = p.max_arity() + rng() % 3;
    DcopOptions opt;
    opt.keep_tables = true;
    const AdpopResult r = run_adpop(p, o, z, opt);
    SolverOptions sopt;
    sopt.keep_bucket_functions = true;
    const EliminationRun mbe = run_elimination(p, r.run.dfs_order, z, sopt);
    const Bounds b = mini_bucket_elimination(p, r.run.dfs_order, z);
    CHECK(r.bounds.bound == b.bound);
    CHECK(r.bounds.assignment == b.assignment);
    CHECK(r.bounds.assignment_cost == b.assignment_cost);
    CHECK(r.metrics.minibucket_counts == mbe.stats.minibucket_counts);
    for (VarId v = 0; v < p.num_variables(); ++v) CHECK(same_tables(r.run.util_tables[v], mbe.bucket_functions[v]));
    const Cost opt_cost = brute_force(p).optimum;
    CHECK(r.bounds.lower() <= opt_cost);
    CHECK(opt_cost <= r.bounds.upper());
  }
}

TEST_CASE("ADPOP with a bound below the arity") {
  Problem p;
  p.domains = {2, 2, 2};
  p.functions = {{{0, 1, 2}, std::vector<Cost>(8, 0.0)}};
  CHECK_THROWS_AS(run_adpop(p, Ordering::identity(3), 2), BoundTooSmallError);
}

TEST_CASE("logical clock") {
  LogicalClock c;
  c.compute(2.0);
  c.receive(1.0, 0.5);
  CHECK(c.now == 2.0);
  c.receive(3.0, 0.5);
  CHECK(c.now == 3.5);
  c.compute(1.0);
  CHECK(c.now == 4.5);
}

TEST_CASE("simulated runtime follows the critical path") {
  SUBCASE("chain of three unit computations") {
    const DpopResult r = run_dpop(chain(3), Ordering::identity(3), util_only([](VarId) { return 1.0; }));
    CHECK(r.metrics.simulated_runtime == 3.0);
    CHECK(r.metrics.total_compute == 3.0);
  }
  SUBCASE("two branches under one root") {
    Problem p;
    p.domains = {2, 2, 2};
    p.functions = {{{0, 1}, {0, 1, 1, 0}}, {{0, 2}, {0, 1, 1, 0}}};
    const DpopResult r = run_dpop(p, Ordering::identity(3), util_only([](VarId v) { return v == 0 ? 1.0 : v == 1 ? 5.0 : 7.0; }));
    CHECK(r.metrics.simulated_runtime == 8.0);
    CHECK(r.metrics.total_compute == 13.0);
  }
  SUBCASE("latency is added per hop") {
    DcopOptions opt = util_only([](VarId) { return 1.0; });
    opt.latency = 2.0;
    const DpopResult r = run_dpop(chain(3), Ordering::identity(3), opt);
    // Two UTIL hops up, then two VALUE hops down.
    CHECK(r.metrics.simulated_runtime == 3.0 + 4 * 2.0);
  }
  SUBCASE("default model charges rows") {
    const DpopResult r = run_dpop(chain(3), Ordering::identity(3));
    // UTIL rows: agents 2 and 1 combine 4 rows each, root 2. VALUE: d times own tables (1, 2, 1).
    CHECK(r.metrics.agent_compute == std::vector<double>{2 + 2, 4 + 4, 4 + 2});
    CHECK(r.metrics.simulated_runtime == r.metrics.total_compute);
  }
}

TEST_CASE("runtime is bounded by total compute") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const Problem p = random_problem(rng);
    const DpopResult r = run_dpop(p, random_ordering(rng, p.num_variables()));
    CHECK(r.metrics.simulated_runtime <= r.metrics.total_compute);
  }
  Problem star;
  star.domains = {2, 2, 2};
  star.functions = {{{0, 1}, {0, 1, 1, 0}}, {{0, 2}, {0, 1, 1, 0}}};
  const DpopResult r = run_dpop(star, Ordering::identity(3));
  CHECK(r.metrics.simulated_runtime < r.metrics.total_compute);
}

TEST_CASE("message log") {
  const Problem p = example_problem();
  DcopOptions opt;
  opt.keep_log = true;
  opt.latency = 1.0;
  const DpopResult a = run_dpop(p, Ordering::identity(4), opt);
  const DpopResult b = run_dpop(p, Ordering::identity(4), opt);
  CHECK(a.run.message_log == b.run.message_log);
  REQUIRE(a.run.message_log.size() == 6);
  std::size_t util = 0, value = 0;
  for (const auto& line : a.run.message_log) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("received").get<double>() == j.at("sent").get<double>() + 1.0);
    if (j.at("type") == "UTIL") {
      ++util;
      CHECK(j.at("receiver").get<VarId>() + 1 == j.at("sender").get<VarId>());
    } else {
      ++value;
      if (j.at("receiver") == 3) CHECK(j.at("values").size() == 3);
    }
  }
  CHECK(util == 3);
  CHECK(value == 3);
}

TEST_CASE("disconnected problems run as a forest") {
  Problem p;
  p.domains = {2, 2, 2, 2, 2};
  p.functions = {{{0, 1}, {3, 1, 2, 5}}, {{2, 3}, {7, 0, 4, 4}}, {{4}, {1, 0}}, {{}, {2}}};
  const DpopResult r = run_dpop(p, Ordering::identity(5));
  CHECK(r.solution.optimum == 3.0);
  CHECK(evaluate(p, r.solution.assignment) == 3.0);
  CHECK(r.metrics.util_messages == 2);
  CHECK(r.metrics.value_messages == 2);
}

TEST_CASE("memory budget is enforced before any agent computes") {
  Problem p;
  p.domains = std::vector<std::size_t>(10, 10);
  for (VarId a = 0; a < 10; ++a)
    for (VarId b = a + 1; b < 10; ++b) p.functions.push_back({{a, b}, std::vector<Cost>(100, 0.0)});
  DcopOptions opt;
  opt.memory_budget_rows = 10'000;
  CHECK_THROWS_AS(run_dpop(p, Ordering::identity(10), opt), MemoryBudgetError);
  CHECK_NOTHROW(run_adpop(p, Ordering::identity(10), 3, opt));
}
