#include "tbe/dcop.hpp"

#include <algorithm>
#include <chrono>
#include <queue>
#include <tuple>

#include <json.hpp>

#include "tbe/errors.hpp"
#include "tbe/kernels.hpp"

namespace tbe {

namespace {

using Clock = std::chrono::steady_clock;

// Rooted spanning forest over global variable ids.
struct Forest {
  std::vector<std::optional<VarId>> parent;
  std::vector<std::vector<VarId>> children;
  std::vector<std::vector<VarId>> separator;
  std::vector<VarId> roots;
  Ordering dfs_order;
};

Forest forest_from_tree(const PseudoTree& tree) {
  Forest f;
  f.parent = tree.parent;
  f.children = tree.children;
  f.separator = tree.separator;
  f.roots = {tree.root};
  f.dfs_order = tree.dfs_order;
  return f;
}

Forest forest_from_ordering(const Problem& problem, const Ordering& ordering) {
  const std::size_t n = problem.num_variables();
  if (ordering.size() != n) throw PreconditionError("ordering does not cover the problem variables");
  const PrimalGraph graph = build_primal_graph(problem);
  Forest f;
  f.parent.resize(n);
  f.children.resize(n);
  f.separator.resize(n);
  std::vector<VarId> preorder;
  for (const auto& comp : connected_components(graph)) {
    std::vector<VarId> local(n, 0);
    for (std::size_t i = 0; i < comp.size(); ++i) local[comp[i]] = static_cast<VarId>(i);
    PrimalGraph sub(comp.size());
    for (VarId v : comp)
      for (VarId u : graph.neighbors(v)) sub.add_edge(local[v], local[u]);
    const PseudoTree t = build_pseudo_tree(sub, restrict_ordering(ordering, comp));
    f.roots.push_back(comp[t.root]);
    for (std::size_t i = 0; i < comp.size(); ++i) {
      const VarId v = comp[i];
      if (t.parent[i]) f.parent[v] = comp[*t.parent[i]];
      for (VarId c : t.children[i]) f.children[v].push_back(comp[c]);
      for (VarId s : t.separator[i]) f.separator[v].push_back(comp[s]);
    }
    for (VarId v : t.dfs_order.order()) preorder.push_back(comp[v]);
  }
  f.dfs_order = Ordering(std::move(preorder));
  return f;
}

// Original functions sort before generated ones; generated ones follow the
// order in which bucket elimination would create them.
using ItemKey = std::tuple<int, std::size_t, std::size_t>;

struct Item {
  ItemKey key;
  BucketTable table;
};

struct Agent {
  LogicalClock clock;
  std::size_t util_received = 0;
  std::vector<Item> bucket;       // tables this agent eliminates
  std::vector<Item> forward;      // tables passing through to an ancestor
  std::vector<Item> constants;    // root only
  std::vector<BucketTable> own_tables;
};

enum class EventKind { Start, Util, Value };

struct Event {
  double time;
  std::size_t seq;
  EventKind kind;
  VarId receiver;
  VarId sender;
  double sent;
  std::size_t payload;  // index into util_payloads
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    return std::tie(a.time, a.seq) > std::tie(b.time, b.seq);
  }
};

class Simulator {
 public:
  Simulator(const Problem& problem, Forest forest, std::optional<std::size_t> z, const DcopOptions& options)
      : problem_(problem), forest_(std::move(forest)), z_(z), options_(options), sr_(problem.task) {
    const std::size_t n = problem.num_variables();
    agents_.resize(n);
    metrics_.agent_compute.assign(n, 0.0);
    metrics_.minibucket_counts.assign(n, 0);
    assignment_ = Assignment(n);
    if (options.keep_tables) tables_.resize(n);
  }

  DcopRun run() {
    const std::size_t n = problem_.num_variables();
    const Ordering& order = forest_.dfs_order;
    const std::size_t max_rows = plan_max_rows(problem_, order, z_, options_.memory_budget_rows);

    for (std::size_t j = 0; j < problem_.functions.size(); ++j) {
      BucketTable t = table_from_function(problem_.functions[j], problem_.domains, order);
      Item item{ItemKey{0, j, 0}, std::move(t)};
      if (item.table.scope.empty()) global_constants_.push_back(std::move(item));
      else agents_[item.table.scope.back()].bucket.push_back(std::move(item));
    }

    for (VarId v = 0; v < n; ++v)
      if (forest_.children[v].empty()) push(Event{0.0, 0, EventKind::Start, v, v, 0.0, 0});

    while (!queue_.empty()) {
      const Event e = queue_.top();
      queue_.pop();
      Agent& a = agents_[e.receiver];
      switch (e.kind) {
        case EventKind::Start:
          do_util(e.receiver);
          break;
        case EventKind::Util: {
          a.clock.receive(e.sent, options_.latency);
          for (Item& item : payloads_[e.payload]) route(e.receiver, std::move(item));
          payloads_[e.payload].clear();
          if (++a.util_received == forest_.children[e.receiver].size()) do_util(e.receiver);
          break;
        }
        case EventKind::Value:
          a.clock.receive(e.sent, options_.latency);
          do_value(e.receiver);
          break;
      }
    }

    DcopRun out;
    std::vector<Item> constants = std::move(global_constants_);
    for (VarId r : forest_.roots)
      for (Item& item : agents_[r].constants) constants.push_back(std::move(item));
    std::sort(constants.begin(), constants.end(), [](const Item& a, const Item& b) { return a.key < b.key; });
    out.value = sr_.identity();
    for (const Item& c : constants) out.value = sr_.combine(out.value, c.table.chi.at(0));

    for (VarId v = 0; v < n; ++v) {
      metrics_.simulated_runtime = std::max(metrics_.simulated_runtime, agents_[v].clock.now);
      metrics_.total_compute += metrics_.agent_compute[v];
    }
    metrics_.network_load = metrics_.util_messages + metrics_.value_messages;
    out.assignment = std::move(assignment_);
    out.metrics = std::move(metrics_);
    out.dfs_order = forest_.dfs_order;
    out.max_table_rows = max_rows;
    out.util_tables = std::move(tables_);
    out.message_log = std::move(log_);
    return out;
  }

 private:
  void push(Event e) {
    e.seq = seq_++;
    queue_.push(e);
  }

  void route(VarId at, Item item) {
    Agent& a = agents_[at];
    if (item.table.scope.empty()) {
      if (forest_.parent[at]) a.forward.push_back(std::move(item));
      else a.constants.push_back(std::move(item));
    } else if (item.table.scope.back() == at) {
      a.bucket.push_back(std::move(item));
    } else {
      a.forward.push_back(std::move(item));
    }
  }

  double charge(VarId v, DcopPhase phase, std::size_t rows, Clock::time_point started) {
    const CostModel& m = options_.cost_model;
    double d;
    if (m.custom) d = m.custom(v, phase, rows);
    else if (m.wall_clock) d = std::chrono::duration<double>(Clock::now() - started).count();
    else d = m.units_per_row * static_cast<double>(rows);
    agents_[v].clock.compute(d);
    metrics_.agent_compute[v] += d;
    return d;
  }

  void do_util(VarId v) {
    const auto started = Clock::now();
    Agent& a = agents_[v];
    const Ordering& order = forest_.dfs_order;
    const std::size_t n = problem_.num_variables();
    std::sort(a.bucket.begin(), a.bucket.end(), [](const Item& x, const Item& y) { return x.key < y.key; });

    std::vector<std::vector<std::size_t>> groups;
    if (!a.bucket.empty()) {
      if (z_) {
        std::vector<std::vector<VarId>> scopes;
        for (const Item& item : a.bucket) scopes.push_back(item.table.scope);
        groups = partition_bucket(scopes, *z_);
      } else {
        groups.emplace_back(a.bucket.size());
        for (std::size_t i = 0; i < a.bucket.size(); ++i) groups[0][i] = i;
      }
    }
    metrics_.minibucket_counts[v] = groups.size();

    std::size_t rows = 0;
    std::vector<Item> produced;
    for (std::size_t k = 0; k < groups.size(); ++k) {
      std::vector<const std::vector<VarId>*> ptrs;
      for (std::size_t m : groups[k]) ptrs.push_back(&a.bucket[m].table.scope);
      std::vector<VarId> scope = scope_union(ptrs, order);
      std::vector<std::size_t> dims;
      for (VarId u : scope) dims.push_back(problem_.domains[u]);
      BucketTable acc = BucketTable::filled(std::move(scope), std::move(dims), sr_.identity());
      for (std::size_t m : groups[k]) aggregate_into(acc, a.bucket[m].table, sr_, options_.backend);
      rows += acc.rows();
      BucketTable out = eliminate_last(std::move(acc), sr_, options_.backend);
      if (options_.keep_tables) tables_[v].push_back(out);
      produced.push_back(Item{ItemKey{1, n - 1 - order.position(v), k}, std::move(out)});
    }
    for (Item& item : a.bucket) a.own_tables.push_back(std::move(item.table));
    a.bucket.clear();
    charge(v, DcopPhase::Util, rows, started);

    if (const auto p = forest_.parent[v]) {
      std::vector<Item> msg = std::move(a.forward);
      a.forward.clear();
      for (Item& item : produced) msg.push_back(std::move(item));
      ++metrics_.util_messages;
      for (const Item& item : msg) metrics_.max_message_rows = std::max(metrics_.max_message_rows, item.table.rows());
      const double sent = a.clock.now;
      if (options_.keep_log) log_util(v, *p, msg, sent);
      payloads_.push_back(std::move(msg));
      push(Event{sent + options_.latency, 0, EventKind::Util, *p, v, sent, payloads_.size() - 1});
    } else {
      for (Item& item : produced) a.constants.push_back(std::move(item));
      do_value(v);
    }
  }

  void do_value(VarId v) {
    const auto started = Clock::now();
    Agent& a = agents_[v];
    const std::size_t d = problem_.domains[v];
    sr_.visit([&](auto ops) {
      using Ops = decltype(ops);
      ValueIndex best_value = 0;
      Cost best = Ops::identity();
      for (ValueIndex x = 0; x < d; ++x) {
        assignment_.set(v, x);
        Cost c = Ops::identity();
        for (const BucketTable& t : a.own_tables) c = Ops::combine(c, t.lookup(assignment_));
        if (x == 0 || Ops::better(c, best)) {
          best = c;
          best_value = x;
        }
      }
      assignment_.set(v, best_value);
    });
    charge(v, DcopPhase::Value, d * a.own_tables.size(), started);

    const double sent = a.clock.now;
    for (VarId c : forest_.children[v]) {
      ++metrics_.value_messages;
      if (options_.keep_log) log_value(v, c, sent);
      push(Event{sent + options_.latency, 0, EventKind::Value, c, v, sent, 0});
    }
  }

  void log_util(VarId from, VarId to, const std::vector<Item>& msg, double sent) {
    nlohmann::json tables = nlohmann::json::array();
    for (const Item& item : msg)
      tables.push_back({{"scope", item.table.scope}, {"dims", item.table.dims}, {"rows", item.table.rows()}});
    nlohmann::json j = {{"type", "UTIL"}, {"sender", from}, {"receiver", to}, {"tables", tables},
                        {"sent", sent},   {"received", sent + options_.latency}};
    log_.push_back(j.dump());
  }

  void log_value(VarId from, VarId to, double sent) {
    nlohmann::json values = nlohmann::json::array();
    for (VarId s : forest_.separator[to]) values.push_back({s, assignment_[s]});
    nlohmann::json j = {{"type", "VALUE"}, {"sender", from}, {"receiver", to}, {"values", values},
                        {"sent", sent},    {"received", sent + options_.latency}};
    log_.push_back(j.dump());
  }

  const Problem& problem_;
  Forest forest_;
  std::optional<std::size_t> z_;
  const DcopOptions& options_;
  Semiring sr_;
  std::vector<Agent> agents_;
  std::vector<Item> global_constants_;
  std::vector<std::vector<Item>> payloads_;
  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  std::size_t seq_ = 0;
  Assignment assignment_;
  RunMetrics metrics_;
  std::vector<std::vector<BucketTable>> tables_;
  std::vector<std::string> log_;
};

InferenceStats make_stats(const Problem& problem, const DcopRun& run, const DcopOptions& options, double seconds) {
  InferenceStats s;
  const PrimalGraph g = build_primal_graph(problem);
  s.induced_width = induced_width(g, run.dfs_order);
  s.components = connected_components(g).size();
  s.max_table_rows = run.max_table_rows;
  s.elimination_seconds = seconds;
  s.backend = options.backend.name();
  s.minibucket_counts = run.metrics.minibucket_counts;
  return s;
}

DcopRun simulate(const Problem& problem, Forest forest, std::optional<std::size_t> z, const DcopOptions& options,
                 double& seconds) {
  problem.validate();
  const auto start = Clock::now();
  Simulator sim(problem, std::move(forest), z, options);
  DcopRun run = sim.run();
  seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return run;
}

DpopResult finish_dpop(const Problem& problem, Forest forest, const DcopOptions& options) {
  double seconds = 0.0;
  DpopResult r;
  r.run = simulate(problem, std::move(forest), std::nullopt, options, seconds);
  r.solution.optimum = r.run.value;
  r.solution.assignment = r.run.assignment;
  r.solution.stats = make_stats(problem, r.run, options, seconds);
  r.metrics = r.run.metrics;
  return r;
}

AdpopResult finish_adpop(const Problem& problem, Forest forest, std::size_t z, const DcopOptions& options) {
  double seconds = 0.0;
  AdpopResult r;
  r.run = simulate(problem, std::move(forest), z, options, seconds);
  r.bounds.task = problem.task;
  r.bounds.z = z;
  r.bounds.bound = r.run.value;
  r.bounds.assignment = r.run.assignment;
  r.bounds.assignment_cost = evaluate(problem, r.run.assignment);
  r.bounds.stats = make_stats(problem, r.run, options, seconds);
  r.metrics = r.run.metrics;
  return r;
}

void check_tree(const Problem& problem, const PseudoTree& tree) {
  if (tree.size() != problem.num_variables()) throw PreconditionError("pseudo-tree does not match the problem");
  const PrimalGraph g = build_primal_graph(problem);
  for (VarId v = 0; v < g.size(); ++v)
    for (VarId u : g.neighbors(v))
      if (u != v && !tree.is_ancestor(u, v) && !tree.is_ancestor(v, u))
        throw PreconditionError("constraint between x" + std::to_string(u) + " and x" + std::to_string(v) +
                                " links two branches of the pseudo-tree");
}

}  // namespace

DpopResult run_dpop(const Problem& problem, const PseudoTree& tree, const DcopOptions& options) {
  problem.validate();
  check_tree(problem, tree);
  return finish_dpop(problem, forest_from_tree(tree), options);
}

AdpopResult run_adpop(const Problem& problem, const PseudoTree& tree, std::size_t z, const DcopOptions& options) {
  problem.validate();
  check_tree(problem, tree);
  return finish_adpop(problem, forest_from_tree(tree), z, options);
}

DpopResult run_dpop(const Problem& problem, const Ordering& ordering, const DcopOptions& options) {
  problem.validate();
  return finish_dpop(problem, forest_from_ordering(problem, ordering), options);
}

AdpopResult run_adpop(const Problem& problem, const Ordering& ordering, std::size_t z, const DcopOptions& options) {
  problem.validate();
  return finish_adpop(problem, forest_from_ordering(problem, ordering), z, options);
}

}  // namespace tbe
