#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tbe/backend.hpp"
#include "tbe/graph.hpp"
#include "tbe/problem.hpp"
#include "tbe/solver.hpp"
#include "tbe/table.hpp"

namespace tbe {

enum class DcopPhase { Util, Value };

/// Abstract compute time charged to an agent. By default a phase costs
/// `units_per_row` per table row touched; `custom` overrides it and
/// `wall_clock` measures real seconds instead.
struct CostModel {
  double units_per_row = 1.0;
  std::function<double(VarId agent, DcopPhase phase, std::size_t rows)> custom;
  bool wall_clock = false;
};

/// Logical clock of one agent.
struct LogicalClock {
  double now = 0.0;

  void compute(double duration) { now += duration; }
  void receive(double timestamp, double latency) { now = std::max(now, timestamp + latency); }
};

struct DcopOptions {
  ExecutionBackend backend;
  std::size_t memory_budget_rows = kDefaultBudgetRows;
  double latency = 0.0;
  CostModel cost_model;
  /// Keep each agent's computed UTIL tables in the result.
  bool keep_tables = false;
  /// Record every message as one JSON line.
  bool keep_log = false;
};

struct RunMetrics {
  double simulated_runtime = 0.0;  // largest final clock
  std::size_t util_messages = 0;
  std::size_t value_messages = 0;
  std::size_t network_load = 0;       // total message count
  std::size_t max_message_rows = 0;   // largest single UTIL table
  std::vector<double> agent_compute;  // per agent, both phases
  double total_compute = 0.0;
  std::vector<std::size_t> minibucket_counts;  // per agent
};

struct DcopRun {
  Cost value = 0.0;
  Assignment assignment;
  RunMetrics metrics;
  /// Pseudo-forest preorder; BE under this ordering builds the same tables.
  Ordering dfs_order;
  std::size_t max_table_rows = 0;
  /// Tables computed by each agent, one per mini-bucket (keep_tables only).
  std::vector<std::vector<BucketTable>> util_tables;
  std::vector<std::string> message_log;
};

struct DpopResult {
  Solution solution;
  RunMetrics metrics;
  DcopRun run;
};

struct AdpopResult {
  Bounds bounds;
  RunMetrics metrics;
  DcopRun run;
};

/// One agent per variable, arranged by `tree` (the problem must be connected).
DpopResult run_dpop(const Problem& problem, const PseudoTree& tree, const DcopOptions& options = {});
AdpopResult run_adpop(const Problem& problem, const PseudoTree& tree, std::size_t z,
                      const DcopOptions& options = {});

/// Any problem: one pseudo-tree per connected component, each rooted at the
/// component's first variable under `ordering`. Components run side by side.
DpopResult run_dpop(const Problem& problem, const Ordering& ordering, const DcopOptions& options = {});
AdpopResult run_adpop(const Problem& problem, const Ordering& ordering, std::size_t z,
                      const DcopOptions& options = {});

}  // namespace tbe
