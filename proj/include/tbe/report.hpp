#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tbe/dcop.hpp"
#include "tbe/generator.hpp"
#include "tbe/solver.hpp"

namespace tbe {

using Json = nlohmann::ordered_json;

/// Finite costs as numbers, Top and other infinities as null.
Json cost_json(Cost c);
Json stats_json(const InferenceStats& stats);
Json metrics_json(const RunMetrics& metrics);

/// Result records printed by the command-line tool.
Json solution_json(const std::string& algorithm, const Problem& problem, const Solution& solution);
Json bounds_json(const std::string& algorithm, const Problem& problem, const Bounds& bounds);

/// "paper-degree", "min-degree", "degree-dfs" or the path of a permutation file.
Ordering resolve_ordering(const Problem& problem, const std::string& choice);

/// One benchmark measurement.
struct BenchRow {
  std::string instance;
  std::string algorithm;
  std::optional<std::size_t> z;
  std::string backend;
  std::string status = "ok";  // ok | oom | timeout | error
  std::size_t variables = 0;
  std::size_t induced_width = 0;
  std::optional<Cost> optimum;  // exact algorithms
  std::optional<Cost> lower;
  std::optional<Cost> upper;
  double wall_seconds = 0.0;
  std::optional<double> speedup;  // sequential time over this row's time
  std::optional<double> simulated_runtime;
  std::optional<std::size_t> messages;
  std::optional<std::size_t> max_message_rows;
};

std::string bench_csv(const std::vector<BenchRow>& rows);
std::string bench_jsonl(const std::vector<BenchRow>& rows);

struct BenchAlgorithm {
  std::string name;  // be | mbe | dpop | adpop
  std::optional<std::size_t> z;
};

struct BenchInstance {
  std::string id;
  std::optional<std::string> file;
  std::optional<GeneratorConfig> generator;
};

struct BenchSuite {
  std::vector<BenchInstance> instances;
  std::vector<BenchAlgorithm> algorithms;
  std::vector<std::string> backends{"seq"};
  std::string ordering = "paper-degree";
  std::optional<double> budget_gib;
  std::optional<double> timeout_sec;
};

/// Suite file layout:
///   {"instances": [{"id": "...", "file": "x.wcsp"} |
///                  {"id": "...", "generator": {"topology": "random", "n": 10, "d": 5,
///                                              "p1": 0.3, "p2": 0.5, "seed": 1}}],
///    "algorithms": [{"name": "be"}, {"name": "mbe", "z": 3}],
///    "backends": ["seq", "par:4"], "ordering": "paper-degree",
///    "budget_gib": 4, "timeout_sec": 60}
/// Relative file paths resolve against `base_dir`.
BenchSuite parse_bench_suite(const std::string& text, const std::string& base_dir = ".");

/// Runs every (instance, algorithm, backend) combination one after another.
std::vector<BenchRow> run_bench(const BenchSuite& suite);

}  // namespace tbe
