#include "tbe/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "tbe/errors.hpp"
#include "tbe/io.hpp"

namespace tbe {

namespace {

using Clock = std::chrono::steady_clock;

template <class T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json opt_cost(const std::optional<Cost>& v) { return v ? cost_json(*v) : Json(nullptr); }

std::string csv_cost(const std::optional<Cost>& v) {
  if (!v) return "";
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

std::string csv_double(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", *v);
  return buf;
}

template <class T>
std::string csv_int(const std::optional<T>& v) {
  return v ? std::to_string(*v) : "";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json row_json(const BenchRow& r) {
  Json j;
  j["instance"] = r.instance;
  j["algorithm"] = r.algorithm;
  j["z"] = opt(r.z);
  j["backend"] = r.backend;
  j["status"] = r.status;
  j["variables"] = r.variables;
  j["induced_width"] = r.induced_width;
  j["optimum"] = opt_cost(r.optimum);
  j["lower"] = opt_cost(r.lower);
  j["upper"] = opt_cost(r.upper);
  j["wall_seconds"] = r.wall_seconds;
  j["speedup"] = opt(r.speedup);
  j["simulated_runtime"] = opt(r.simulated_runtime);
  j["messages"] = opt(r.messages);
  j["max_message_rows"] = opt(r.max_message_rows);
  return j;
}

GeneratorConfig generator_from_json(const Json& g) {
  GeneratorConfig c;
  c.topology = parse_topology(g.value("topology", std::string("random")));
  c.n = g.value("n", c.n);
  c.d = g.value("d", c.d);
  c.p1 = g.value("p1", c.p1);
  c.p2 = g.value("p2", c.p2);
  c.max_cost = g.value("max_cost", c.max_cost);
  c.seed = g.value("seed", c.seed);
  const std::string rule = g.value("edge_rule", std::string("formula"));
  if (rule == "formula") c.edge_rule = EdgeRule::Formula;
  else if (rule == "half-density") c.edge_rule = EdgeRule::HalfDensity;
  else throw PreconditionError("unknown edge_rule '" + rule + "'");
  return c;
}

}  // namespace

Json cost_json(Cost c) { return std::isfinite(c) ? Json(c) : Json(nullptr); }

Json stats_json(const InferenceStats& s) {
  Json j;
  j["induced_width"] = s.induced_width;
  j["max_table_rows"] = s.max_table_rows;
  j["elimination_seconds"] = s.elimination_seconds;
  j["assignment_seconds"] = s.assignment_seconds;
  j["backend"] = s.backend;
  j["components"] = s.components;
  std::size_t split = 0;
  for (std::size_t k : s.minibucket_counts) split += k > 1;
  j["split_buckets"] = split;
  return j;
}

Json metrics_json(const RunMetrics& m) {
  Json j;
  j["simulated_runtime"] = m.simulated_runtime;
  j["util_messages"] = m.util_messages;
  j["value_messages"] = m.value_messages;
  j["network_load"] = m.network_load;
  j["max_message_rows"] = m.max_message_rows;
  j["total_compute"] = m.total_compute;
  return j;
}

Json solution_json(const std::string& algorithm, const Problem& problem, const Solution& solution) {
  Json j;
  j["instance"] = problem.name;
  j["task"] = problem.task.name();
  j["algorithm"] = algorithm;
  j["feasible"] = !problem.task.is_top(solution.optimum);
  j["optimum"] = cost_json(solution.optimum);
  if (!problem.task.minimizes()) j["probability"] = problem.task.to_probability(solution.optimum);
  j["assignment"] = solution.assignment.complete() ? Json(solution.assignment.values()) : Json(nullptr);
  j["stats"] = stats_json(solution.stats);
  return j;
}

Json bounds_json(const std::string& algorithm, const Problem& problem, const Bounds& b) {
  Json j;
  j["instance"] = problem.name;
  j["task"] = problem.task.name();
  j["algorithm"] = algorithm;
  j["z"] = b.z;
  j["lower"] = cost_json(b.lower());
  j["upper"] = cost_json(b.upper());
  j["bound"] = cost_json(b.bound);
  j["assignment_cost"] = cost_json(b.assignment_cost);
  j["feasible_assignment"] = !problem.task.is_top(b.assignment_cost);
  j["assignment"] = b.assignment.complete() ? Json(b.assignment.values()) : Json(nullptr);
  j["stats"] = stats_json(b.stats);
  return j;
}

Ordering resolve_ordering(const Problem& problem, const std::string& choice) {
  const PrimalGraph g = build_primal_graph(problem);
  if (choice == "paper-degree") return make_ordering(g, OrderingHeuristic::PaperDegree);
  if (choice == "min-degree") return make_ordering(g, OrderingHeuristic::MinDegree);
  if (choice == "degree-dfs") return make_ordering(g, OrderingHeuristic::DegreeDfs);
  return parse_ordering(read_text_file(choice), problem.num_variables());
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "instance,algorithm,z,backend,status,variables,induced_width,optimum,lower,upper,wall_seconds,speedup,"
        "simulated_runtime,messages,max_message_rows\n";
  for (const auto& r : rows) {
    os << csv_field(r.instance) << ',' << r.algorithm << ',' << csv_int(r.z) << ',' << r.backend << ',' << r.status
       << ',' << r.variables << ',' << r.induced_width << ',' << csv_cost(r.optimum) << ',' << csv_cost(r.lower)
       << ',' << csv_cost(r.upper) << ',' << csv_double(r.wall_seconds) << ',' << csv_double(r.speedup) << ','
       << csv_double(r.simulated_runtime) << ',' << csv_int(r.messages) << ',' << csv_int(r.max_message_rows)
       << '\n';
  }
  return os.str();
}

std::string bench_jsonl(const std::vector<BenchRow>& rows) {
  std::string out;
  for (const auto& r : rows) out += row_json(r).dump() + "\n";
  return out;
}

BenchSuite parse_bench_suite(const std::string& text, const std::string& base_dir) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(0, std::string("bench suite: ") + e.what());
  }
  BenchSuite s;
  try {
    std::size_t k = 0;
    for (const auto& inst : j.at("instances")) {
      BenchInstance bi;
      bi.id = inst.value("id", "instance-" + std::to_string(k++));
      if (inst.contains("file")) {
        std::filesystem::path p = inst.at("file").get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        bi.file = p.string();
      } else if (inst.contains("generator")) {
        bi.generator = generator_from_json(inst.at("generator"));
      } else {
        throw ParseError(0, "bench instance '" + bi.id + "' needs a file or a generator");
      }
      s.instances.push_back(std::move(bi));
    }
    for (const auto& a : j.at("algorithms")) {
      BenchAlgorithm ba;
      ba.name = a.at("name").get<std::string>();
      if (ba.name != "be" && ba.name != "mbe" && ba.name != "dpop" && ba.name != "adpop")
        throw ParseError(0, "unknown algorithm '" + ba.name + "'");
      if (a.contains("z")) ba.z = a.at("z").get<std::size_t>();
      if ((ba.name == "mbe" || ba.name == "adpop") && !ba.z) throw ParseError(0, ba.name + " needs z");
      s.algorithms.push_back(ba);
    }
    if (j.contains("backends")) s.backends = j.at("backends").get<std::vector<std::string>>();
    s.ordering = j.value("ordering", s.ordering);
    if (j.contains("budget_gib")) s.budget_gib = j.at("budget_gib").get<double>();
    if (j.contains("timeout_sec")) s.timeout_sec = j.at("timeout_sec").get<double>();
  } catch (const Json::exception& e) {
    throw ParseError(0, std::string("bench suite: ") + e.what());
  } catch (const PreconditionError& e) {
    throw ParseError(0, std::string("bench suite: ") + e.what());
  }
  for (const auto& b : s.backends) ExecutionBackend::parse(b);
  return s;
}

std::vector<BenchRow> run_bench(const BenchSuite& suite) {
  std::vector<BenchRow> rows;
  for (const auto& inst : suite.instances) {
    const Problem problem = inst.file ? read_wcsp_file(*inst.file) : generate(*inst.generator);
    const Ordering ordering = resolve_ordering(problem, suite.ordering);
    const std::size_t width = induced_width(build_primal_graph(problem), ordering);
    for (const auto& alg : suite.algorithms) {
      std::optional<double> seq_time;
      for (const auto& backend_name : suite.backends) {
        BenchRow row;
        row.instance = inst.id;
        row.algorithm = alg.name;
        row.z = alg.z;
        row.backend = backend_name;
        row.variables = problem.num_variables();
        row.induced_width = width;
        const ExecutionBackend backend = ExecutionBackend::parse(backend_name);
        std::size_t budget = kDefaultBudgetRows;
        if (suite.budget_gib) budget = static_cast<std::size_t>(*suite.budget_gib * double(1 << 30) / sizeof(Cost));
        const auto start = Clock::now();
        try {
          if (alg.name == "be" || alg.name == "mbe") {
            SolverOptions o;
            o.backend = backend;
            o.memory_budget_rows = budget;
            if (suite.timeout_sec)
              o.deadline = start + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(*suite.timeout_sec));
            if (alg.name == "be") {
              row.optimum = bucket_elimination(problem, ordering, o).optimum;
            } else {
              const Bounds b = mini_bucket_elimination(problem, ordering, *alg.z, o);
              row.lower = b.lower();
              row.upper = b.upper();
            }
          } else {
            DcopOptions o;
            o.backend = backend;
            o.memory_budget_rows = budget;
            RunMetrics m;
            if (alg.name == "dpop") {
              DpopResult r = run_dpop(problem, ordering, o);
              row.optimum = r.solution.optimum;
              m = r.metrics;
            } else {
              AdpopResult r = run_adpop(problem, ordering, *alg.z, o);
              row.lower = r.bounds.lower();
              row.upper = r.bounds.upper();
              m = r.metrics;
            }
            row.simulated_runtime = m.simulated_runtime;
            row.messages = m.network_load;
            row.max_message_rows = m.max_message_rows;
          }
        } catch (const MemoryBudgetError&) {
          row.status = "oom";
        } catch (const TimeoutError&) {
          row.status = "timeout";
        } catch (const Error&) {
          row.status = "error";
        }
        row.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (row.status == "ok") {
          if (backend.kind() == BackendKind::Sequential && !seq_time) seq_time = row.wall_seconds;
          if (seq_time && row.wall_seconds > 0) row.speedup = *seq_time / row.wall_seconds;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace tbe
